use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::{Args, ValueEnum};
use gcm_core::presets::{
    modified_geometric_partition, ThresholdRow, TABLE_Q, THRESHOLDS_B2, THRESHOLDS_B3,
};
use gcm_core::simulation::percolation_batches;
use gcm_core::{
    BatchProtocol, BlockModel, BlockPartition, Mixing, PermutationH, PreparedModel, SolveOptions,
};
use serde::Serialize;

use crate::config::{check_phi, check_q, Grid, ModelArgs};
use crate::output::{write_csv, write_json};
use crate::{Outcome, Stage};

pub const DEFAULT_PERCOLATION_N: usize = 100_000;
pub const BISECTION_WIDTH: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Modified geometric, two blocks, assortative and disassortative
    #[value(name = "table1-b2")]
    Table1B2,
    /// Modified geometric, three blocks, assortative, disassortative and rotator
    #[value(name = "table1-b3")]
    Table1B3,
}

#[derive(Debug, Args)]
pub struct PercolateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Published configuration set; --q and --mode narrow it
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Occupation probabilities for giant-component curves
    #[arg(long = "phi-grid")]
    phi_grid: Option<Grid>,
    /// Add Monte Carlo giant-component estimates to the curves
    #[arg(long)]
    simulate: bool,
    /// Directory for thresholds.json and eta.csv
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// One `(partition, q, h)` to analyze.
#[derive(Debug, Clone)]
pub struct Case {
    pub partition: BlockPartition,
    pub q: f64,
    pub h: PermutationH,
    pub label: String,
    pub published: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEntry {
    pub b: usize,
    pub q: f64,
    pub mode: String,
    pub h: Vec<usize>,
    /// `h` is not an involution, so no graph can be generated for it.
    pub analytic_only: bool,
    pub lambda1: f64,
    pub eigvec: Vec<f64>,
    pub phi_star: f64,
    pub phi_star_numeric: Option<f64>,
    pub agreement: Option<f64>,
    /// `false` when no giant component forms even at `phi = 1`.
    pub reachable: bool,
    pub published_phi_star: Option<f64>,
    pub published_numerical: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaRow {
    pub phi: f64,
    pub q: f64,
    pub mode: String,
    pub eta_analytic: f64,
    pub eta_alt_form: f64,
    pub eta_simulated: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

/// Settings for optional Monte Carlo columns.
#[derive(Debug, Clone, Copy)]
pub struct Simulation {
    pub n: usize,
    pub seed: u64,
    pub protocol: BatchProtocol,
}

pub fn preset_cases(rows: &[ThresholdRow], qs: &[f64], mode: Option<Mixing>) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for row in rows {
        let keep = match mode {
            None => true,
            Some(Mixing::Assortative) => row.mode.as_str() == "assortative",
            Some(Mixing::Disassortative) => row.mode.as_str() == "disassortative",
        };
        if !keep {
            continue;
        }
        let partition = modified_geometric_partition(row.b)?;
        for &q in qs {
            let published = TABLE_Q
                .iter()
                .position(|t| *t == q)
                .map(|k| (row.phi_star[k], row.numerical[k]));
            cases.push(Case {
                partition: partition.clone(),
                q,
                h: row.mode.permutation(row.b),
                label: row.mode.as_str().to_string(),
                published,
            });
        }
    }
    Ok(cases)
}

pub fn threshold_entry(case: &Case) -> Result<ThresholdEntry> {
    let model = BlockModel::from_partition(&case.partition, case.q, case.h.clone())?;
    let r = model.threshold_report(BISECTION_WIDTH)?;
    Ok(ThresholdEntry {
        b: case.partition.b(),
        q: case.q,
        mode: case.label.clone(),
        h: case.h.one_based(),
        analytic_only: !case.h.is_involution(),
        lambda1: r.lambda1,
        eigvec: r.eigvec,
        phi_star: r.phi_star,
        phi_star_numeric: r.phi_star_numeric,
        agreement: r.agreement,
        reachable: r.reachable,
        published_phi_star: case.published.map(|p| p.0),
        published_numerical: case.published.map(|p| p.1),
    })
}

pub fn eta_rows(case: &Case, phis: &[f64], sim: Option<Simulation>) -> Result<Vec<EtaRow>> {
    let model = BlockModel::from_partition(&case.partition, case.q, case.h.clone())?;
    let prepared = match sim {
        Some(s) if case.h.is_involution() => Some(PreparedModel::from_partition(
            case.partition.clone(),
            s.n,
            case.q,
            case.h.clone(),
        )?),
        _ => None,
    };
    let mut rows = Vec::with_capacity(phis.len());
    for &phi in phis {
        let s = model.solve_fixed_point(phi, SolveOptions::default())?;
        let mut row = EtaRow {
            phi,
            q: case.q,
            mode: case.label.clone(),
            eta_analytic: s.eta,
            eta_alt_form: s.eta_alt_form,
            eta_simulated: None,
            ci_low: None,
            ci_high: None,
        };
        if let (Some(prepared), Some(sim)) = (&prepared, sim) {
            let r = percolation_batches(prepared, sim.seed, phi, sim.protocol)?;
            row.eta_simulated = Some(r.point_estimate);
            row.ci_low = Some(r.ci_low());
            row.ci_high = Some(r.ci_high());
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn run(args: PercolateArgs) -> Outcome {
    let cfg = args.model.merged().config()?;
    let qs: Vec<f64> = match (cfg.q, &cfg.q_grid) {
        (Some(q), _) => vec![q],
        (None, Some(g)) => g.clone(),
        (None, None) if args.preset.is_some() => TABLE_Q.to_vec(),
        (None, None) => vec![0.0],
    };
    for &q in &qs {
        check_q(q).config()?;
    }
    let cases = match args.preset {
        Some(Preset::Table1B2) => preset_cases(&THRESHOLDS_B2, &qs, cfg.mode).config()?,
        Some(Preset::Table1B3) => preset_cases(&THRESHOLDS_B3, &qs, cfg.mode).config()?,
        None => {
            let model = cfg.resolve_model().config()?;
            qs.iter()
                .map(|&q| Case {
                    partition: model.partition.clone(),
                    q,
                    h: model.h.clone(),
                    label: model.label.clone(),
                    published: None,
                })
                .collect()
        }
    };
    let phis = args
        .phi_grid
        .map(|g| g.0)
        .or(cfg.phi_grid.clone())
        .or(cfg.phi.map(|p| vec![p]));
    if let Some(phis) = &phis {
        for &phi in phis {
            check_phi(phi).config()?;
        }
    }
    let sim = args.simulate.then(|| Simulation {
        n: cfg.n.unwrap_or(DEFAULT_PERCOLATION_N),
        seed: cfg.seed_or_default(),
        protocol: BatchProtocol {
            replications: cfg.replications.unwrap_or(100),
            ..BatchProtocol::default()
        },
    });
    if args.simulate && phis.is_none() {
        return Err(anyhow!("--simulate needs --phi-grid")).config();
    }

    let entries = cases
        .iter()
        .map(threshold_entry)
        .collect::<Result<Vec<_>>>()
        .runtime()?;
    println!("{}", serde_json::to_string_pretty(&entries).runtime()?);
    let out_dir = args.out_dir.or(cfg.out_dir.clone());
    if let Some(dir) = &out_dir {
        write_json(&entries, &dir.join("thresholds.json")).runtime()?;
    }
    if let Some(phis) = phis {
        let mut rows = Vec::new();
        for case in &cases {
            rows.extend(eta_rows(case, &phis, sim).config()?);
        }
        let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
        let path = dir.join("eta.csv");
        write_csv(&rows, &path).runtime()?;
        eprintln!("wrote {}", Path::new(&path).display());
    }
    Ok(())
}
