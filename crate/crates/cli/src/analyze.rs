use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use gcm_core::{analytic_rho, empirical_pearson, rho_experiment, BatchProtocol, SimulationConfig};
use serde::Serialize;

use crate::config::{check_q, Grid, ModelArgs};
use crate::output::{csv_to_writer, write_csv};
use crate::{Outcome, Stage};

/// Vertex count for empirical estimates when none is given.
pub const DEFAULT_RHO_N: usize = 4000;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Measure the correlation of this edge list instead of a model
    #[arg(long, conflicts_with_all = ["dist", "config"])]
    graph: Option<PathBuf>,
    /// q values, as a list or start:stop:step (default 0:0.9:0.1)
    #[arg(long = "q-grid")]
    q_grid: Option<Grid>,
    /// Skip the Monte Carlo columns
    #[arg(long)]
    analytic_only: bool,
    /// CSV output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct RhoRow {
    pub q: Option<f64>,
    pub rho_analytic: Option<f64>,
    pub rho_empirical: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

pub fn run(args: AnalyzeArgs) -> Outcome {
    let rows = match &args.graph {
        Some(path) => vec![graph_row(path)?],
        None => model_rows(&args)?,
    };
    match &args.out {
        Some(path) => write_csv(&rows, path).runtime(),
        None => csv_to_writer(&rows, io::stdout().lock()).runtime(),
    }
}

fn graph_row(path: &Path) -> Result<RhoRow, crate::Failure> {
    let graph = crate::output::read_edge_list(path).runtime()?;
    let report = empirical_pearson(&graph).runtime()?;
    if report.is_none() {
        eprintln!("degree correlation undefined: all edge endpoints have the same degree");
    }
    Ok(RhoRow {
        q: sidecar_q(path),
        rho_analytic: None,
        rho_empirical: report.map(|r| r.rho),
        ci_low: None,
        ci_high: None,
    })
}

/// `q` from the metadata written next to a generated edge list, if any.
fn sidecar_q(path: &Path) -> Option<f64> {
    let mut meta = path.as_os_str().to_owned();
    meta.push(".json");
    let text = fs::read_to_string(PathBuf::from(meta)).ok()?;
    serde_json::from_str::<serde_json::Value>(&text).ok()?.get("q")?.as_f64()
}

fn model_rows(args: &AnalyzeArgs) -> Result<Vec<RhoRow>, crate::Failure> {
    let cfg = args.model.merged().config()?;
    let model = cfg.resolve_model().config()?;
    let grid = match (&args.q_grid, &cfg.q_grid, cfg.q) {
        (Some(g), _, _) => g.0.clone(),
        (None, Some(g), _) => g.clone(),
        (None, None, Some(q)) => vec![q],
        (None, None, None) => (0..10).map(|i| i as f64 / 10.0).collect(),
    };
    for &q in &grid {
        check_q(q).config()?;
    }
    let protocol = BatchProtocol {
        replications: cfg.replications.unwrap_or(100),
        ..BatchProtocol::default()
    };
    let simulate = !args.analytic_only;
    if simulate && !model.h.is_involution() {
        return Err(anyhow!(
            "permutation {} is not an involution and cannot be simulated; use --analytic-only",
            model.h
        ))
        .config();
    }
    let mut rows = Vec::with_capacity(grid.len());
    for q in grid {
        let analytic = analytic_rho(&model.partition, &model.h, q).config()?;
        let mut row = RhoRow {
            q: Some(q),
            rho_analytic: Some(analytic.rho),
            rho_empirical: None,
            ci_low: None,
            ci_high: None,
        };
        if simulate {
            let mut sim = SimulationConfig::new(
                model.pmf.clone(),
                cfg.n.unwrap_or(DEFAULT_RHO_N),
                model.partition.b(),
                q,
                model.h.clone(),
                cfg.seed_or_default(),
            );
            sim.mode = model.label.clone();
            let r = rho_experiment(&sim, protocol).config()?;
            row.rho_empirical = Some(r.point_estimate);
            row.ci_low = Some(r.ci_low());
            row.ci_high = Some(r.ci_high());
        }
        rows.push(row);
    }
    Ok(rows)
}
