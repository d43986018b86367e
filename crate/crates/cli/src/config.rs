//! Experiment settings from flags and/or a JSON file, and their resolution
//! into concrete model pieces.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use gcm_core::degree_model::compute_u;
use gcm_core::{
    choose_permutation, partition_blocks, BlockPartition, DegreePmf, DistributionSpec, Mixing,
    PermutationH,
};
use serde::{Deserialize, Serialize};

/// JSON mirror of the experiment flags. Every field is optional; flags
/// given on the command line win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: Option<DistributionField>,
    pub n: Option<usize>,
    pub b: Option<usize>,
    pub q: Option<f64>,
    pub q_grid: Option<Vec<f64>>,
    pub mode: Option<Mixing>,
    /// 1-based block permutation, overrides `mode`.
    pub h: Option<Vec<usize>>,
    pub phi: Option<f64>,
    pub phi_grid: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

/// A distribution written either compactly (`"uniform:1:3"`) or as a
/// JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionField {
    Compact(String),
    Spec(DistributionSpec),
}

impl DistributionField {
    pub fn spec(&self) -> Result<DistributionSpec> {
        match self {
            DistributionField::Compact(s) => Ok(DistributionSpec::from_str(s)?),
            DistributionField::Spec(spec) => Ok(spec.clone()),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))
    }
}

/// A list `0.1,0.2,0.5` or an inclusive range `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [start, stop, step] => {
                let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(format!("empty range {s:?}"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=count)
                    .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                    .collect()
            }
            [list] => list.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
            _ => return Err(format!("expected a list or start:stop:step, got {s:?}")),
        };
        if values.is_empty() {
            return Err("empty grid".into());
        }
        Ok(Grid(values))
    }
}

/// Flags shared by every experiment command.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// JSON file with experiment settings; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Degree distribution, e.g. uniform:1:3, geometric:0.6667, poisson:10, powerlaw:2:1:100
    #[arg(long)]
    pub dist: Option<String>,
    /// Number of vertices
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of blocks
    #[arg(long)]
    pub b: Option<usize>,
    /// Fraction of stubs matched within paired blocks
    #[arg(long)]
    pub q: Option<f64>,
    /// assortative or disassortative
    #[arg(long)]
    pub mode: Option<Mixing>,
    /// Explicit 1-based block permutation such as 2,1; overrides --mode
    #[arg(long)]
    pub h: Option<PermutationH>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo replications (a multiple of 5)
    #[arg(long)]
    pub replications: Option<usize>,
}

impl ModelArgs {
    /// File settings overlaid with the flags.
    pub fn merged(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(d) = &self.dist {
            c.distribution = Some(DistributionField::Compact(d.clone()));
        }
        c.n = self.n.or(c.n);
        c.b = self.b.or(c.b);
        c.q = self.q.or(c.q);
        c.mode = self.mode.or(c.mode);
        if let Some(h) = &self.h {
            c.h = Some(h.one_based());
        }
        c.seed = self.seed.or(c.seed);
        c.replications = self.replications.or(c.replications);
        Ok(c)
    }
}

/// Distribution, partition and block pairing of one experiment.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub spec: DistributionSpec,
    pub pmf: DegreePmf,
    pub partition: BlockPartition,
    pub h: PermutationH,
    /// `assortative`, `disassortative`, or `h=<perm>` for explicit pairings.
    pub label: String,
}

impl ExperimentConfig {
    pub fn resolve_model(&self) -> Result<ResolvedModel> {
        let spec = self
            .distribution
            .as_ref()
            .ok_or_else(|| anyhow!("no degree distribution given (use --dist or a config file)"))?
            .spec()?;
        let pmf = spec.to_pmf()?;
        let b = self.b.unwrap_or(1);
        let partition = partition_blocks(&pmf, b)?;
        let (h, label) = match &self.h {
            Some(one_based) => {
                let h = PermutationH::from_one_based(one_based)?;
                if h.b() != b {
                    bail!("permutation {h} has {} blocks, expected {b}", h.b());
                }
                let label = format!("h={h}");
                (h, label)
            }
            None => {
                let mode = self.mode.unwrap_or(Mixing::Assortative);
                (choose_permutation(&compute_u(&partition), mode), mode.to_string())
            }
        };
        Ok(ResolvedModel {
            spec,
            pmf,
            partition,
            h,
            label,
        })
    }

    pub fn q_or_default(&self) -> Result<f64> {
        let q = self.q.unwrap_or(0.0);
        check_q(q)?;
        Ok(q)
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

pub fn check_q(q: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        bail!("q must lie in [0, 1), got {q}");
    }
    Ok(())
}

pub fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&phi) {
        bail!("phi must lie in [0, 1], got {phi}");
    }
    Ok(())
}
