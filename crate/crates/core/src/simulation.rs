//! Monte Carlo node percolation with batch means.
//!
//! A replication builds a fresh graph, keeps every vertex independently
//! with probability `phi` and measures the largest surviving component as
//! a fraction of the original vertex count. Replications are grouped into
//! equal batches; the point estimate is the mean of the batch means and
//! the interval is Student-t on the batch means.
//!
//! Replication `r` draws from stream `r` of a ChaCha8 generator seeded
//! with the master seed, so results do not depend on thread scheduling.

use std::io::Write;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::degree_model::{DegreePmf, PermutationH};
use crate::error::{Error, Result};
use crate::generator::{GeneratedGraph, PreparedModel};
use crate::metrics::empirical_pearson;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatchProtocol {
    pub replications: usize,
    pub batches: usize,
    /// Two-sided confidence level of the interval.
    pub confidence: f64,
}

impl Default for BatchProtocol {
    fn default() -> Self {
        BatchProtocol {
            replications: 100,
            batches: 5,
            confidence: 0.90,
        }
    }
}

impl BatchProtocol {
    fn validate(&self) -> Result<()> {
        if self.batches < 2 || self.replications == 0 || !self.replications.is_multiple_of(self.batches) {
            return Err(Error::InvalidParameter(format!(
                "{} replications cannot form {} equal batches of at least one",
                self.replications, self.batches
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchResult {
    pub point_estimate: f64,
    pub batch_means: Vec<f64>,
    /// Half-width of the interval at the protocol's confidence level
    /// (90% by default).
    pub ci90_halfwidth: f64,
    pub replications: usize,
    pub batches: usize,
}

impl BatchResult {
    /// Batch means of `samples` taken in order.
    pub fn from_samples(samples: &[f64], protocol: BatchProtocol) -> Result<Self> {
        protocol.validate()?;
        if samples.len() != protocol.replications {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                protocol.replications,
                samples.len()
            )));
        }
        let size = protocol.replications / protocol.batches;
        let batch_means: Vec<f64> = samples
            .chunks(size)
            .map(|c| c.iter().sum::<f64>() / size as f64)
            .collect();
        let k = batch_means.len() as f64;
        let point_estimate = batch_means.iter().sum::<f64>() / k;
        let var = batch_means
            .iter()
            .map(|m| (m - point_estimate).powi(2))
            .sum::<f64>()
            / (k - 1.0);
        let t = StudentsT::new(0.0, 1.0, k - 1.0)
            .expect("at least one degree of freedom")
            .inverse_cdf(0.5 + protocol.confidence / 2.0);
        Ok(BatchResult {
            point_estimate,
            batch_means,
            ci90_halfwidth: t * (var / k).sqrt(),
            replications: protocol.replications,
            batches: protocol.batches,
        })
    }

    pub fn ci_low(&self) -> f64 {
        self.point_estimate - self.ci90_halfwidth
    }

    pub fn ci_high(&self) -> f64 {
        self.point_estimate + self.ci90_halfwidth
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low() <= x && x <= self.ci_high()
    }
}

/// Runs `replicate(rng, index)` for every replication in parallel and
/// batches the results.
pub fn run_batches<F>(seed: u64, protocol: BatchProtocol, replicate: F) -> Result<BatchResult>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<f64> + Sync,
{
    protocol.validate()?;
    let samples = (0..protocol.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r);
            replicate(&mut rng, r)
        })
        .collect::<Result<Vec<f64>>>()?;
    BatchResult::from_samples(&samples, protocol)
}

pub fn replication_rng(seed: u64, replication: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication as u64);
    rng
}

/// Vertices that survived node removal and the edges between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PercolatedGraph {
    /// Vertex count before removal.
    pub n: usize,
    pub alive: Vec<bool>,
    pub edges: Vec<(u32, u32)>,
}

impl PercolatedGraph {
    pub fn survivors(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }
}

pub fn node_percolate<R: Rng + ?Sized>(graph: &GeneratedGraph, phi: f64, rng: &mut R) -> PercolatedGraph {
    let alive: Vec<bool> = if phi >= 1.0 {
        vec![true; graph.n]
    } else {
        (0..graph.n).map(|_| rng.random::<f64>() < phi).collect()
    };
    let edges = graph
        .edges
        .iter()
        .filter(|e| alive[e.u as usize] && alive[e.v as usize])
        .map(|e| (e.u, e.v))
        .collect();
    PercolatedGraph {
        n: graph.n,
        alive,
        edges,
    }
}

/// Largest surviving component over the original `n`. Self-loops add
/// nothing; `0.0` when `n = 0`.
pub fn giant_size(graph: &PercolatedGraph) -> f64 {
    if graph.n == 0 {
        return 0.0;
    }
    let mut uf = UnionFind::<u32>::new(graph.n);
    for &(u, v) in &graph.edges {
        if u != v {
            uf.union(u, v);
        }
    }
    let mut sizes = vec![0usize; graph.n];
    for v in (0..graph.n).filter(|&v| graph.alive[v]) {
        sizes[uf.find_mut(v as u32) as usize] += 1;
    }
    *sizes.iter().max().unwrap_or(&0) as f64 / graph.n as f64
}

/// Everything needed to draw graphs for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub pmf: DegreePmf,
    pub n: usize,
    pub b: usize,
    pub q: f64,
    pub h: PermutationH,
    pub seed: u64,
    /// Free-form label echoed in CSV output.
    pub mode: String,
}

impl SimulationConfig {
    /// Labels identity `h` as assortative and anything else as
    /// disassortative.
    pub fn new(pmf: DegreePmf, n: usize, b: usize, q: f64, h: PermutationH, seed: u64) -> Self {
        let mode = if h.is_identity() {
            "assortative"
        } else {
            "disassortative"
        };
        SimulationConfig {
            pmf,
            n,
            b,
            q,
            h,
            seed,
            mode: mode.to_string(),
        }
    }

    pub fn prepare(&self) -> Result<PreparedModel> {
        PreparedModel::new(&self.pmf, self.n, self.b, self.q, self.h.clone())
    }
}

/// Giant-component fraction after node removal at `phi`.
pub fn batch_experiment(config: &SimulationConfig, phi: f64, protocol: BatchProtocol) -> Result<BatchResult> {
    percolation_batches(&config.prepare()?, config.seed, phi, protocol)
}

pub fn percolation_batches(
    model: &PreparedModel,
    seed: u64,
    phi: f64,
    protocol: BatchProtocol,
) -> Result<BatchResult> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!("phi must lie in [0, 1], got {phi}")));
    }
    run_batches(seed, protocol, |rng, _| {
        let graph = model.sample(rng)?;
        Ok(giant_size(&node_percolate(&graph, phi, rng)))
    })
}

/// Empirical Pearson degree correlation of freshly generated graphs.
pub fn rho_experiment(config: &SimulationConfig, protocol: BatchProtocol) -> Result<BatchResult> {
    let model = config.prepare()?;
    run_batches(config.seed, protocol, |rng, _| {
        let graph = model.sample(rng)?;
        empirical_pearson(&graph)?
            .map(|r| r.rho)
            .ok_or(Error::DegenerateDegrees)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub phi: f64,
    pub q: f64,
    pub b: usize,
    pub mode: String,
    pub eta_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub seed: u64,
}

/// One batch experiment per `phi`, all with the same seed.
pub fn sweep(config: &SimulationConfig, phis: &[f64], protocol: BatchProtocol) -> Result<Vec<SweepRow>> {
    if phis.is_empty() {
        return Err(Error::InvalidParameter("empty phi grid".into()));
    }
    let model = config.prepare()?;
    phis.iter()
        .map(|&phi| {
            let r = percolation_batches(&model, config.seed, phi, protocol)?;
            Ok(SweepRow {
                phi,
                q: config.q,
                b: config.b,
                mode: config.mode.clone(),
                eta_hat: r.point_estimate,
                ci_low: r.ci_low(),
                ci_high: r.ci_high(),
                n: model.sequence.n(),
                seed: config.seed,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}
