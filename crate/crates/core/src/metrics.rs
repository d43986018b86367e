//! Joint degree law of edge endpoints and the Pearson degree correlation.
//!
//! Empirical statistics take every edge in both orientations (`2m`
//! samples), so `X` and `Y` are exchangeable. A self-loop contributes
//! `(d, d)` twice; parallel edges count once each.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::degree_model::{compute_u, BlockPartition, PermutationH};
use crate::error::{Error, Result};
use crate::generator::GeneratedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mixing {
    Assortative,
    Disassortative,
}

impl fmt::Display for Mixing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mixing::Assortative => "assortative",
            Mixing::Disassortative => "disassortative",
        })
    }
}

impl FromStr for Mixing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "assortative" | "assort" => Ok(Mixing::Assortative),
            "disassortative" | "disassort" => Ok(Mixing::Disassortative),
            _ => Err(Error::InvalidParameter(format!("unknown mixing mode {s:?}"))),
        }
    }
}

/// Whether the conditional law is evaluated at finite `n` (with the `-1`
/// corrections for the stub being matched) or in the large-graph limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PmfMode {
    Finite(usize),
    Limit,
}

/// `P(X = x | Y = y)` where `Y` is the degree at a uniformly chosen stub
/// and `X` the degree at the stub it gets matched to.
pub fn conditional_pmf(
    partition: &BlockPartition,
    h: &PermutationH,
    q: f64,
    x: usize,
    y: usize,
    mode: PmfMode,
) -> f64 {
    let pmf = partition.adjusted_pmf();
    let mean = pmf.mean();
    let b = partition.b() as f64;
    let px = pmf.prob(x);
    let i = partition.block_of(x);
    let paired = partition.block_of(y) == h.apply(i);
    match mode {
        PmfMode::Limit => {
            let weight = if paired { q * b + 1.0 - q } else { 1.0 - q };
            weight * x as f64 * px / mean
        }
        PmfMode::Finite(n) => {
            let n = n as f64;
            let stubs = n * mean;
            let nx = n * x as f64 * px;
            let type2 = (1.0 - q).powi(2) * nx / (stubs * (1.0 - q) - 1.0);
            if paired && q > 0.0 {
                let delta = if h.apply(i) == i { 1.0 } else { 0.0 };
                q * q * nx / (stubs * q / b - delta) + type2
            } else {
                type2
            }
        }
    }
}

/// Probabilities over ordered degree pairs `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDegreePmf {
    pub entries: BTreeMap<(u32, u32), f64>,
    /// `C_ij` for analytic pmfs; `None` for empirical ones.
    pub block_coupling: Option<DMatrix<f64>>,
}

impl JointDegreePmf {
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.entries.get(&(x, y)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn marginal_x(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (&(x, _), p) in &self.entries {
            *out.entry(x).or_insert(0.0) += p;
        }
        out
    }

    pub fn marginal_y(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (&(_, y), p) in &self.entries {
            *out.entry(y).or_insert(0.0) += p;
        }
        out
    }

    pub fn total_variation(&self, other: &JointDegreePmf) -> f64 {
        let mut keys: Vec<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|&(x, y)| (self.get(x, y) - other.get(x, y)).abs())
            .sum::<f64>()
    }
}

/// Block coupling `C_ij`: `bq + 1 - q` when `j = h(i)`, else `1 - q`.
pub fn block_coupling(h: &PermutationH, q: f64) -> DMatrix<f64> {
    let b = h.b();
    DMatrix::from_fn(b, b, |i, j| {
        if h.apply(i) == j {
            b as f64 * q + 1.0 - q
        } else {
            1.0 - q
        }
    })
}

/// `P(X = x, Y = y) = C_ij x y p_x p_y / E(Z)^2` for `x in H_i`, `y in H_j`.
pub fn joint_pmf(partition: &BlockPartition, h: &PermutationH, q: f64) -> JointDegreePmf {
    let pmf = partition.adjusted_pmf();
    let mean = pmf.mean();
    let coupling = block_coupling(h, q);
    let support: Vec<(usize, f64)> = pmf.support().filter(|(k, _)| *k > 0).collect();
    let mut entries = BTreeMap::new();
    for &(x, px) in &support {
        let i = partition.block_of(x);
        for &(y, py) in &support {
            let j = partition.block_of(y);
            let p = coupling[(i, j)] * (x * y) as f64 * px * py / (mean * mean);
            entries.insert((x as u32, y as u32), p);
        }
    }
    JointDegreePmf {
        entries,
        block_coupling: Some(coupling),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub rho: f64,
    /// Slope of `rho` in `q` (analytic only).
    pub c: Option<f64>,
    pub covariance: f64,
    /// `sigma_X = sigma_Y`.
    pub sigma: f64,
    pub source: Source,
    pub ci_halfwidth: Option<f64>,
}

/// `rho = c q` with
/// `cov = q (b sum_i u_i u_h(i) - (sum_i u_i)^2) / E(Z)^2`.
///
/// `c` is computed from the bracket directly, so it is defined at `q = 0`.
pub fn analytic_rho(
    partition: &BlockPartition,
    h: &PermutationH,
    q: f64,
) -> Result<CorrelationReport> {
    let pmf = partition.adjusted_pmf();
    let mean = pmf.mean();
    let u = compute_u(partition);
    let b = partition.b() as f64;
    let total: f64 = u.iter().sum();
    let paired: f64 = u.iter().enumerate().map(|(i, ui)| ui * u[h.apply(i)]).sum();
    let bracket = b * paired - total * total;

    let first = total / mean;
    let variance = pmf.moment(3) / mean - first * first;
    if variance <= 1e-14 * first * first {
        return Err(Error::DegenerateDegrees);
    }
    let c = bracket / (variance * mean * mean);
    Ok(CorrelationReport {
        rho: c * q,
        c: Some(c),
        covariance: q * bracket / (mean * mean),
        sigma: variance.sqrt(),
        source: Source::Analytic,
        ci_halfwidth: None,
    })
}

/// Corollary-style choice of `h` from the block second moments `u`: sort
/// blocks by `u` descending; assortative pairs each block with itself,
/// disassortative pairs the `i`-th largest with the `i`-th smallest.
pub fn choose_permutation(u: &[f64], mode: Mixing) -> PermutationH {
    let b = u.len();
    match mode {
        Mixing::Assortative => PermutationH::identity(b),
        Mixing::Disassortative => {
            let mut order: Vec<usize> = (0..b).collect();
            order.sort_by(|&a, &c| u[c].total_cmp(&u[a]).then(a.cmp(&c)));
            let mut mapping = vec![0; b];
            for i in 0..b {
                mapping[order[i]] = order[b - 1 - i];
            }
            PermutationH::new(mapping).expect("pairing sorted blocks is a bijection")
        }
    }
}

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge. `Ok(None)` when the endpoint degrees have zero variance.
pub fn empirical_pearson(graph: &GeneratedGraph) -> Result<Option<CorrelationReport>> {
    if graph.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let deg = |v: u32| graph.degrees[v as usize] as f64;
    let samples = 2.0 * graph.edges.len() as f64;
    let mean = graph.edges.iter().map(|e| deg(e.u) + deg(e.v)).sum::<f64>() / samples;
    let mut var = 0.0;
    let mut cov = 0.0;
    for e in &graph.edges {
        let (a, c) = (deg(e.u) - mean, deg(e.v) - mean);
        var += a * a + c * c;
        cov += 2.0 * a * c;
    }
    var /= samples;
    cov /= samples;
    if var <= 1e-12 * mean * mean {
        return Ok(None);
    }
    Ok(Some(CorrelationReport {
        rho: cov / var,
        c: None,
        covariance: cov,
        sigma: var.sqrt(),
        source: Source::Empirical,
        ci_halfwidth: None,
    }))
}

/// Normalized counts of ordered endpoint degree pairs.
pub fn empirical_joint(graph: &GeneratedGraph) -> Result<JointDegreePmf> {
    if graph.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for e in &graph.edges {
        let (du, dv) = (graph.degrees[e.u as usize], graph.degrees[e.v as usize]);
        *counts.entry((du, dv)).or_insert(0) += 1;
        *counts.entry((dv, du)).or_insert(0) += 1;
    }
    let total = 2.0 * graph.edges.len() as f64;
    Ok(JointDegreePmf {
        entries: counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / total))
            .collect(),
        block_coupling: None,
    })
}
