use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::DegreePmf;
use crate::error::{Error, Result};

/// Stub mass moved from one degree to the next so that a block boundary
/// falls exactly on a degree boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassShift {
    pub from: usize,
    pub to: usize,
    /// Amount of `k p_k` moved (not normalized by the mean).
    pub stub_mass: f64,
}

/// Contiguous split of the degrees into `b` blocks of equal stub mass.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    ranges: Vec<RangeInclusive<usize>>,
    shifts: Vec<MassShift>,
    adjusted: DegreePmf,
}

impl BlockPartition {
    pub fn b(&self) -> usize {
        self.ranges.len()
    }

    /// Inclusive degree range of each block, ascending.
    pub fn blocks(&self) -> &[RangeInclusive<usize>] {
        &self.ranges
    }

    pub fn shifts(&self) -> &[MassShift] {
        &self.shifts
    }

    /// The pmf after mass shifts. All other computations use this one.
    pub fn adjusted_pmf(&self) -> &DegreePmf {
        &self.adjusted
    }

    /// Block (0-based) holding degree `k`. Degrees past the support fall
    /// in the last block.
    pub fn block_of(&self, k: usize) -> usize {
        self.ranges
            .iter()
            .position(|r| k <= *r.end())
            .unwrap_or(self.ranges.len() - 1)
    }

    /// `sum_{k in H_i} k p'_k`.
    pub fn stub_mass(&self, block: usize) -> f64 {
        self.ranges[block]
            .clone()
            .map(|k| k as f64 * self.adjusted.prob(k))
            .sum()
    }

    /// `sum_{k in H_i} p'_k`.
    pub fn prob_mass(&self, block: usize) -> f64 {
        self.ranges[block]
            .clone()
            .map(|k| self.adjusted.prob(k))
            .sum()
    }

    /// Report with 1-based block numbers, for JSON output.
    pub fn report(&self) -> PartitionReport {
        let u = compute_u(self);
        let blocks = (0..self.b())
            .map(|i| BlockReport {
                block: i + 1,
                degrees: [*self.ranges[i].start(), *self.ranges[i].end()],
                stub_mass: self.stub_mass(i),
                prob_mass: self.prob_mass(i),
                u: u[i],
            })
            .collect();
        let adjusted_masses = self
            .adjusted
            .masses()
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (k, *p))
            .collect();
        PartitionReport {
            b: self.b(),
            mean_degree: self.adjusted.mean(),
            blocks,
            shifts: self.shifts.clone(),
            adjusted_masses,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub b: usize,
    pub mean_degree: f64,
    pub blocks: Vec<BlockReport>,
    pub shifts: Vec<MassShift>,
    pub adjusted_masses: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub block: usize,
    pub degrees: [usize; 2],
    pub stub_mass: f64,
    pub prob_mass: f64,
    pub u: f64,
}

/// Splits the degrees of `pmf` into `b` contiguous blocks of stub mass
/// `E(Z)/b` each.
///
/// Bookkeeping happens on `q_k = k p_k`. When the running stub mass
/// overshoots a block boundary at degree `k`, the excess is moved to
/// `k + 1`. That lowers the total probability by `d/k - d/(k+1)`, which
/// is added to `p_0`: degree-0 vertices carry no stubs, so the mean and
/// every stub-level quantity stay unchanged.
pub fn partition_blocks(pmf: &DegreePmf, b: usize) -> Result<BlockPartition> {
    if b == 0 {
        return Err(Error::InvalidParameter("block count must be >= 1".into()));
    }
    let mean = pmf.mean();
    if mean <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let support = pmf.support().filter(|(k, _)| *k > 0).count();
    if b > support {
        return Err(Error::TooManyBlocks { blocks: b, support });
    }

    let mut stub: Vec<f64> = pmf
        .masses()
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p)
        .collect();
    let target = mean / b as f64;
    let tol = 1e-13 * mean;

    let mut ranges = Vec::with_capacity(b);
    let mut shifts = Vec::new();
    let mut start = 0;
    let mut cum = 0.0;
    let mut k = 0;
    while ranges.len() + 1 < b {
        if k >= stub.len() {
            return Err(Error::EmptyBlock {
                block: ranges.len() + 1,
            });
        }
        cum += stub[k];
        let bound = (ranges.len() + 1) as f64 * target;
        if cum > bound - tol {
            let excess = cum - bound;
            if excess > tol {
                if k + 1 == stub.len() {
                    stub.push(0.0);
                }
                stub[k] -= excess;
                stub[k + 1] += excess;
                shifts.push(MassShift {
                    from: k,
                    to: k + 1,
                    stub_mass: excess,
                });
            }
            cum = bound;
            ranges.push(start..=k);
            start = k + 1;
        }
        k += 1;
    }
    let last = stub.len().saturating_sub(1).max(start);
    if stub.len() <= last {
        stub.resize(last + 1, 0.0);
    }
    ranges.push(start..=last);

    let mut masses = vec![0.0; stub.len()];
    masses[0] = pmf.prob(0);
    for (k, q) in stub.iter().enumerate().skip(1) {
        masses[k] = (q / k as f64).max(0.0);
    }
    for s in &shifts {
        masses[0] += s.stub_mass / s.from as f64 - s.stub_mass / s.to as f64;
    }

    let partition = BlockPartition {
        ranges,
        shifts,
        adjusted: DegreePmf::from_raw(masses, pmf.family().clone()),
    };
    for i in 0..b {
        if partition.stub_mass(i) <= tol {
            return Err(Error::EmptyBlock { block: i + 1 });
        }
    }
    Ok(partition)
}

/// `u_i = sum_{x in H_i} x^2 p'_x` for each block.
pub fn compute_u(partition: &BlockPartition) -> Vec<f64> {
    let pmf = partition.adjusted_pmf();
    partition
        .blocks()
        .iter()
        .map(|r| r.clone().map(|k| (k * k) as f64 * pmf.prob(k)).sum())
        .collect()
}
