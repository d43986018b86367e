//! Degree distributions, their size-biased (stub-mass) counterpart, the
//! equal-stub-mass block partition and proportional degree sequences.

mod partition;
mod permutation;
mod sequence;
mod spec;

pub use partition::{compute_u, partition_blocks, BlockPartition, BlockReport, MassShift, PartitionReport};
pub use permutation::PermutationH;
pub use sequence::{sample_degree_sequence, DegreeSequence, Repair};
pub use spec::DistributionSpec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Infinite-support families are cut at the smallest degree `K` whose tail
/// stub mass `sum_{k > K} k p_k` falls below this fraction of the mean.
pub const TAIL_STUB_MASS: f64 = 1e-9;

/// Where a distribution came from. Carried for reporting only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Explicit,
    /// `p_k = (1 - p) p^k`, `k >= 0`.
    Geometric { p: f64 },
    /// `p_k` proportional to `k^-exponent` on `kmin..=kmax`.
    Powerlaw { exponent: f64, kmin: u32, kmax: u32 },
    Uniform { lo: u32, hi: u32 },
    Poisson { mean: f64 },
}

/// Probability masses over degrees `0..=truncation_degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreePmf {
    masses: Vec<f64>,
    family: Family,
}

impl DegreePmf {
    /// Builds a pmf from masses indexed by degree, renormalizing them.
    pub fn explicit(masses: Vec<f64>) -> Result<Self> {
        Self::normalized(masses, Family::Explicit)
    }

    /// Builds a pmf from `(degree, mass)` pairs. Repeated degrees add up.
    pub fn from_pairs<I: IntoIterator<Item = (u32, f64)>>(pairs: I) -> Result<Self> {
        let mut masses = Vec::new();
        for (k, p) in pairs {
            let k = k as usize;
            if masses.len() <= k {
                masses.resize(k + 1, 0.0);
            }
            masses[k] += p;
        }
        Self::explicit(masses)
    }

    pub fn point_mass(k: u32) -> Self {
        let mut masses = vec![0.0; k as usize + 1];
        masses[k as usize] = 1.0;
        DegreePmf {
            masses,
            family: Family::Explicit,
        }
    }

    pub fn uniform(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidDistribution(format!(
                "uniform bounds out of order: {lo} > {hi}"
            )));
        }
        let width = (hi - lo + 1) as f64;
        let mut masses = vec![0.0; hi as usize + 1];
        for m in &mut masses[lo as usize..] {
            *m = 1.0 / width;
        }
        Self::normalized(masses, Family::Uniform { lo, hi })
    }

    /// Geometric `p_k = (1 - p) p^k`, truncated where the tail stub mass
    /// drops below [`TAIL_STUB_MASS`]; the discarded probability is put
    /// on the truncation degree.
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "geometric ratio must lie in (0, 1), got {p}"
            )));
        }
        let mean = p / (1.0 - p);
        let masses = truncate_tail(mean, |k| (1.0 - p) * p.powi(k as i32));
        Self::normalized(masses, Family::Geometric { p })
    }

    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "poisson mean must be positive, got {mean}"
            )));
        }
        let log_mean = mean.ln();
        let masses = truncate_tail(mean, |k| {
            let k = k as f64;
            (k * log_mean - mean - statrs::function::gamma::ln_gamma(k + 1.0)).exp()
        });
        Self::normalized(masses, Family::Poisson { mean })
    }

    /// Truncated power law `p_k ~ k^-exponent` on `kmin..=kmax`. The sign
    /// of `exponent` is ignored, so `-2` and `2` both mean `k^-2`.
    pub fn power_law(exponent: f64, kmin: u32, kmax: u32) -> Result<Self> {
        if kmin == 0 || kmin > kmax || !exponent.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "power law needs 1 <= kmin <= kmax and a finite exponent, got \
                 exponent {exponent}, kmin {kmin}, kmax {kmax}"
            )));
        }
        let exponent = exponent.abs();
        let mut masses = vec![0.0; kmax as usize + 1];
        for k in kmin..=kmax {
            masses[k as usize] = (k as f64).powf(-exponent);
        }
        Self::normalized(
            masses,
            Family::Powerlaw {
                exponent,
                kmin,
                kmax,
            },
        )
    }

    fn normalized(mut masses: Vec<f64>, family: Family) -> Result<Self> {
        if masses.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("masses sum to zero".into()));
        }
        for p in &mut masses {
            *p /= total;
        }
        while masses.len() > 1 && masses.last() == Some(&0.0) {
            masses.pop();
        }
        Ok(DegreePmf { masses, family })
    }

    /// Wraps already-normalized masses (used for adjusted partitions).
    pub(crate) fn from_raw(masses: Vec<f64>, family: Family) -> Self {
        DegreePmf { masses, family }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn truncation_degree(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.masses.get(k).copied().unwrap_or(0.0)
    }

    /// `(degree, mass)` for every degree with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (k, *p))
    }

    /// `E(Z^r)`.
    pub fn moment(&self, r: i32) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64).powi(r) * p)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }
}

fn truncate_tail(mean: f64, mass: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut masses = Vec::new();
    let mut stub = 0.0;
    let mut prob = 0.0;
    for k in 0.. {
        let p = mass(k);
        masses.push(p);
        stub += k as f64 * p;
        prob += p;
        // past the mode, once the remaining stub mass is negligible
        if k as f64 > mean && mean - stub < TAIL_STUB_MASS * mean {
            break;
        }
    }
    if let Some(last) = masses.last_mut() {
        *last += (1.0 - prob).max(0.0);
    }
    masses
}

/// Size-biased degree law `k p_k / E(Z)`: the degree of the vertex at the
/// end of a uniformly chosen stub.
#[derive(Debug, Clone, PartialEq)]
pub struct StubMassPmf {
    masses: Vec<f64>,
}

impl StubMassPmf {
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.masses.get(k).copied().unwrap_or(0.0)
    }
}

pub fn size_biased(pmf: &DegreePmf) -> Result<StubMassPmf> {
    let mean = pmf.mean();
    if mean <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let masses = pmf
        .masses()
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p / mean)
        .collect();
    Ok(StubMassPmf { masses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn size_biased_uniform() {
        let pmf = DegreePmf::uniform(1, 3).unwrap();
        let sb = size_biased(&pmf).unwrap();
        assert_abs_diff_eq!(sb.prob(1), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sb.prob(2), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sb.prob(3), 0.5, epsilon = 1e-15);
        assert_eq!(sb.prob(0), 0.0);
    }

    #[test]
    fn size_biased_point_mass() {
        let sb = size_biased(&DegreePmf::point_mass(5)).unwrap();
        assert_eq!(sb.prob(5), 1.0);
        assert_eq!(sb.masses().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn size_biased_geometric() {
        let pmf = DegreePmf::geometric(2.0 / 3.0).unwrap();
        assert_abs_diff_eq!(pmf.mean(), 2.0, epsilon = 1e-8);
        let sb = size_biased(&pmf).unwrap();
        assert_abs_diff_eq!(sb.prob(1), 1.0 / 9.0, epsilon = 1e-8);
        assert_abs_diff_eq!(sb.masses().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_mean_is_degenerate() {
        let pmf = DegreePmf::point_mass(0);
        assert_eq!(size_biased(&pmf), Err(Error::DegenerateDistribution));
    }

    #[test]
    fn families_sum_to_one() {
        let all = [
            DegreePmf::geometric(0.9).unwrap(),
            DegreePmf::poisson(10.0).unwrap(),
            DegreePmf::poisson(400.0).unwrap(),
            DegreePmf::power_law(-2.0, 1, 100).unwrap(),
            DegreePmf::uniform(1, 25).unwrap(),
            DegreePmf::from_pairs([(1, 2.0), (4, 6.0)]).unwrap(),
        ];
        for pmf in &all {
            let total: f64 = pmf.masses().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{:?}", pmf.family());
            assert!(pmf.masses().iter().all(|p| *p >= 0.0));
        }
        assert_abs_diff_eq!(all[1].mean(), 10.0, epsilon = 1e-7);
        assert_abs_diff_eq!(all[5].prob(4), 0.75);
    }

    #[test]
    fn geometric_tail_is_negligible() {
        let pmf = DegreePmf::geometric(2.0 / 3.0).unwrap();
        let k = pmf.truncation_degree();
        assert!(k > 40 && k < 80, "truncated at {k}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DegreePmf::geometric(1.0).is_err());
        assert!(DegreePmf::uniform(3, 1).is_err());
        assert!(DegreePmf::power_law(2.0, 0, 10).is_err());
        assert!(DegreePmf::explicit(vec![0.5, -0.1]).is_err());
        assert!(DegreePmf::explicit(vec![0.0, 0.0]).is_err());
    }
}
