//! Node percolation on the block model.
//!
//! `alpha_i` is the probability that an edge whose near end is a block-`i`
//! stub does not lead to the giant component. It solves `alpha = f(alpha)`
//! with
//!
//! ```text
//! f_i(a) = 1 - phi + phi * ((bq + 1 - q) g_h(i)(a_h(i)) + (1 - q) sum_{j != h(i)} g_j(a_j))
//! g_i(x) = sum_{k in H_i} k p_k x^(k-1) / E(Z)
//! ```
//!
//! `f` is monotone on `[0,1]^b` and fixes the all-ones vector; iterating
//! from zero reaches the least fixed point. The threshold is
//! `phi* = 1 / lambda_1` where `lambda_1` is the Perron root of
//! `(bqH + (1-q) 1) diag(g'(1))`.

mod eigen;

pub use eigen::{dominant_eig, min_modulus, spectral_radius};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::degree_model::{BlockPartition, PermutationH};
use crate::error::{Error, Result};
use eigen::perron_root;

/// Distance from the all-ones vector below which a fixed point counts as
/// "no giant component".
pub const INTERIOR_GAP: f64 = 1e-6;
/// Spectral radius this close to 1 marks a fixed point as marginal.
pub const MARGINAL_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
struct BlockGen {
    lo: usize,
    /// `p'_k` for `k = lo, lo+1, ...`.
    probs: Vec<f64>,
}

/// Per-block excess-degree generating functions `g_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenFunctions {
    mean: f64,
    blocks: Vec<BlockGen>,
}

impl GenFunctions {
    pub fn from_partition(partition: &BlockPartition) -> Self {
        let pmf = partition.adjusted_pmf();
        let blocks = partition
            .blocks()
            .iter()
            .map(|r| BlockGen {
                lo: *r.start(),
                probs: r.clone().map(|k| pmf.prob(k)).collect(),
            })
            .collect();
        GenFunctions {
            mean: pmf.mean(),
            blocks,
        }
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Nonzero `(power, coefficient)` pairs of `g_i`: `k p_k / E(Z)` on `x^(k-1)`.
    pub fn coefficients(&self, i: usize) -> Vec<(usize, f64)> {
        let block = &self.blocks[i];
        block
            .probs
            .iter()
            .enumerate()
            .map(|(j, p)| (block.lo + j, p))
            .filter(|(k, p)| *k > 0 && **p > 0.0)
            .map(|(k, p)| (k - 1, k as f64 * p / self.mean))
            .collect()
    }

    fn terms(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let block = &self.blocks[i];
        block.probs.iter().enumerate().map(move |(j, p)| (block.lo + j, *p))
    }

    pub fn value(&self, i: usize, x: f64) -> f64 {
        let mut sum = 0.0;
        for (k, p) in self.terms(i).filter(|(k, _)| *k > 0) {
            sum += k as f64 * p * x.powi(k as i32 - 1);
        }
        sum / self.mean
    }

    pub fn derivative(&self, i: usize, x: f64) -> f64 {
        let mut sum = 0.0;
        for (k, p) in self.terms(i).filter(|(k, _)| *k > 1) {
            sum += (k * (k - 1)) as f64 * p * x.powi(k as i32 - 2);
        }
        sum / self.mean
    }

    /// `sum_{k in H_i} p_k`.
    pub fn block_prob(&self, i: usize) -> f64 {
        self.blocks[i].probs.iter().sum()
    }

    /// `eta_i = phi sum_{k in H_i} p_k (1 - alpha_i^k)`.
    fn block_giant(&self, i: usize, phi: f64, alpha: f64) -> f64 {
        phi * self
            .terms(i)
            .map(|(k, p)| p * (1.0 - alpha.powi(k as i32)))
            .sum::<f64>()
    }
}

pub fn build_gen_functions(partition: &BlockPartition) -> GenFunctions {
    GenFunctions::from_partition(partition)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    AttractingOne,
    InteriorAttracting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationSolution {
    pub alpha: Vec<f64>,
    pub phi: f64,
    /// `sum_i eta_i`.
    pub eta: f64,
    /// `sum_i eta_i * sum_{k in H_i} p_k`, kept for comparison.
    pub eta_alt_form: f64,
    pub kind: FixedPointKind,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub lambda1: f64,
    pub eigvec: Vec<f64>,
    pub phi_star: f64,
    pub phi_star_numeric: Option<f64>,
    pub agreement: Option<f64>,
    /// `false` when `lambda1 <= 1`: no giant component even at `phi = 1`.
    pub reachable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    Attracting,
    Repelling,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub kind: StabilityKind,
    pub spectral_radius: f64,
    pub min_modulus: f64,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiantFraction {
    pub eta: f64,
    pub eta_alt_form: f64,
    pub per_block: Vec<f64>,
}

/// Generating functions plus the mixing parameters `(q, h)`. `h` need not
/// be an involution here.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModel {
    g: GenFunctions,
    q: f64,
    h: PermutationH,
}

impl BlockModel {
    pub fn new(g: GenFunctions, q: f64, h: PermutationH) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!("q must lie in [0, 1), got {q}")));
        }
        if h.b() != g.b() {
            return Err(Error::InvalidPermutation(format!(
                "permutation has {} blocks, partition has {}",
                h.b(),
                g.b()
            )));
        }
        Ok(BlockModel { g, q, h })
    }

    pub fn from_partition(partition: &BlockPartition, q: f64, h: PermutationH) -> Result<Self> {
        Self::new(GenFunctions::from_partition(partition), q, h)
    }

    pub fn gen_functions(&self) -> &GenFunctions {
        &self.g
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn h(&self) -> &PermutationH {
        &self.h
    }

    pub fn b(&self) -> usize {
        self.g.b()
    }

    pub fn f_map(&self, alpha: &[f64], phi: f64) -> Vec<f64> {
        let b = self.b();
        let values: Vec<f64> = (0..b).map(|j| self.g.value(j, alpha[j])).collect();
        let total: f64 = values.iter().sum();
        let boost = b as f64 * self.q;
        (0..b)
            .map(|i| {
                let bracket = boost * values[self.h.apply(i)] + (1.0 - self.q) * total;
                (1.0 - phi + phi * bracket).clamp(0.0, 1.0)
            })
            .collect()
    }

    /// `J = phi (bqH + (1-q) 1) diag(g'(a))`.
    pub fn jacobian(&self, alpha: &[f64], phi: f64) -> DMatrix<f64> {
        let b = self.b();
        let slopes: Vec<f64> = (0..b).map(|j| self.g.derivative(j, alpha[j])).collect();
        DMatrix::from_fn(b, b, |i, j| {
            let pair = if self.h.apply(i) == j {
                b as f64 * self.q
            } else {
                0.0
            };
            phi * (pair + 1.0 - self.q) * slopes[j]
        })
    }

    /// Iterates `alpha <- f(alpha)` from the zero vector until the sup-norm
    /// residual drops to `opts.tol`.
    pub fn solve_fixed_point(&self, phi: f64, opts: SolveOptions) -> Result<PercolationSolution> {
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "phi must lie in [0, 1], got {phi}"
            )));
        }
        let mut alpha = vec![0.0; self.b()];
        for it in 1..=opts.max_iter {
            let next = self.f_map(&alpha, phi);
            debug_assert!(
                next.iter().zip(&alpha).all(|(n, a)| *n >= a - 1e-14),
                "iterates must not decrease"
            );
            let residual = sup_dist(&next, &alpha);
            alpha = next;
            if residual <= opts.tol {
                return Ok(self.solution(alpha, phi, it, residual));
            }
        }
        let residual = sup_dist(&self.f_map(&alpha, phi), &alpha);
        Err(Error::NoConvergence {
            iterations: opts.max_iter,
            residual,
            last: alpha,
        })
    }

    fn solution(&self, alpha: Vec<f64>, phi: f64, iterations: usize, residual: f64) -> PercolationSolution {
        let gap = alpha.iter().map(|a| 1.0 - a).fold(0.0, f64::max);
        let kind = if gap > INTERIOR_GAP {
            FixedPointKind::InteriorAttracting
        } else {
            FixedPointKind::AttractingOne
        };
        let (eta, eta_alt_form) = if kind == FixedPointKind::AttractingOne {
            (0.0, 0.0)
        } else {
            let per_block: Vec<f64> = (0..self.b())
                .map(|i| self.g.block_giant(i, phi, alpha[i]))
                .collect();
            (
                per_block.iter().sum(),
                per_block
                    .iter()
                    .enumerate()
                    .map(|(i, e)| e * self.g.block_prob(i))
                    .sum(),
            )
        };
        PercolationSolution {
            alpha,
            phi,
            eta,
            eta_alt_form,
            kind,
            iterations,
            residual,
        }
    }

    /// Linear stability of a fixed point from the eigenvalue moduli of the
    /// Jacobian there.
    pub fn classify_fixed_point(&self, alpha: &[f64], phi: f64) -> Stability {
        let j = self.jacobian(alpha, phi);
        let spectral_radius = spectral_radius(&j);
        let min_modulus = min_modulus(&j);
        let kind = if spectral_radius < 1.0 {
            StabilityKind::Attracting
        } else if min_modulus > 1.0 {
            StabilityKind::Repelling
        } else {
            StabilityKind::Saddle
        };
        Stability {
            kind,
            spectral_radius,
            min_modulus,
            marginal: (spectral_radius - 1.0).abs() < MARGINAL_BAND,
        }
    }

    /// Jacobian at the all-ones vector for `phi = 1`.
    pub fn threshold_matrix(&self) -> DMatrix<f64> {
        self.jacobian(&vec![1.0; self.b()], 1.0)
    }

    /// `phi* = 1 / lambda_1`.
    pub fn critical_phi(&self) -> Result<ThresholdReport> {
        let m = self.threshold_matrix();
        let (lambda1, v) = match dominant_eig(&m) {
            Ok(found) => found,
            Err(Error::NonPositiveMatrix) => perron_root(&m)?,
            Err(e) => return Err(e),
        };
        let phi_star = if lambda1 > 0.0 {
            1.0 / lambda1
        } else {
            f64::INFINITY
        };
        Ok(ThresholdReport {
            lambda1,
            eigvec: v.iter().copied().collect(),
            phi_star,
            phi_star_numeric: None,
            agreement: None,
            reachable: lambda1 > 1.0,
        })
    }

    /// Whether the least fixed point at `phi` is interior.
    ///
    /// The iterates increase towards the least fixed point, so once every
    /// component is within [`INTERIOR_GAP`] of 1 the answer is "no". If the
    /// budget runs out first (only within a few 1e-6 of the threshold, where
    /// convergence is critically slow), the last iterate decides.
    fn interior_exists(&self, phi: f64, opts: SolveOptions) -> bool {
        let mut alpha = vec![0.0; self.b()];
        for _ in 0..opts.max_iter {
            let next = self.f_map(&alpha, phi);
            let residual = sup_dist(&next, &alpha);
            alpha = next;
            let gap = alpha.iter().map(|a| 1.0 - a).fold(0.0, f64::max);
            if gap <= INTERIOR_GAP {
                return false;
            }
            if residual <= opts.tol {
                return true;
            }
        }
        true
    }

    /// Bisection on `phi` for the smallest value where the least fixed
    /// point is interior. `None` if there is none up to `phi = 1`.
    pub fn critical_phi_numeric(&self, width: f64) -> Option<f64> {
        let opts = SolveOptions::default();
        if !self.interior_exists(1.0, opts) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            if self.interior_exists(mid, opts) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Eigenvalue threshold together with the bisection estimate.
    pub fn threshold_report(&self, width: f64) -> Result<ThresholdReport> {
        let mut report = self.critical_phi()?;
        report.phi_star_numeric = self.critical_phi_numeric(width);
        report.agreement = report
            .phi_star_numeric
            .map(|numeric| (report.phi_star - numeric).abs());
        Ok(report)
    }
}

/// Giant-component probability from a solved `alpha`.
///
/// `eta_i = phi sum_{k in H_i} p_k (1 - alpha_i^k)` already carries the
/// block's probability mass, so `eta = sum_i eta_i`. `eta_alt_form`
/// weights each `eta_i` by the block mass once more.
pub fn giant_fraction(solution: &PercolationSolution, partition: &BlockPartition) -> GiantFraction {
    let pmf = partition.adjusted_pmf();
    let per_block: Vec<f64> = partition
        .blocks()
        .iter()
        .zip(&solution.alpha)
        .map(|(r, &a)| {
            solution.phi
                * r.clone()
                    .map(|k| pmf.prob(k) * (1.0 - a.powi(k as i32)))
                    .sum::<f64>()
        })
        .collect();
    let eta = per_block.iter().sum();
    let eta_alt_form = per_block
        .iter()
        .enumerate()
        .map(|(i, e)| e * partition.prob_mass(i))
        .sum();
    GiantFraction {
        eta,
        eta_alt_form,
        per_block,
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::{partition_blocks, DegreePmf};
    use approx::assert_abs_diff_eq;

    fn geometric(b: usize) -> BlockPartition {
        partition_blocks(&DegreePmf::geometric(2.0 / 3.0).unwrap(), b).unwrap()
    }

    fn model(b: usize, q: f64, h: PermutationH) -> BlockModel {
        BlockModel::from_partition(&geometric(b), q, h).unwrap()
    }

    /// With `beta = 1 - 2a/3` the fixed point solves
    /// `13.5 beta^3 - 13.5 beta^2 + 1 = (beta - 1/3)(13.5 beta^2 - 9 beta - 3) = 0`.
    /// `beta = 1/3` is `a = 1`; the positive quadratic root gives the giant component.
    fn cubic_alpha() -> f64 {
        let beta = (9.0 + 243f64.sqrt()) / 27.0;
        1.5 * (1.0 - beta)
    }

    #[test]
    fn gen_function_slopes() {
        let p = geometric(2);
        let g = GenFunctions::from_partition(&p);
        // direct sums over the untruncated geometric, corrected for the moved stub mass;
        // the tail cut costs a few 1e-9
        let raw = |k: usize| (1.0 / 3.0) * (2.0f64 / 3.0).powi(k as i32);
        let shift = p.shifts()[0].stub_mass;
        let head: f64 = (0..=4usize).map(|k| (k * k.saturating_sub(1)) as f64 * raw(k)).sum();
        let tail: f64 = (5..400).map(|k| (k * (k - 1)) as f64 * raw(k)).sum();
        let g1 = (head - 3.0 * shift) / 2.0;
        let g2 = (tail + 4.0 * shift) / 2.0;
        assert_abs_diff_eq!(g.derivative(0, 1.0), g1, epsilon = 1e-9);
        assert_abs_diff_eq!(g.derivative(1, 1.0), g2, epsilon = 1e-8);
        assert_abs_diff_eq!(g.derivative(0, 1.0), 0.72221, epsilon = 5e-5);
        assert_abs_diff_eq!(g.derivative(1, 1.0), 3.31690, epsilon = 5e-5);
        assert_abs_diff_eq!(g.value(0, 1.0), 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(g.value(1, 1.0), 0.5, epsilon = 1e-10);

        let p = partition_blocks(&DegreePmf::point_mass(2), 1).unwrap();
        let g = GenFunctions::from_partition(&p);
        assert_eq!(g.coefficients(0), vec![(1, 1.0)]);
        assert_abs_diff_eq!(g.value(0, 0.3), 0.3);
        assert_abs_diff_eq!(g.derivative(0, 1.0), 1.0);
    }

    #[test]
    fn slopes_telescope() {
        let pmf = DegreePmf::poisson(3.5).unwrap();
        for b in 1..=4 {
            let p = partition_blocks(&pmf, b).unwrap();
            let g = GenFunctions::from_partition(&p);
            let adj = p.adjusted_pmf();
            let expected = (adj.moment(2) - adj.mean()) / adj.mean();
            let total: f64 = (0..b).map(|i| g.derivative(i, 1.0)).sum();
            assert_abs_diff_eq!(total, expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn f_fixes_ones() {
        for h in [PermutationH::identity(3), PermutationH::reversal(3), PermutationH::rotation(3, 2)] {
            let m = model(3, 0.4, h);
            for phi in [0.0, 0.3, 1.0] {
                for x in m.f_map(&[1.0; 3], phi) {
                    assert_abs_diff_eq!(x, 1.0, epsilon = 1e-10);
                }
            }
            assert_eq!(m.f_map(&[0.2, 0.5, 0.9], 0.0), vec![1.0; 3]);
        }
    }

    #[test]
    fn f_closed_form_geometric() {
        let m = model(1, 0.0, PermutationH::identity(1));
        for a in [0.0, 0.25, 0.6] {
            let closed = (1.0 / 9.0) / (1.0 - 2.0 * a / 3.0f64).powi(2);
            assert_abs_diff_eq!(m.f_map(&[a], 1.0)[0], closed, epsilon = 1e-8);
        }
    }

    #[test]
    fn closed_form_giant_component() {
        let m = model(1, 0.0, PermutationH::identity(1));
        let s = m.solve_fixed_point(1.0, SolveOptions::default()).unwrap();
        assert_abs_diff_eq!(s.alpha[0], cubic_alpha(), epsilon = 1e-9);
        assert_abs_diff_eq!(s.alpha[0], 1.0 - 3f64.sqrt() / 2.0, epsilon = 1e-10);
        assert_eq!(s.kind, FixedPointKind::InteriorAttracting);
        // geometric series: sum p_k a^k = (1/3) / (1 - 2a/3)
        let eta = 1.0 - (1.0 / 3.0) / (1.0 - 2.0 * cubic_alpha() / 3.0);
        assert_abs_diff_eq!(s.eta, eta, epsilon = 1e-8);
        assert_abs_diff_eq!(s.eta, (3.0 - 3f64.sqrt()) / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.eta, s.eta_alt_form, epsilon = 1e-12);
        let gf = giant_fraction(&s, &geometric(1));
        assert_abs_diff_eq!(gf.eta, s.eta, epsilon = 1e-14);
    }

    #[test]
    fn subcritical_has_no_giant() {
        let m = model(2, 0.2, PermutationH::identity(2));
        let star = m.critical_phi().unwrap().phi_star;
        let s = m.solve_fixed_point(0.9 * star, SolveOptions::default()).unwrap();
        assert_eq!(s.kind, FixedPointKind::AttractingOne);
        assert_eq!(s.eta, 0.0);
        assert!(s.alpha.iter().all(|a| (a - 1.0).abs() < 1e-6));
        let stab = m.classify_fixed_point(&[1.0, 1.0], 0.9 * star);
        assert_eq!(stab.kind, StabilityKind::Attracting);
        let stab = m.classify_fixed_point(&[1.0, 1.0], 1.1 * star);
        assert_ne!(stab.kind, StabilityKind::Attracting);
    }

    #[test]
    fn reports_non_convergence() {
        let m = model(2, 0.5, PermutationH::identity(2));
        let opts = SolveOptions { tol: 1e-12, max_iter: 3 };
        match m.solve_fixed_point(1.0, opts) {
            Err(Error::NoConvergence { iterations, last, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(last.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(m.solve_fixed_point(1.5, opts).is_err());
    }

    #[test]
    fn jacobian_entries() {
        let m = model(2, 0.3, PermutationH::identity(2));
        let a = [0.4, 0.7];
        let j = m.jacobian(&a, 0.8);
        let g = m.gen_functions();
        assert_abs_diff_eq!(j[(0, 0)], 0.8 * (2.0 * 0.3 + 0.7) * g.derivative(0, 0.4), epsilon = 1e-14);
        assert_abs_diff_eq!(j[(0, 1)], 0.8 * 0.7 * g.derivative(1, 0.7), epsilon = 1e-14);

        let m = model(3, 0.0, PermutationH::identity(3));
        let j = m.jacobian(&[1.0; 3], 0.6);
        for r in 1..3 {
            assert_eq!(j.row(r), j.row(0));
        }
    }

    #[test]
    fn molloy_reed_at_q_zero() {
        let p = geometric(2);
        let m = BlockModel::from_partition(&p, 0.0, PermutationH::reversal(2)).unwrap();
        let adj = p.adjusted_pmf();
        let expected = adj.mean() / (adj.moment(2) - adj.mean());
        let r = m.critical_phi().unwrap();
        assert_abs_diff_eq!(r.phi_star, expected, epsilon = 1e-10);
        assert_abs_diff_eq!(r.phi_star, 0.24758, epsilon = 1e-5);
        assert!(r.reachable);
        assert!(r.eigvec.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn unreachable_threshold_is_flagged() {
        // mean excess degree below one
        let pmf = DegreePmf::from_pairs([(1, 0.8), (2, 0.2)]).unwrap();
        let p = partition_blocks(&pmf, 1).unwrap();
        let m = BlockModel::from_partition(&p, 0.0, PermutationH::identity(1)).unwrap();
        let r = m.threshold_report(1e-5).unwrap();
        assert!(!r.reachable);
        assert!(r.phi_star > 1.0);
        assert_eq!(r.phi_star_numeric, None);
    }

    #[test]
    fn numeric_threshold_agrees() {
        let m = model(2, 0.5, PermutationH::identity(2));
        let r = m.threshold_report(1e-5).unwrap();
        assert!(r.agreement.unwrap() < 1e-3);
        assert_abs_diff_eq!(r.phi_star_numeric.unwrap(), 0.19518, epsilon = 1e-3);
    }
}
