use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_ITER: usize = 100_000;
const REL_TOL: f64 = 1e-12;
const SQUARINGS: i32 = 48;

/// Perron root and eigenvector of an entrywise positive matrix by power
/// iteration. The eigenvector is positive with `max_i v_i = 1`.
pub fn dominant_eig(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    if !m.is_square() || m.iter().any(|x| x.is_nan() || *x <= 0.0) {
        return Err(Error::NonPositiveMatrix);
    }
    power_iteration(m, 0.0)
}

/// Perron root of a non-negative matrix. Iterates on `M + I`, which is
/// primitive whenever `M` is irreducible and keeps `rho + 1` strictly
/// dominant.
pub(crate) fn perron_root(m: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    if !m.is_square() || m.iter().any(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::NonPositiveMatrix);
    }
    power_iteration(m, 1.0)
}

fn power_iteration(m: &DMatrix<f64>, shift: f64) -> Result<(f64, DVector<f64>)> {
    let n = m.nrows();
    let a = m + DMatrix::identity(n, n) * shift;
    let mut v = DVector::from_element(n, 1.0);
    let mut previous = f64::NAN;
    for _ in 0..MAX_ITER {
        let w = &a * &v;
        let lambda = w.amax();
        if lambda == 0.0 {
            return Ok((0.0, v));
        }
        v = w / lambda;
        if (lambda - previous).abs() <= REL_TOL * lambda {
            return Ok((lambda - shift, v));
        }
        previous = lambda;
    }
    Err(Error::EigenNoConvergence(MAX_ITER))
}

fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral radius of any square matrix from `||A^k||^(1/k)` with
/// `k = 2^48`, computed by normalized repeated squaring. Works for complex
/// and defective spectra where plain power iteration stalls.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    let mut a = m.clone();
    let mut log_rate = 0.0;
    let mut power = 1.0;
    for _ in 0..SQUARINGS {
        let norm = norm_inf(&a);
        if norm == 0.0 || !norm.is_finite() {
            return 0.0;
        }
        a /= norm;
        log_rate += norm.ln() / power;
        a = &a * &a;
        power *= 2.0;
    }
    let norm = norm_inf(&a);
    if norm == 0.0 {
        return 0.0;
    }
    (log_rate + norm.ln() / power).exp()
}

/// Smallest eigenvalue modulus, `1 / rho(A^-1)`; zero for singular `A`.
pub fn min_modulus(m: &DMatrix<f64>) -> f64 {
    match m.clone().try_inverse() {
        Some(inv) => {
            let r = spectral_radius(&inv);
            if r > 0.0 {
                1.0 / r
            } else {
                f64::INFINITY
            }
        }
        None => 0.0,
    }
}
