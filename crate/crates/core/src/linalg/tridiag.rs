use crate::error::{Error, Result};

/// Extreme eigenvalues `(min, max)` of the symmetric tridiagonal matrix with
/// diagonal `alphas` and off-diagonal `betas` (`betas.len() + 1 ==
/// alphas.len()`), by Sturm-sequence bisection.
pub fn tridiag_eig(alphas: &[f64], betas: &[f64]) -> Result<(f64, f64)> {
    if alphas.is_empty() {
        return Err(Error::Empty("tridiagonal matrix"));
    }
    if betas.len() + 1 != alphas.len() {
        return Err(Error::DimensionMismatch {
            expected: alphas.len() - 1,
            got: betas.len(),
        });
    }
    let n = alphas.len();
    // Gershgorin interval
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { betas[i - 1].abs() } else { 0.0 } + if i + 1 < n { betas[i].abs() } else { 0.0 };
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    let min = bisect(alphas, betas, lo, hi, 0);
    let max = bisect(alphas, betas, lo, hi, n - 1);
    Ok((min, max))
}

/// Number of eigenvalues strictly less than `x`.
fn count_below(alphas: &[f64], betas: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alphas.len() {
        let b2 = if i > 0 { betas[i - 1] * betas[i - 1] } else { 0.0 };
        q = alphas[i] - x - if i > 0 { b2 / q } else { 0.0 };
        if q == 0.0 {
            q = f64::EPSILON * (alphas[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) within `[lo, hi]`.
fn bisect(alphas: &[f64], betas: &[f64], mut lo: f64, mut hi: f64, k: usize) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if count_below(alphas, betas, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
