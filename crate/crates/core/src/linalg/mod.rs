//! Numerical kernels: symmetric sparse storage, sparse LDLᵀ with a
//! minimum-degree ordering, constrained (saddle-point) solves, and small
//! dense / tridiagonal eigensolvers.

mod cholesky;
mod dense;
mod ordering;
mod saddle;
mod sparse;
mod tridiag;

pub use cholesky::{spd_factor, spd_solve, SpdFactorization};
pub use dense::{dense_sym_eig, DenseCholesky, DenseMatrix};
pub use ordering::minimum_degree;
pub use saddle::{saddle_factor, saddle_solve, Regularization, SaddleFactorization, SparseRow};
pub use sparse::{SparseSym, SymBuilder};
pub use tridiag::tridiag_eig;

/// Relative tolerance on LDLᵀ pivots: a pivot at or below this fraction of
/// the original diagonal entry is reported as a loss of definiteness.
pub const PIVOT_RTOL: f64 = 1e-11;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += s * x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}
