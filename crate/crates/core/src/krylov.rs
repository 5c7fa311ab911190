//! Preconditioned conjugate gradients with a Lanczos estimate of the
//! preconditioned spectrum.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, tridiag_eig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgOptions {
    /// Stop once `‖r_k‖₂ ≤ tol · ‖r₀‖₂`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PcgOptions {
    fn default() -> Self {
        PcgOptions {
            tol: 1e-6,
            max_iters: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖r_k‖₂` for `k = 0..=iterations`
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// `λ_max / λ_min` of the Lanczos tridiagonal (1 when no step was taken)
    pub kappa_estimate: f64,
    pub ritz_extremes: Option<(f64, f64)>,
}

impl SolveReport {
    pub fn relative_residual(&self) -> f64 {
        let r0 = self.residual_history[0];
        if r0 == 0.0 {
            0.0
        } else {
            self.residual_history.last().copied().unwrap_or(0.0) / r0
        }
    }
}

/// PCG from a zero initial guess. Reaching `max_iters` is reported through
/// `converged = false`, not as an error.
pub fn pcg<A, B>(apply_a: A, apply_b: B, b: &[f64], opts: PcgOptions) -> Result<(Vec<f64>, SolveReport)>
where
    A: Fn(&[f64]) -> Vec<f64>,
    B: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = norm2(&r);
    let mut history = vec![r0];
    if r0 == 0.0 {
        return Ok((
            x,
            SolveReport {
                iterations: 0,
                residual_history: history,
                converged: true,
                kappa_estimate: 1.0,
                ritz_extremes: None,
            },
        ));
    }
    let mut z = apply_b(&r);
    let mut rz = dot(&r, &z);
    if !(rz > 0.0) {
        return Err(Error::PreconditionerNotSpd(rz));
    }
    let mut p = z.clone();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut converged = false;

    while alphas.len() < opts.max_iters {
        let q = apply_a(&p);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::OperatorNotSpd(pq));
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        alphas.push(alpha);
        let rn = norm2(&r);
        history.push(rn);
        if rn <= opts.tol * r0 {
            converged = true;
            break;
        }
        if alphas.len() == opts.max_iters {
            break;
        }
        z = apply_b(&r);
        let rz_new = dot(&r, &z);
        if !(rz_new > 0.0) {
            return Err(Error::PreconditionerNotSpd(rz_new));
        }
        let beta = rz_new / rz;
        betas.push(beta);
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }

    let (diag, off) = lanczos_tridiagonal(&alphas, &betas);
    let (lmin, lmax) = tridiag_eig(&diag, &off)?;
    Ok((
        x,
        SolveReport {
            iterations: alphas.len(),
            residual_history: history,
            converged,
            kappa_estimate: lmax / lmin,
            ritz_extremes: Some((lmin, lmax)),
        },
    ))
}

/// Lanczos tridiagonal of the preconditioned operator from the CG step
/// lengths `alphas` and direction updates `betas`.
pub fn lanczos_tridiagonal(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = alphas.len();
    let diag = (0..m)
        .map(|k| {
            let mut d = 1.0 / alphas[k];
            if k > 0 {
                d += betas[k - 1] / alphas[k - 1];
            }
            d
        })
        .collect();
    let off = (0..m.saturating_sub(1)).map(|k| betas[k].sqrt() / alphas[k]).collect();
    (diag, off)
}
