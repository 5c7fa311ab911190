use super::{dot, DenseCholesky, DenseMatrix, SparseSym, SpdFactorization, SymBuilder};
use crate::error::{Error, Result};

/// One sparse constraint row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn new(indices: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(indices.len(), values.len());
        SparseRow { indices, values }
    }

    pub fn unit(index: usize) -> Self {
        SparseRow::new(vec![index], vec![1.0])
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(&i, v)| v * x[i]).sum()
    }

    /// `y += s * rowᵀ`
    pub fn scatter(&self, s: f64, y: &mut [f64]) {
        for (&i, v) in self.indices.iter().zip(&self.values) {
            y[i] += s * v;
        }
    }

    fn norm2_sq(&self) -> f64 {
        dot(&self.values, &self.values)
    }
}

/// How the primal block is made definite before factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularization {
    /// Factor `A` directly; fall back to augmentation if it is singular.
    Auto,
    /// `A` is known to be SPD.
    None,
    /// `A` is known to be singular (floating subdomain): factor
    /// `A + ρ c cᵀ` with `c` the sparsest constraint row.
    Augment,
}

/// Factorization of `[A Cᵀ; C 0]` for `A` symmetric positive semidefinite
/// and `C` of full row rank with `ker A ∩ ker C = {0}`.
///
/// The primal block is `K = A` or `K = A + ρ c cᵀ`; the latter leaves the
/// solution unchanged because `c u` is prescribed by the second block row.
/// Multipliers come from the dense Schur complement `S = C K⁻¹ Cᵀ`.
#[derive(Debug, Clone)]
pub struct SaddleFactorization {
    n: usize,
    rows: Vec<SparseRow>,
    primal: SpdFactorization,
    augmentation: Option<(usize, f64)>,
    schur: DenseCholesky,
}

pub fn saddle_factor(a: &SparseSym, c: &[SparseRow]) -> Result<SaddleFactorization> {
    SaddleFactorization::new(a, c, Regularization::Auto)
}

pub fn saddle_solve(fact: &SaddleFactorization, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    fact.solve(f, g)
}

impl SaddleFactorization {
    pub fn new(a: &SparseSym, c: &[SparseRow], reg: Regularization) -> Result<Self> {
        Self::build(a, c, reg).map(|(f, _)| f)
    }

    /// Factorizes and also returns the constrained energy-minimal basis
    /// `Ψ` (`n × m`): `C Ψ = I` and `A Ψ + Cᵀ Λ = 0`.
    pub fn with_constrained_basis(a: &SparseSym, c: &[SparseRow], reg: Regularization) -> Result<(Self, DenseMatrix)> {
        let (fact, z) = Self::build(a, c, reg)?;
        // Ψ = Z S⁻¹, columnwise; S is symmetric so rows of Ψ are S⁻¹ applied to rows of Z
        let m = c.len();
        let mut psi = DenseMatrix::zeros(fact.n, m);
        for i in 0..fact.n {
            let zi = z.row(i);
            let pi = fact.schur.solve(zi);
            psi.data[i * m..(i + 1) * m].copy_from_slice(&pi);
        }
        Ok((fact, psi))
    }

    fn build(a: &SparseSym, c: &[SparseRow], reg: Regularization) -> Result<(Self, DenseMatrix)> {
        let n = a.dim();
        for row in c {
            if let Some(&bad) = row.indices.iter().find(|&&i| i >= n) {
                return Err(Error::DimensionMismatch { expected: n, got: bad + 1 });
            }
        }
        let (primal, augmentation) = match reg {
            Regularization::None => (SpdFactorization::new(a)?, None),
            Regularization::Augment => Self::augmented(a, c)?,
            Regularization::Auto => match SpdFactorization::new(a) {
                Ok(f) => (f, None),
                Err(Error::NotSpd { .. }) => Self::augmented(a, c)?,
                Err(e) => return Err(e),
            },
        };
        let m = c.len();
        // Z = K⁻¹ Cᵀ stored row-major as n × m
        let mut z = DenseMatrix::zeros(n, m);
        let mut rhs = vec![0.0; n];
        for (k, row) in c.iter().enumerate() {
            rhs.fill(0.0);
            row.scatter(1.0, &mut rhs);
            primal.solve_in_place(&mut rhs);
            for i in 0..n {
                z.data[i * m + k] = rhs[i];
            }
        }
        let mut s = DenseMatrix::zeros(m, m);
        for (k, row) in c.iter().enumerate() {
            for l in k..m {
                let v: f64 = row.indices.iter().zip(&row.values).map(|(&i, w)| w * z.get(i, l)).sum();
                s.set(k, l, v);
                s.set(l, k, v);
            }
        }
        let schur = DenseCholesky::new(&s)?;
        let fact = SaddleFactorization {
            n,
            rows: c.to_vec(),
            primal,
            augmentation,
            schur,
        };
        Ok((fact, z))
    }

    fn augmented(a: &SparseSym, c: &[SparseRow]) -> Result<(SpdFactorization, Option<(usize, f64)>)> {
        let (p, row) = c
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| r.indices.len())
            .ok_or_else(|| Error::Underconstrained("singular local matrix and no constraints".into()))?;
        let n = a.dim();
        let mean_diag = a.diagonal().iter().sum::<f64>() / n.max(1) as f64;
        let rho = mean_diag / row.norm2_sq();
        let mut b = SymBuilder::with_capacity(n, a.nnz() + row.indices.len().pow(2));
        for i in 0..n {
            for (j, v) in a.row(i) {
                if i <= j {
                    b.add(i, j, v);
                }
            }
        }
        for (x, (&i, vi)) in row.indices.iter().zip(&row.values).enumerate() {
            for (&j, vj) in row.indices[x..].iter().zip(&row.values[x..]) {
                b.add(i, j, rho * vi * vj);
            }
        }
        let k = SpdFactorization::new(&b.build()).map_err(|_| {
            Error::Underconstrained("constraints do not remove the kernel of the local matrix".into())
        })?;
        Ok((k, Some((p, rho))))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_augmented(&self) -> bool {
        self.augmentation.is_some()
    }

    /// Solves `A u + Cᵀ λ = f`, `C u = g`.
    pub fn solve(&self, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(f.len(), self.n);
        assert_eq!(g.len(), self.rows.len());
        let mut y = f.to_vec();
        if let Some((p, rho)) = self.augmentation {
            self.rows[p].scatter(rho * g[p], &mut y);
        }
        self.primal.solve_in_place(&mut y);
        if self.rows.is_empty() {
            return (y, Vec::new());
        }
        let resid: Vec<f64> = self.rows.iter().zip(g).map(|(r, gi)| r.dot(&y) - gi).collect();
        let lambda = self.schur.solve(&resid);
        let mut ct = vec![0.0; self.n];
        for (r, l) in self.rows.iter().zip(&lambda) {
            r.scatter(*l, &mut ct);
        }
        self.primal.solve_in_place(&mut ct);
        for (yi, ci) in y.iter_mut().zip(&ct) {
            *yi -= ci;
        }
        (y, lambda)
    }

    /// Solution with homogeneous constraints `C u = 0`.
    pub fn solve_homogeneous(&self, f: &[f64]) -> Vec<f64> {
        self.solve(f, &vec![0.0; self.rows.len()]).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_with_point_constraint() {
        let a = SparseSym::identity(2);
        let fact = saddle_factor(&a, &[SparseRow::unit(0)]).unwrap();
        let (u, l) = saddle_solve(&fact, &[0.0, 0.0], &[1.0]);
        assert!((u[0] - 1.0).abs() < 1e-14 && u[1].abs() < 1e-14);
        assert!((l[0] + 1.0).abs() < 1e-14);
        assert!(!fact.is_augmented());
    }

    #[test]
    fn rank_deficient_constraints_are_rejected() {
        let a = SparseSym::identity(3);
        let rows = [
            SparseRow::new(vec![0, 1], vec![0.5, 0.5]),
            SparseRow::new(vec![0, 1], vec![1.0, 1.0]),
        ];
        assert!(matches!(saddle_factor(&a, &rows), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn floating_without_constraints_is_underconstrained() {
        let a = SparseSym::from_dense(2, &[1.0, -1.0, -1.0, 1.0]).unwrap();
        assert!(matches!(saddle_factor(&a, &[]), Err(Error::Underconstrained(_))));
    }

    #[test]
    fn singular_block_with_average_constraint() {
        // 1D Neumann chain, mean fixed to zero
        let n = 5;
        let mut d = vec![0.0; n * n];
        for i in 0..n - 1 {
            d[i * n + i] += 1.0;
            d[(i + 1) * n + i + 1] += 1.0;
            d[i * n + i + 1] -= 1.0;
            d[(i + 1) * n + i] -= 1.0;
        }
        let a = SparseSym::from_dense(n, &d).unwrap();
        let row = SparseRow::new((0..n).collect(), vec![1.0 / n as f64; n]);
        let fact = saddle_factor(&a, std::slice::from_ref(&row)).unwrap();
        assert!(fact.is_augmented());
        let f = vec![1.0, 0.0, 0.0, 0.0, -1.0];
        let (u, l) = fact.solve(&f, &[0.0]);
        let au = a.matvec(&u);
        for i in 0..n {
            assert!((au[i] + l[0] * row.values[0] - f[i]).abs() < 1e-12);
        }
        assert!(row.dot(&u).abs() < 1e-14);
    }
}
