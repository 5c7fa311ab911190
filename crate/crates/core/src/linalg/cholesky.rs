use super::{minimum_degree, SparseSym, PIVOT_RTOL};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Sparse LDLᵀ factorization of a symmetric positive definite matrix under a
/// minimum-degree permutation (up-looking, elimination-tree driven).
///
/// Immutable once built; [`SpdFactorization::solve`] allocates its own
/// workspace, so concurrent solves are safe.
#[derive(Debug, Clone)]
pub struct SpdFactorization {
    n: usize,
    perm: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    d: Vec<f64>,
}

pub fn spd_factor(a: &SparseSym) -> Result<SpdFactorization> {
    SpdFactorization::new(a)
}

pub fn spd_solve(fact: &SpdFactorization, rhs: &[f64]) -> Vec<f64> {
    fact.solve(rhs)
}

impl SpdFactorization {
    pub fn new(a: &SparseSym) -> Result<Self> {
        let perm = minimum_degree(a);
        Self::with_ordering(a, perm)
    }

    pub fn with_ordering(a: &SparseSym, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        assert_eq!(perm.len(), n);
        let mut pinv = vec![0usize; n];
        for (k, &old) in perm.iter().enumerate() {
            pinv[old] = k;
        }
        let (rp, ci, vals) = (a.row_ptr(), a.col_idx(), a.values());
        // upper part of permuted column k = lower part of original row perm[k]
        let pinv = &pinv;
        let upper_col = |k: usize| {
            let old = perm[k];
            (rp[old]..rp[old + 1])
                .map(move |p| (pinv[ci[p]], vals[p]))
                .filter(move |&(i, _)| i <= k)
        };

        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (mut i, _) in upper_col(k) {
                while flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut l_ptr = vec![0usize; n + 1];
        for k in 0..n {
            l_ptr[k + 1] = l_ptr[k] + lnz[k];
        }
        let total = l_ptr[n];
        let mut l_idx = vec![0usize; total];
        let mut l_val = vec![0.0; total];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        flag.fill(NONE);
        lnz.fill(0);

        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            let mut diag = 0.0;
            for (i0, v) in upper_col(k) {
                y[i0] += v;
                if i0 == k {
                    diag = v;
                }
                let mut i = i0;
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            d[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = l_ptr[i];
                for p in start..start + lnz[i] {
                    y[l_idx[p]] -= l_val[p] * yi;
                }
                let lki = yi / d[i];
                d[k] -= lki * yi;
                let p = start + lnz[i];
                l_idx[p] = k;
                l_val[p] = lki;
                lnz[i] += 1;
            }
            if !(diag > 0.0) || !(d[k] > PIVOT_RTOL * diag) {
                return Err(Error::NotSpd { pivot: perm[k] });
            }
        }

        Ok(SpdFactorization {
            n,
            perm,
            l_ptr,
            l_idx,
            l_val,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal factor entries.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                    x[self.l_idx[p]] -= self.l_val[p] * xj;
                }
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                s -= self.l_val[p] * x[self.l_idx[p]];
            }
            x[j] = s;
        }
        for (k, &old) in self.perm.iter().enumerate() {
            b[old] = x[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, SymBuilder};

    fn laplacian_2d(m: usize) -> SparseSym {
        let n = m * m;
        let mut b = SymBuilder::new(n);
        for j in 0..m {
            for i in 0..m {
                let k = i + m * j;
                b.add(k, k, 4.0);
                if i + 1 < m {
                    b.add(k, k + 1, -1.0);
                }
                if j + 1 < m {
                    b.add(k, k + m, -1.0);
                }
            }
        }
        b.build()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let f = spd_factor(&SparseSym::identity(5)).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(spd_solve(&f, &b), b);
    }

    #[test]
    fn indefinite_is_rejected_with_pivot() {
        let a = SparseSym::from_diagonal(&[1.0, -1.0]);
        match spd_factor(&a) {
            Err(Error::NotSpd { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected NotSpd, got {other:?}"),
        }
    }

    #[test]
    fn singular_neumann_is_rejected() {
        let a = SparseSym::from_dense(3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]).unwrap();
        assert!(matches!(spd_factor(&a), Err(Error::NotSpd { .. })));
    }

    #[test]
    fn laplacian_residual_small() {
        let a = laplacian_2d(12);
        let f = spd_factor(&a).unwrap();
        let b: Vec<f64> = (0..a.dim()).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let x = f.solve(&b);
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
        assert!(norm2(&r) <= 1e-12 * norm2(&b));
    }

    #[test]
    fn ordering_reduces_fill_on_grid() {
        let a = laplacian_2d(16);
        let natural = SpdFactorization::with_ordering(&a, (0..a.dim()).collect()).unwrap();
        let md = spd_factor(&a).unwrap();
        assert!(md.factor_nnz() < natural.factor_nnz());
    }
}
