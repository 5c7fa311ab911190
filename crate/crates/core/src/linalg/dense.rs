use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| super::dot(self.row(i), x)).collect()
    }

    /// `Aᵀ x`
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                super::axpy(xi, self.row(i), &mut y);
            }
        }
        y
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// Dense Cholesky `A = L Lᵀ` for small SPD blocks (Schur complements of the
/// constrained solves). Pivots below a relative threshold are reported as
/// rank deficiency.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
}

impl DenseCholesky {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        assert!(a.is_square());
        let n = a.rows;
        let mut l = a.data.clone();
        for k in 0..n {
            let orig = a.get(k, k);
            let mut d = l[k * n + k];
            for p in 0..k {
                d -= l[k * n + p] * l[k * n + p];
            }
            if !(orig > 0.0) || !(d > 1e-12 * orig) {
                return Err(Error::RankDeficient { row: k });
            }
            let d = d.sqrt();
            l[k * n + k] = d;
            for i in k + 1..n {
                let mut s = l[i * n + k];
                for p in 0..k {
                    s -= l[i * n + p] * l[k * n + p];
                }
                l[i * n + k] = s / d;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                l[i * n + j] = 0.0;
            }
        }
        Ok(DenseCholesky { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for p in 0..i {
                s -= self.l[i * n + p] * x[p];
            }
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for p in i + 1..n {
                s -= self.l[p * n + i] * x[p];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }
}

/// All eigenvalues of a dense symmetric matrix, ascending, by cyclic Jacobi
/// rotations.
pub fn dense_sym_eig(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            got: a.cols,
        });
    }
    let n = a.rows;
    let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in i + 1..n {
            if (a.get(i, j) - a.get(j, i)).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut m = a.data.clone();
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off == 0.0 || off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rtol: f64) -> bool {
        (a - b).abs() <= rtol * b.abs().max(1.0)
    }

    #[test]
    fn diagonal_eigenvalues() {
        let a = DenseMatrix::from_row_major(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(dense_sym_eig(&a).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let a = DenseMatrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let ev = dense_sym_eig(&a).unwrap();
        assert!(close(ev[0], -1.0, 1e-14) && close(ev[1], 1.0, 1e-14));
    }

    #[test]
    fn path_laplacian_closed_form() {
        let n = 4;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let ev = dense_sym_eig(&a).unwrap();
        for (k, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 5.0).cos();
            assert!(close(*e, exact, 1e-12), "{e} vs {exact}");
        }
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(dense_sym_eig(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn cholesky_solves_and_flags_rank_deficiency() {
        let a = DenseMatrix::from_row_major(2, 2, vec![4.0, 2.0, 2.0, 3.0]);
        let c = DenseCholesky::new(&a).unwrap();
        let x = c.solve(&[2.0, 1.0]);
        let r = a.matvec(&x);
        assert!(close(r[0], 2.0, 1e-14) && close(r[1], 1.0, 1e-14));
        let s = DenseMatrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(DenseCholesky::new(&s), Err(Error::RankDeficient { row: 1 })));
    }
}
