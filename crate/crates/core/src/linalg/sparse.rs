use crate::error::{Error, Result};

/// Symmetric sparse matrix in compressed-row form.
///
/// Both triangles are stored; every off-diagonal value is written from a
/// single accumulated upper-triangular entry, so `A[i][j]` and `A[j][i]` are
/// bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates upper-triangular contributions `(i, j, v)` with `i <= j`
/// (the pair is normalised if given the other way round). Duplicates are
/// summed in insertion order, which keeps assembly deterministic.
#[derive(Debug, Clone, Default)]
pub struct SymBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SymBuilder {
    pub fn new(n: usize) -> Self {
        SymBuilder { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        SymBuilder {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((r, c, v));
    }

    pub fn build(mut self) -> SparseSym {
        let n = self.n;
        // stable sort keeps equal keys in insertion order
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut upper: Vec<(usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for (r, c, v) in self.entries {
            match upper.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => upper.push((r, c, v)),
            }
        }
        let mut counts = vec![0usize; n];
        for &(r, c, _) in &upper {
            counts[r] += 1;
            if r != c {
                counts[c] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut next = row_ptr.clone();
        // Rows receive lower entries (from earlier rows' upper entries) before
        // their own upper entries, so every row comes out column-sorted.
        for &(r, c, v) in &upper {
            if r != c {
                let p = next[c];
                col_idx[p] = r;
                values[p] = v;
                next[c] += 1;
            }
        }
        for &(r, c, v) in &upper {
            let p = next[r];
            col_idx[p] = c;
            values[p] = v;
            next[r] += 1;
        }
        SparseSym {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseSym {
    pub fn identity(n: usize) -> Self {
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 1.0);
        }
        b.build()
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut b = SymBuilder::new(d.len());
        for (i, &v) in d.iter().enumerate() {
            b.add(i, i, v);
        }
        b.build()
    }

    /// Builds from a dense row-major matrix, rejecting asymmetric input.
    pub fn from_dense(n: usize, a: &[f64]) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: a.len(),
            });
        }
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            for j in i..n {
                if a[i * n + j] != a[j * n + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                if a[i * n + j] != 0.0 || i == j {
                    b.add(i, j, a[i * n + j]);
                }
            }
        }
        Ok(b.build())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    /// Principal submatrix on `keep` (indices into `self`), renumbered in the
    /// order given.
    pub fn submatrix(&self, keep: &[usize]) -> SparseSym {
        let mut map = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let mut b = SymBuilder::new(keep.len());
        for (k, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                let m = map[j];
                if m != usize::MAX && k <= m {
                    b.add(k, m, v);
                }
            }
        }
        b.build()
    }

    /// Returns `c * A`.
    pub fn scaled(&self, c: f64) -> SparseSym {
        let mut s = self.clone();
        for v in &mut s.values {
            *v *= c;
        }
        s
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for (j, v) in self.row(i) {
                d[i * n + j] = v;
            }
        }
        d
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    pub(crate) fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub(crate) fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_sums_duplicates_and_mirrors() {
        let mut b = SymBuilder::new(3);
        b.add(0, 0, 1.0);
        b.add(0, 1, 2.0);
        b.add(1, 0, 0.5);
        b.add(2, 2, 4.0);
        b.add(1, 1, 3.0);
        let a = b.build();
        assert_eq!(a.get(0, 1), 2.5);
        assert_eq!(a.get(1, 0), 2.5);
        assert_eq!(a.get(0, 2), 0.0);
        assert!(a.is_symmetric());
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![3.5, 5.5, 4.0]);
    }

    #[test]
    fn rows_are_sorted() {
        let mut b = SymBuilder::new(4);
        b.add(3, 0, 1.0);
        b.add(2, 1, 1.0);
        b.add(0, 2, 1.0);
        for i in 0..4 {
            b.add(i, i, 5.0);
        }
        let a = b.build();
        for i in 0..4 {
            let cols: Vec<usize> = a.row(i).map(|(j, _)| j).collect();
            let mut sorted = cols.clone();
            sorted.sort();
            assert_eq!(cols, sorted);
        }
    }

    #[test]
    fn from_dense_rejects_asymmetry() {
        assert!(matches!(
            SparseSym::from_dense(2, &[1.0, 2.0, 3.0, 1.0]),
            Err(Error::NotSymmetric { row: 0, col: 1 })
        ));
    }

    #[test]
    fn submatrix_renumbers() {
        let a = SparseSym::from_dense(3, &[4.0, 1.0, 0.0, 1.0, 5.0, 2.0, 0.0, 2.0, 6.0]).unwrap();
        let s = a.submatrix(&[2, 1]);
        assert_eq!(s.to_dense(), vec![6.0, 2.0, 2.0, 5.0]);
    }
}
