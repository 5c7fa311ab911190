use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::SparseSym;

/// Minimum-degree fill-reducing ordering on the explicit elimination graph.
///
/// Returns `perm` with `perm[new] = old`. Ties go to the lowest index, so the
/// ordering is a deterministic function of the sparsity pattern.
pub fn minimum_degree(a: &SparseSym) -> Vec<usize> {
    let n = a.dim();
    let mut adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let mut eliminated = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|i| Reverse((adj[i].len(), i))).collect();
    let mut mark = vec![usize::MAX; n];
    let mut perm = Vec::with_capacity(n);

    while let Some(Reverse((deg, v))) = heap.pop() {
        if eliminated[v] || deg != adj[v].len() {
            continue;
        }
        eliminated[v] = true;
        perm.push(v);
        let nbrs = std::mem::take(&mut adj[v]);
        for &u in &nbrs {
            // stamp u's current neighbours, then add the clique members it lacks
            let stamp = perm.len() * n + u;
            let old = std::mem::take(&mut adj[u]);
            let mut merged = Vec::with_capacity(old.len() + nbrs.len());
            mark[u] = stamp;
            for w in old {
                if w != v && mark[w] != stamp {
                    mark[w] = stamp;
                    merged.push(w);
                }
            }
            for &w in &nbrs {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    merged.push(w);
                }
            }
            heap.push(Reverse((merged.len(), u)));
            adj[u] = merged;
        }
    }
    debug_assert_eq!(perm.len(), n);
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymBuilder;

    #[test]
    fn ordering_is_a_permutation() {
        let n = 30;
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 4.0);
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
            }
            if i + 5 < n {
                b.add(i, i + 5, -1.0);
            }
        }
        let p = minimum_degree(&b.build());
        let mut s = p.clone();
        s.sort();
        assert_eq!(s, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn star_center_goes_last() {
        // arrow matrix: eliminating the hub first would fill everything
        let n = 8;
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 10.0);
            if i > 0 {
                b.add(0, i, 1.0);
            }
        }
        let p = minimum_degree(&b.build());
        // the hub ties with the last leaf once the others are gone
        assert!(p[n - 2..].contains(&0));
    }
}
