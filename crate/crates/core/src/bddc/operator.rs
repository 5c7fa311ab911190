use rayon::prelude::*;

use super::{ConstraintSet, WeightingOperator};
use crate::error::{Error, Result};
use crate::linalg::{
    dot, DenseMatrix, Regularization, SaddleFactorization, SparseRow, SparseSym, SpdFactorization, SymBuilder,
};
use crate::mesh::{assemble_cells, AssembledSystem, CoefficientField, StructuredMesh};
use crate::partition::PartitionPair;

/// Local data of one subdomain.
///
/// Local DOFs are ordered interior first, then interface (Γ).
#[derive(Debug)]
pub struct SubdomainOperator {
    pub id: usize,
    /// local → global DOF
    pub dofs: Vec<usize>,
    pub n_interior: usize,
    /// `δ†_i` on the local Γ DOFs
    pub gamma_weights: Vec<f64>,
    /// Neumann stiffness (Dirichlet only on ∂Ω)
    pub matrix: SparseSym,
    interior: Option<SpdFactorization>,
    saddle: SaddleFactorization,
    /// local coarse DOF → global coarse DOF
    pub coarse_dofs: Vec<usize>,
    /// Γ rows of the coarse basis Ψ_i
    psi_gamma: DenseMatrix,
    /// `Ψ_iᵀ A_i Ψ_i`
    pub coarse_matrix: DenseMatrix,
}

impl SubdomainOperator {
    pub fn n_local(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.dofs.len() - self.n_interior
    }

    pub fn is_floating(&self) -> bool {
        self.saddle.is_augmented()
    }

    fn interior_solve(&self, rhs: &mut [f64]) {
        if let Some(f) = &self.interior {
            f.solve_in_place(rhs);
        }
    }
}

/// The assembled two-level preconditioner.
#[derive(Debug)]
pub struct BddcOperator {
    n: usize,
    matrix: SparseSym,
    subdomains: Vec<SubdomainOperator>,
    coarse: Option<SpdFactorization>,
    coarse_count: usize,
    /// global DOF → (subdomain, local index) for interior DOFs
    interior_owner: Vec<Option<(usize, usize)>>,
}

pub fn build_bddc(
    mesh: &StructuredMesh,
    coeff: &CoefficientField,
    system: &AssembledSystem,
    pair: &PartitionPair,
    constraints: &ConstraintSet,
    weights: &WeightingOperator,
) -> Result<BddcOperator> {
    BddcOperator::new(mesh, coeff, system, pair, constraints, weights)
}

pub fn apply_bddc(bddc: &BddcOperator, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != bddc.dim() {
        return Err(Error::DimensionMismatch {
            expected: bddc.dim(),
            got: r.len(),
        });
    }
    Ok(bddc.apply(r))
}

pub fn harmonic_extension(bddc: &BddcOperator, interface_values: &[f64]) -> Result<Vec<f64>> {
    if interface_values.len() != bddc.dim() {
        return Err(Error::DimensionMismatch {
            expected: bddc.dim(),
            got: interface_values.len(),
        });
    }
    Ok(bddc.harmonic_extension(interface_values))
}

impl BddcOperator {
    pub fn new(
        mesh: &StructuredMesh,
        coeff: &CoefficientField,
        system: &AssembledSystem,
        pair: &PartitionPair,
        constraints: &ConstraintSet,
        weights: &WeightingOperator,
    ) -> Result<Self> {
        let n = system.dof_count();
        if weights.dof_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.dof_count(),
            });
        }
        let cells_of = pair.theta().cells_of();
        let per_sub = constraints.per_subdomain(pair.subdomain_count());

        let subdomains: Vec<SubdomainOperator> = (0..pair.subdomain_count())
            .into_par_iter()
            .map(|i| {
                build_subdomain(mesh, coeff, system, i, &cells_of[i], constraints, &per_sub[i], weights)
                    .map_err(|e| e.in_subdomain(i))
            })
            .collect::<Result<_>>()?;

        let coarse_count = constraints.coarse_count();
        let coarse = if coarse_count > 0 {
            let mut b = SymBuilder::new(coarse_count);
            for sd in &subdomains {
                let m = sd.coarse_dofs.len();
                for k in 0..m {
                    for l in k..m {
                        b.add(sd.coarse_dofs[k], sd.coarse_dofs[l], sd.coarse_matrix.get(k, l));
                    }
                }
            }
            Some(SpdFactorization::new(&b.build()).map_err(|e| e.in_phase("coarse factorization"))?)
        } else {
            None
        };

        let mut interior_owner = vec![None; n];
        for sd in &subdomains {
            for (l, &g) in sd.dofs[..sd.n_interior].iter().enumerate() {
                interior_owner[g] = Some((sd.id, l));
            }
        }
        Ok(BddcOperator {
            n,
            matrix: system.matrix.clone(),
            subdomains,
            coarse,
            coarse_count,
            interior_owner,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coarse_count(&self) -> usize {
        self.coarse_count
    }

    pub fn subdomains(&self) -> &[SubdomainOperator] {
        &self.subdomains
    }

    pub fn matrix(&self) -> &SparseSym {
        &self.matrix
    }

    /// Applies the block-diagonal interior solve `Σ_i R_Iᵀ A_II⁻¹ R_I`.
    pub fn interior_correction(&self, r: &[f64]) -> Vec<f64> {
        let parts: Vec<Vec<f64>> = self
            .subdomains
            .par_iter()
            .map(|sd| {
                let mut x: Vec<f64> = sd.dofs[..sd.n_interior].iter().map(|&g| r[g]).collect();
                sd.interior_solve(&mut x);
                x
            })
            .collect();
        let mut out = vec![0.0; self.n];
        for (sd, x) in self.subdomains.iter().zip(parts) {
            for (&g, v) in sd.dofs[..sd.n_interior].iter().zip(x) {
                out[g] = v;
            }
        }
        out
    }

    /// Weighted restriction to the subdomains, solve in the partially
    /// continuous space (local constrained solves plus the coarse solve),
    /// weighted average back. Returns values on Γ only (zero inside).
    fn interface_solve(&self, r: &[f64]) -> Vec<f64> {
        let local_rhs: Vec<Vec<f64>> = self
            .subdomains
            .par_iter()
            .map(|sd| {
                let mut f = vec![0.0; sd.n_local()];
                for (k, (&g, w)) in sd.dofs[sd.n_interior..].iter().zip(&sd.gamma_weights).enumerate() {
                    f[sd.n_interior + k] = w * r[g];
                }
                f
            })
            .collect();

        let coarse_sol = self.coarse.as_ref().map(|coarse| {
            let mut rc = vec![0.0; self.coarse_count];
            for (sd, f) in self.subdomains.iter().zip(&local_rhs) {
                let part = sd.psi_gamma.matvec_t(&f[sd.n_interior..]);
                for (&gk, v) in sd.coarse_dofs.iter().zip(part) {
                    rc[gk] += v;
                }
            }
            coarse.solve(&rc)
        });

        let local_sol: Vec<Vec<f64>> = self
            .subdomains
            .par_iter()
            .zip(&local_rhs)
            .map(|(sd, f)| {
                let w = sd.saddle.solve_homogeneous(f);
                let mut wg = w[sd.n_interior..].to_vec();
                if let Some(uc) = &coarse_sol {
                    let ucl: Vec<f64> = sd.coarse_dofs.iter().map(|&gk| uc[gk]).collect();
                    for (k, v) in wg.iter_mut().enumerate() {
                        *v += dot(sd.psi_gamma.row(k), &ucl);
                    }
                }
                wg
            })
            .collect();

        let mut out = vec![0.0; self.n];
        for (sd, wg) in self.subdomains.iter().zip(local_sol) {
            for ((&g, w), v) in sd.dofs[sd.n_interior..].iter().zip(&sd.gamma_weights).zip(wg) {
                out[g] += w * v;
            }
        }
        out
    }

    /// `z = B r`, the symmetric interior-corrected BDDC application.
    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.n);
        let u1 = self.interior_correction(r);
        let au1 = self.matrix.matvec(&u1);
        let r1: Vec<f64> = r.iter().zip(&au1).map(|(a, b)| a - b).collect();
        let u2 = self.interface_solve(&r1);
        let au2 = self.matrix.matvec(&u2);
        let r2: Vec<f64> = r1.iter().zip(&au2).map(|(a, b)| a - b).collect();
        let u3 = self.interior_correction(&r2);
        u1.iter().zip(&u2).zip(&u3).map(|((a, b), c)| a + b + c).collect()
    }

    /// Keeps the Γ values of `u` and fills every subdomain interior with the
    /// discrete harmonic extension.
    pub fn harmonic_extension(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n);
        let mut out = u.to_vec();
        for (g, owner) in self.interior_owner.iter().enumerate() {
            if owner.is_some() {
                out[g] = 0.0;
            }
        }
        let interiors: Vec<Vec<f64>> = self
            .subdomains
            .par_iter()
            .map(|sd| {
                let mut x = vec![0.0; sd.n_local()];
                for (k, &g) in sd.dofs[sd.n_interior..].iter().enumerate() {
                    x[sd.n_interior + k] = u[g];
                }
                let ax = sd.matrix.matvec(&x);
                let mut rhs: Vec<f64> = ax[..sd.n_interior].iter().map(|v| -v).collect();
                sd.interior_solve(&mut rhs);
                rhs
            })
            .collect();
        for (sd, x) in self.subdomains.iter().zip(interiors) {
            for (&g, v) in sd.dofs[..sd.n_interior].iter().zip(x) {
                out[g] = v;
            }
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn build_subdomain(
    mesh: &StructuredMesh,
    coeff: &CoefficientField,
    system: &AssembledSystem,
    id: usize,
    cells: &[usize],
    constraints: &ConstraintSet,
    objects: &[usize],
    weights: &WeightingOperator,
) -> Result<SubdomainOperator> {
    let mut nodes: Vec<usize> = cells.iter().flat_map(|&c| mesh.cell_nodes(c)).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let floating = nodes.iter().all(|&n| system.node_to_dof[n].is_some());
    let global: Vec<usize> = nodes.iter().filter_map(|&n| system.node_to_dof[n]).collect();
    let (interior, gamma): (Vec<usize>, Vec<usize>) = global.iter().partition(|&&g| !weights.is_interface(g));
    let n_interior = interior.len();
    let dofs: Vec<usize> = interior.into_iter().chain(gamma).collect();
    let n = dofs.len();

    let mut node_local = std::collections::HashMap::with_capacity(n);
    for (l, &g) in dofs.iter().enumerate() {
        node_local.insert(system.dof_to_node[g], l);
    }
    let matrix = assemble_cells(mesh, coeff, cells.iter().copied(), n, |node| node_local.get(&node).copied());

    let interior_fact = if n_interior > 0 {
        let idx: Vec<usize> = (0..n_interior).collect();
        Some(SpdFactorization::new(&matrix.submatrix(&idx))?)
    } else {
        None
    };

    let mut global_local = std::collections::HashMap::with_capacity(n);
    for (l, &g) in dofs.iter().enumerate() {
        global_local.insert(g, l);
    }
    let rows: Vec<SparseRow> = objects
        .iter()
        .map(|&k| {
            let obj = &constraints.objects[k];
            let idx = obj.dofs.iter().map(|g| global_local[g]).collect();
            SparseRow::new(idx, ConstraintSet::row_values(obj))
        })
        .collect();
    let reg = if floating {
        Regularization::Augment
    } else {
        Regularization::None
    };
    let (saddle, psi) = SaddleFactorization::with_constrained_basis(&matrix, &rows, reg)?;

    let m = objects.len();
    let mut apsi = DenseMatrix::zeros(n, m);
    for i in 0..n {
        for (j, v) in matrix.row(i) {
            let src = psi.row(j);
            let dst = &mut apsi.data[i * m..(i + 1) * m];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += v * s;
            }
        }
    }
    let mut coarse_matrix = DenseMatrix::zeros(m, m);
    for i in 0..n {
        let p = psi.row(i);
        let a = apsi.row(i);
        for (k, &pk) in p.iter().enumerate() {
            if pk == 0.0 {
                continue;
            }
            for (l, &al) in a.iter().enumerate().skip(k) {
                coarse_matrix.add(k, l, pk * al);
            }
        }
    }
    for k in 0..m {
        for l in k + 1..m {
            let v = coarse_matrix.get(k, l);
            coarse_matrix.set(l, k, v);
        }
    }
    let psi_gamma = DenseMatrix::from_row_major(n - n_interior, m, psi.data[n_interior * m..].to_vec());
    let gamma_weights = dofs[n_interior..].iter().map(|&g| weights.weight(id, g)).collect();

    Ok(SubdomainOperator {
        id,
        dofs,
        n_interior,
        gamma_weights,
        matrix,
        interior: interior_fact,
        saddle,
        coarse_dofs: objects.to_vec(),
        psi_gamma,
        coarse_matrix,
    })
}
