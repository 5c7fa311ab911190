//! Structured Q1 meshes on the unit box and Poisson assembly with
//! homogeneous Dirichlet conditions eliminated.

use crate::error::{Error, Result};
use crate::linalg::{SparseSym, SymBuilder};

/// Tensor-product quadrilateral (2D) or hexahedral (3D) grid on `[0,1]^dim`.
///
/// Nodes and cells are numbered lexicographically with `x` fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredMesh {
    dim: usize,
    cells: [usize; 3],
}

pub fn build_mesh(dim: usize, cells_per_dim: &[usize]) -> Result<StructuredMesh> {
    StructuredMesh::new(dim, cells_per_dim)
}

impl StructuredMesh {
    pub fn new(dim: usize, cells_per_dim: &[usize]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension must be 2 or 3, got {dim}")));
        }
        if cells_per_dim.len() != dim {
            return Err(Error::InvalidMesh(format!(
                "expected {dim} cell counts, got {}",
                cells_per_dim.len()
            )));
        }
        if let Some(&bad) = cells_per_dim.iter().find(|&&c| c == 0) {
            return Err(Error::InvalidMesh(format!("cell count must be positive, got {bad}")));
        }
        let mut cells = [1; 3];
        cells[..dim].copy_from_slice(cells_per_dim);
        Ok(StructuredMesh { dim, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_dim(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn nodes_per_dim(&self) -> Vec<usize> {
        self.cells_per_dim().iter().map(|c| c + 1).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_dim().iter().product()
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_dim().iter().product()
    }

    pub fn nodes_per_cell(&self) -> usize {
        1 << self.dim
    }

    /// Cell edge lengths per axis.
    pub fn h(&self) -> Vec<f64> {
        self.cells_per_dim().iter().map(|&c| 1.0 / c as f64).collect()
    }

    pub fn cell_index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.cells[0] * (ijk[1] + self.cells[1] * ijk[2])
    }

    pub fn cell_coords(&self, c: usize) -> [usize; 3] {
        let nx = self.cells[0];
        let ny = self.cells[1];
        [c % nx, (c / nx) % ny, c / (nx * ny)]
    }

    pub fn node_index(&self, ijk: [usize; 3]) -> usize {
        let nx = self.cells[0] + 1;
        let ny = if self.dim > 1 { self.cells[1] + 1 } else { 1 };
        ijk[0] + nx * (ijk[1] + ny * ijk[2])
    }

    pub fn node_grid_coords(&self, n: usize) -> [usize; 3] {
        let nx = self.cells[0] + 1;
        let ny = self.cells[1] + 1;
        let mut ijk = [n % nx, (n / nx) % ny, n / (nx * ny)];
        if self.dim == 2 {
            ijk[2] = 0;
        }
        ijk
    }

    pub fn node_coords(&self, n: usize) -> Vec<f64> {
        let g = self.node_grid_coords(n);
        (0..self.dim).map(|d| g[d] as f64 / self.cells[d] as f64).collect()
    }

    /// Nodes of a cell; local node `a` has offset bit `d` of `a` along axis `d`.
    pub fn cell_nodes(&self, c: usize) -> Vec<usize> {
        let base = self.cell_coords(c);
        (0..self.nodes_per_cell())
            .map(|a| {
                let mut ijk = base;
                for (d, v) in ijk.iter_mut().enumerate().take(self.dim) {
                    *v += (a >> d) & 1;
                }
                self.node_index(ijk)
            })
            .collect()
    }

    /// Cells containing node `n` in their closure.
    pub fn node_cells(&self, n: usize) -> Vec<usize> {
        let g = self.node_grid_coords(n);
        let mut out = Vec::with_capacity(self.nodes_per_cell());
        for a in 0..self.nodes_per_cell() {
            let mut ijk = [0; 3];
            let mut ok = true;
            for d in 0..self.dim {
                let off = (a >> d) & 1;
                if g[d] < off || g[d] - off >= self.cells[d] {
                    ok = false;
                    break;
                }
                ijk[d] = g[d] - off;
            }
            if ok {
                out.push(self.cell_index(ijk));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_boundary_node(&self, n: usize) -> bool {
        let g = self.node_grid_coords(n);
        (0..self.dim).any(|d| g[d] == 0 || g[d] == self.cells[d])
    }

    /// Face-adjacent cells.
    pub fn cell_neighbors(&self, c: usize) -> Vec<usize> {
        let g = self.cell_coords(c);
        let mut out = Vec::with_capacity(2 * self.dim);
        for d in 0..self.dim {
            if g[d] > 0 {
                let mut h = g;
                h[d] -= 1;
                out.push(self.cell_index(h));
            }
            if g[d] + 1 < self.cells[d] {
                let mut h = g;
                h[d] += 1;
                out.push(self.cell_index(h));
            }
        }
        out
    }
}

/// Piecewise-constant diffusion coefficient, one positive value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    alpha: Vec<f64>,
}

impl CoefficientField {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if let Some((c, &a)) = alpha.iter().enumerate().find(|(_, a)| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidCoefficient(format!("alpha[{c}] = {a} is not positive")));
        }
        Ok(CoefficientField { alpha })
    }

    pub fn constant(cell_count: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; cell_count])
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn get(&self, c: usize) -> f64 {
        self.alpha[c]
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.alpha.iter().map(|a| a * s).collect())
    }
}

/// Q1 element stiffness matrix (row-major `2^dim × 2^dim`) on a box with edge
/// lengths `h`, scaled by `alpha`.
///
/// Built as the tensor sum `Σ_d K₁(h_d) ⊗ ⊗_{e≠d} M₁(h_e)` of 1D stiffness and
/// mass matrices; the upper triangle is computed and mirrored.
pub fn element_stiffness(dim: usize, h: &[f64], alpha: f64) -> Vec<f64> {
    assert_eq!(h.len(), dim);
    assert!(h.iter().all(|&x| x > 0.0) && alpha > 0.0);
    let n = 1 << dim;
    let mut k = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let mut v = 0.0;
            for d in 0..dim {
                let mut term = 1.0;
                for e in 0..dim {
                    let same = ((a >> e) & 1) == ((b >> e) & 1);
                    term *= if e == d {
                        if same {
                            1.0 / h[e]
                        } else {
                            -1.0 / h[e]
                        }
                    } else if same {
                        h[e] / 3.0
                    } else {
                        h[e] / 6.0
                    };
                }
                v += term;
            }
            k[a * n + b] = alpha * v;
            k[b * n + a] = alpha * v;
        }
    }
    k
}

/// Stiffness matrix and load vector over the free (non-Dirichlet) nodes.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseSym,
    pub rhs: Vec<f64>,
    /// mesh node → free DOF index (`None` for Dirichlet nodes)
    pub node_to_dof: Vec<Option<usize>>,
    /// free DOF index → mesh node
    pub dof_to_node: Vec<usize>,
}

impl AssembledSystem {
    pub fn dof_count(&self) -> usize {
        self.dof_to_node.len()
    }
}

/// Node → free DOF numbering in mesh order, skipping boundary nodes.
pub fn free_dof_map(mesh: &StructuredMesh) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut node_to_dof = vec![None; mesh.node_count()];
    let mut dof_to_node = Vec::new();
    for (n, slot) in node_to_dof.iter_mut().enumerate() {
        if !mesh.is_boundary_node(n) {
            *slot = Some(dof_to_node.len());
            dof_to_node.push(n);
        }
    }
    (node_to_dof, dof_to_node)
}

/// Assembles `α ∇u·∇v` over `cells` into a matrix indexed by `local[node]`,
/// dropping nodes mapped to `None`.
pub(crate) fn assemble_cells(
    mesh: &StructuredMesh,
    coeff: &CoefficientField,
    cells: impl IntoIterator<Item = usize>,
    n: usize,
    local: impl Fn(usize) -> Option<usize>,
) -> SparseSym {
    let dim = mesh.dim();
    let npc = mesh.nodes_per_cell();
    let unit = element_stiffness(dim, &mesh.h(), 1.0);
    let mut b = SymBuilder::new(n);
    let mut ids = vec![None; npc];
    for c in cells {
        let alpha = coeff.get(c);
        for (slot, node) in ids.iter_mut().zip(mesh.cell_nodes(c)) {
            *slot = local(node);
        }
        for a in 0..npc {
            let Some(i) = ids[a] else { continue };
            for bb in 0..npc {
                let Some(j) = ids[bb] else { continue };
                // each unordered pair once
                if i < j || (i == j && a == bb) {
                    b.add(i, j, alpha * unit[a * npc + bb]);
                }
            }
        }
    }
    b.build()
}

/// Assembles the Dirichlet-eliminated system for constant source `f`.
pub fn assemble(mesh: &StructuredMesh, coeff: &CoefficientField, f: f64) -> Result<AssembledSystem> {
    if coeff.len() != mesh.cell_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.cell_count(),
            got: coeff.len(),
        });
    }
    let (node_to_dof, dof_to_node) = free_dof_map(mesh);
    let matrix = assemble_cells(mesh, coeff, 0..mesh.cell_count(), dof_to_node.len(), |node| node_to_dof[node]);
    let cell_volume: f64 = mesh.h().iter().product();
    let share = f * cell_volume / mesh.nodes_per_cell() as f64;
    let mut rhs = vec![0.0; dof_to_node.len()];
    for c in 0..mesh.cell_count() {
        for node in mesh.cell_nodes(c) {
            if let Some(i) = node_to_dof[node] {
                rhs[i] += share;
            }
        }
    }
    Ok(AssembledSystem {
        matrix,
        rhs,
        node_to_dof,
        dof_to_node,
    })
}
