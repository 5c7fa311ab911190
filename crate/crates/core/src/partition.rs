//! Coarse and refined partitions of the mesh cells, interface membership
//! sets, and the classification of interface DOFs into objects.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{free_dof_map, CoefficientField, StructuredMesh};

/// Cell → part map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Part ids must be `0..count` with every id used.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let count = parts.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; count];
        for &p in &parts {
            used[p] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::InvalidPartition(format!("part {missing} has no cells")));
        }
        Ok(Partition { parts, count })
    }

    pub fn part(&self, cell: usize) -> usize {
        self.parts[cell]
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn cells_of(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (c, &p) in self.parts.iter().enumerate() {
            out[p].push(c);
        }
        out
    }
}

/// Block partition into `subdomains_per_dim` boxes, numbered with `x` fastest.
pub fn partition_uniform(mesh: &StructuredMesh, subdomains_per_dim: &[usize]) -> Result<Partition> {
    let cells = mesh.cells_per_dim();
    if subdomains_per_dim.len() != cells.len() {
        return Err(Error::InvalidPartition(format!(
            "expected {} subdomain counts, got {}",
            cells.len(),
            subdomains_per_dim.len()
        )));
    }
    for (d, (&c, &s)) in cells.iter().zip(subdomains_per_dim).enumerate() {
        if s == 0 || c % s != 0 {
            return Err(Error::InvalidPartition(format!(
                "{s} subdomains do not divide {c} cells along axis {d}"
            )));
        }
    }
    let block: Vec<usize> = cells.iter().zip(subdomains_per_dim).map(|(c, s)| c / s).collect();
    let parts = (0..mesh.cell_count())
        .map(|c| {
            let g = mesh.cell_coords(c);
            let mut id = 0;
            for d in (0..cells.len()).rev() {
                id = id * subdomains_per_dim[d] + g[d] / block[d];
            }
            id
        })
        .collect();
    Partition::new(parts)
}

/// The coarse partition Θ, the refined partition Θ̂ and the parent map
/// Θ̂ → Θ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPair {
    theta: Partition,
    theta_hat: Partition,
    parent: Vec<usize>,
}

impl PartitionPair {
    /// Validates nesting and face-connectivity of every part of both levels.
    pub fn new(mesh: &StructuredMesh, theta: Partition, theta_hat: Partition) -> Result<Self> {
        if theta.parts.len() != mesh.cell_count() || theta_hat.parts.len() != mesh.cell_count() {
            return Err(Error::InvalidPartition("partition does not cover the mesh cells".into()));
        }
        let mut parent = vec![usize::MAX; theta_hat.count];
        for c in 0..mesh.cell_count() {
            let j = theta_hat.part(c);
            let i = theta.part(c);
            if parent[j] == usize::MAX {
                parent[j] = i;
            } else if parent[j] != i {
                return Err(Error::InvalidPartition(format!(
                    "subsubdomain {j} straddles subdomains {} and {i}",
                    parent[j]
                )));
            }
        }
        check_connected(mesh, &theta, "subdomain")?;
        check_connected(mesh, &theta_hat, "subsubdomain")?;
        Ok(PartitionPair {
            theta,
            theta_hat,
            parent,
        })
    }

    /// Θ̂ = Θ: the standard BDDC setting.
    pub fn standard(mesh: &StructuredMesh, theta: Partition) -> Result<Self> {
        let hat = theta.clone();
        Self::new(mesh, theta, hat)
    }

    pub fn theta(&self) -> &Partition {
        &self.theta
    }

    pub fn theta_hat(&self) -> &Partition {
        &self.theta_hat
    }

    pub fn parent(&self, subsubdomain: usize) -> usize {
        self.parent[subsubdomain]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn subdomain_count(&self) -> usize {
        self.theta.count
    }

    pub fn subsubdomain_count(&self) -> usize {
        self.theta_hat.count
    }

    pub fn is_standard(&self) -> bool {
        self.theta == self.theta_hat
    }
}

fn check_connected(mesh: &StructuredMesh, p: &Partition, what: &str) -> Result<()> {
    let mut seen = vec![false; p.count];
    let mut visited = vec![false; mesh.cell_count()];
    let mut queue = VecDeque::new();
    for start in 0..mesh.cell_count() {
        if visited[start] {
            continue;
        }
        let part = p.part(start);
        if seen[part] {
            return Err(Error::InvalidPartition(format!("{what} {part} is not face-connected")));
        }
        seen[part] = true;
        visited[start] = true;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for nb in mesh.cell_neighbors(c) {
                if !visited[nb] && p.part(nb) == part {
                    visited[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    Ok(())
}

/// Splits every box-shaped subdomain into `s^dim` equal blocks.
/// Subsubdomain ids are subdomain-major: `parent * s^dim + local block`.
pub fn refine_uniform(mesh: &StructuredMesh, theta: &Partition, s: usize) -> Result<PartitionPair> {
    if s == 0 {
        return Err(Error::InvalidPartition("split must be positive".into()));
    }
    let dim = mesh.dim();
    let mut lo = vec![[usize::MAX; 3]; theta.count()];
    let mut hi = vec![[0usize; 3]; theta.count()];
    for c in 0..mesh.cell_count() {
        let g = mesh.cell_coords(c);
        let p = theta.part(c);
        for d in 0..dim {
            lo[p][d] = lo[p][d].min(g[d]);
            hi[p][d] = hi[p][d].max(g[d] + 1);
        }
    }
    let sizes = theta.cells_of();
    for p in 0..theta.count() {
        let vol: usize = (0..dim).map(|d| hi[p][d] - lo[p][d]).product();
        if vol != sizes[p].len() {
            return Err(Error::InvalidPartition(format!("subdomain {p} is not a box")));
        }
        for d in 0..dim {
            let ext = hi[p][d] - lo[p][d];
            if ext % s != 0 {
                return Err(Error::InvalidPartition(format!(
                    "split {s} does not divide subdomain {p} extent {ext} along axis {d}"
                )));
            }
        }
    }
    let per = s.pow(dim as u32);
    let parts = (0..mesh.cell_count())
        .map(|c| {
            let g = mesh.cell_coords(c);
            let p = theta.part(c);
            let mut local = 0;
            for d in (0..dim).rev() {
                let block = (hi[p][d] - lo[p][d]) / s;
                local = local * s + (g[d] - lo[p][d]) / block;
            }
            p * per + local
        })
        .collect();
    PartitionPair::new(mesh, theta.clone(), Partition::new(parts)?)
}

/// Subsubdomains are the face-connected components of equal-α cells inside
/// each subdomain, numbered by their lowest cell.
pub fn refine_by_coefficient(mesh: &StructuredMesh, theta: &Partition, coeff: &CoefficientField) -> Result<PartitionPair> {
    if coeff.len() != mesh.cell_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.cell_count(),
            got: coeff.len(),
        });
    }
    let mut hat = vec![usize::MAX; mesh.cell_count()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..mesh.cell_count() {
        if hat[start] != usize::MAX {
            continue;
        }
        let (p, a) = (theta.part(start), coeff.get(start));
        hat[start] = next;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for nb in mesh.cell_neighbors(c) {
                if hat[nb] == usize::MAX && theta.part(nb) == p && coeff.get(nb) == a {
                    hat[nb] = next;
                    queue.push_back(nb);
                }
            }
        }
        next += 1;
    }
    PartitionPair::new(mesh, theta.clone(), Partition::new(hat)?)
}

/// Per free DOF (in assembled-system order): the sorted subdomains and
/// subsubdomains whose closure contains it.
#[derive(Debug, Clone)]
pub struct MembershipSets {
    pub on_gamma: Vec<Vec<usize>>,
    pub on_gamma_hat: Vec<Vec<usize>>,
}

impl MembershipSets {
    pub fn new(mesh: &StructuredMesh, pair: &PartitionPair) -> Self {
        let (_, dof_to_node) = free_dof_map(mesh);
        let mut on_gamma = Vec::with_capacity(dof_to_node.len());
        let mut on_gamma_hat = Vec::with_capacity(dof_to_node.len());
        for &node in &dof_to_node {
            let cells = mesh.node_cells(node);
            let mut a: Vec<usize> = cells.iter().map(|&c| pair.theta().part(c)).collect();
            let mut b: Vec<usize> = cells.iter().map(|&c| pair.theta_hat().part(c)).collect();
            a.sort_unstable();
            a.dedup();
            b.sort_unstable();
            b.dedup();
            on_gamma.push(a);
            on_gamma_hat.push(b);
        }
        MembershipSets { on_gamma, on_gamma_hat }
    }

    pub fn dof_count(&self) -> usize {
        self.on_gamma.len()
    }

    pub fn is_on_gamma(&self, dof: usize) -> bool {
        self.on_gamma[dof].len() >= 2
    }

    pub fn is_on_gamma_hat(&self, dof: usize) -> bool {
        self.on_gamma_hat[dof].len() >= 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Vertex,
    Edge,
    Face,
}

/// An equivalence class of Γ DOFs sharing one subsubdomain signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceObject {
    pub id: usize,
    pub kind: ObjectKind,
    pub dofs: Vec<usize>,
    pub signature: Vec<usize>,
    pub owners: Vec<usize>,
}

/// Groups the Γ DOFs by identical Θ̂ signature. Objects come out ordered by
/// signature (lexicographic); DOFs within an object ascend.
pub fn classify_objects(mesh: &StructuredMesh, pair: &PartitionPair, membership: &MembershipSets) -> Vec<InterfaceObject> {
    let mut classes: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for dof in 0..membership.dof_count() {
        if membership.is_on_gamma(dof) {
            classes.entry(&membership.on_gamma_hat[dof]).or_default().push(dof);
        }
    }
    classes
        .into_iter()
        .enumerate()
        .map(|(id, (sig, dofs))| {
            let kind = if dofs.len() == 1 {
                ObjectKind::Vertex
            } else if mesh.dim() == 3 && sig.len() == 2 {
                ObjectKind::Face
            } else {
                ObjectKind::Edge
            };
            let owners: BTreeSet<usize> = sig.iter().map(|&j| pair.parent(j)).collect();
            InterfaceObject {
                id,
                kind,
                dofs,
                signature: sig.to_vec(),
                owners: owners.into_iter().collect(),
            }
        })
        .collect()
}

/// Which object kinds carry coarse constraints. In 2D the codimension-one
/// objects are edges, so `faces` has no effect there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Recipe {
    pub vertices: bool,
    pub edges: bool,
    pub faces: bool,
}

impl Recipe {
    pub const VEF: Recipe = Recipe {
        vertices: true,
        edges: true,
        faces: true,
    };

    pub fn selects(&self, kind: ObjectKind) -> bool {
        match kind {
            ObjectKind::Vertex => self.vertices,
            ObjectKind::Edge => self.edges,
            ObjectKind::Face => self.faces,
        }
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut r = Recipe::default();
        for ch in s.chars() {
            let flag = match ch {
                'v' => &mut r.vertices,
                'e' => &mut r.edges,
                'f' => &mut r.faces,
                _ => return Err(Error::Config(format!("unknown recipe flag '{ch}' in \"{s}\""))),
            };
            if *flag {
                return Err(Error::Config(format!("repeated recipe flag '{ch}' in \"{s}\"")));
            }
            *flag = true;
        }
        if r == Recipe::default() {
            return Err(Error::Config("empty constraint recipe".into()));
        }
        Ok(r)
    }
}

impl TryFrom<String> for Recipe {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Recipe> for String {
    fn from(r: Recipe) -> String {
        r.to_string()
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (on, ch) in [(self.vertices, 'v'), (self.edges, 'e'), (self.faces, 'f')] {
            if on {
                write!(f, "{ch}")?;
            }
        }
        Ok(())
    }
}

/// Number of coarse DOFs (one per selected Γ object) for a box split into
/// `subdomains_per_dim` subdomains, each refined into `s` blocks per axis.
///
/// Counts the vertices, edges and faces of the `(N·s)^dim` block grid that
/// lie on Γ and off ∂Ω. Matches [`classify_objects`] whenever every
/// subsubdomain has at least three cells per axis; with two, the pieces
/// touching ∂Ω keep a single free DOF and classify as vertices.
pub fn count_coarse_dofs(subdomains_per_dim: &[usize], s: usize, recipe: Recipe) -> Result<u64> {
    let dim = subdomains_per_dim.len();
    if !(dim == 2 || dim == 3) || s == 0 || subdomains_per_dim.contains(&0) {
        return Err(Error::InvalidPartition(format!(
            "cannot count coarse DOFs for grid {subdomains_per_dim:?} with split {s}"
        )));
    }
    let n: Vec<u64> = subdomains_per_dim.iter().map(|&x| x as u64).collect();
    let m: Vec<u64> = n.iter().map(|&x| x * s as u64).collect();
    let others = |d: usize| (0..dim).filter(move |&e| e != d);

    let vertices = m.iter().map(|x| x - 1).product::<u64>() - (0..dim).map(|d| m[d] - n[d]).product::<u64>();
    // codimension-one block facets lying on Γ planes
    let facets: u64 = (0..dim)
        .map(|d| (n[d] - 1) * others(d).map(|e| m[e]).product::<u64>())
        .sum();
    let (edges, faces) = if dim == 2 {
        (facets, 0)
    } else {
        let edges: u64 = (0..dim)
            .map(|d| {
                let interior: u64 = others(d).map(|e| m[e] - 1).product();
                let off_gamma: u64 = others(d).map(|e| m[e] - n[e]).product();
                m[d] * (interior - off_gamma)
            })
            .sum();
        (edges, facets)
    };
    let mut total = 0;
    if recipe.vertices {
        total += vertices;
    }
    if recipe.edges {
        total += edges;
    }
    if recipe.faces {
        total += faces;
    }
    Ok(total)
}
