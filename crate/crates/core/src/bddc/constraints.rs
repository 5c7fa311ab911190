use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::mesh::StructuredMesh;
use crate::partition::{InterfaceObject, ObjectKind, PartitionPair, Recipe};

/// The selected coarse objects. Coarse DOF `k` is the constraint on
/// `objects[k]`: a point value for vertices, an unweighted mean otherwise.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub recipe: Recipe,
    pub objects: Vec<InterfaceObject>,
}

impl ConstraintSet {
    pub fn coarse_count(&self) -> usize {
        self.objects.len()
    }

    /// Constraint weights over the object's DOFs.
    pub fn row_values(object: &InterfaceObject) -> Vec<f64> {
        match object.kind {
            ObjectKind::Vertex => vec![1.0],
            _ => vec![1.0 / object.dofs.len() as f64; object.dofs.len()],
        }
    }

    /// Selected objects touching each subdomain, as indices into `objects`.
    pub fn per_subdomain(&self, subdomain_count: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); subdomain_count];
        for (k, obj) in self.objects.iter().enumerate() {
            for &i in &obj.owners {
                out[i].push(k);
            }
        }
        out
    }
}

/// Every interface DOF as its own vertex constraint: the coarse space then
/// enforces full continuity.
pub fn full_continuity(objects: &[InterfaceObject]) -> ConstraintSet {
    let mut out = Vec::new();
    for obj in objects {
        for &dof in &obj.dofs {
            out.push(InterfaceObject {
                id: out.len(),
                kind: ObjectKind::Vertex,
                dofs: vec![dof],
                signature: obj.signature.clone(),
                owners: obj.owners.clone(),
            });
        }
    }
    ConstraintSet {
        recipe: Recipe {
            vertices: true,
            edges: false,
            faces: false,
        },
        objects: out,
    }
}

/// Keeps the objects whose kind the recipe selects, then checks that the
/// selection is sufficient:
///
/// * every subdomain away from the Dirichlet boundary carries at least one
///   constraint (otherwise its local problem is singular);
/// * every pair of subsubdomains from different subdomains that meet on Γ is
///   joined by a path of subsubdomains, consecutive ones sharing a selected
///   object or lying face-adjacent in one subdomain. With `alpha` (one value
///   per subsubdomain) the path may only visit subsubdomains whose α is at
///   least the smaller α of the pair.
pub fn select_constraints(
    mesh: &StructuredMesh,
    pair: &PartitionPair,
    objects: &[InterfaceObject],
    recipe: Recipe,
    alpha: Option<&[f64]>,
) -> Result<ConstraintSet> {
    let selected: Vec<InterfaceObject> = objects
        .iter()
        .filter(|o| recipe.selects(o.kind))
        .cloned()
        .enumerate()
        .map(|(k, mut o)| {
            o.id = k;
            o
        })
        .collect();

    let touches = touches_boundary(mesh, pair);
    let mut constrained = vec![false; pair.subdomain_count()];
    for o in &selected {
        for &i in &o.owners {
            constrained[i] = true;
        }
    }
    let floating: Vec<usize> = (0..pair.subdomain_count())
        .filter(|&i| !touches[i] && !constrained[i])
        .collect();
    if !floating.is_empty() {
        return Err(Error::Underconstrained(format!(
            "recipe \"{recipe}\" leaves subdomain(s) {floating:?} without constraints"
        )));
    }

    check_paths(mesh, pair, objects, &selected, alpha)?;
    Ok(ConstraintSet {
        recipe,
        objects: selected,
    })
}

fn touches_boundary(mesh: &StructuredMesh, pair: &PartitionPair) -> Vec<bool> {
    let mut touches = vec![false; pair.subdomain_count()];
    for c in 0..mesh.cell_count() {
        let i = pair.theta().part(c);
        if !touches[i] && mesh.cell_nodes(c).into_iter().any(|n| mesh.is_boundary_node(n)) {
            touches[i] = true;
        }
    }
    touches
}

fn check_paths(
    mesh: &StructuredMesh,
    pair: &PartitionPair,
    all: &[InterfaceObject],
    selected: &[InterfaceObject],
    alpha: Option<&[f64]>,
) -> Result<()> {
    let nhat = pair.subsubdomain_count();
    let mut links: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nhat];
    let mut link = |a: usize, b: usize| {
        if a != b {
            links[a].insert(b);
            links[b].insert(a);
        }
    };
    for o in selected {
        for (x, &a) in o.signature.iter().enumerate() {
            for &b in &o.signature[x + 1..] {
                link(a, b);
            }
        }
    }
    let hat = pair.theta_hat();
    for c in 0..mesh.cell_count() {
        for nb in mesh.cell_neighbors(c) {
            let (a, b) = (hat.part(c), hat.part(nb));
            if pair.parent(a) == pair.parent(b) {
                link(a, b);
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for o in all {
        for (x, &a) in o.signature.iter().enumerate() {
            for &b in &o.signature[x + 1..] {
                if pair.parent(a) != pair.parent(b) {
                    pairs.insert((a, b));
                }
            }
        }
    }
    let mut seen = vec![usize::MAX; nhat];
    let mut queue = VecDeque::new();
    for (stamp, &(a, b)) in pairs.iter().enumerate() {
        let floor = alpha.map_or(f64::NEG_INFINITY, |al| al[a].min(al[b]));
        let admissible = |k: usize| alpha.is_none_or(|al| al[k] >= floor);
        queue.clear();
        queue.push_back(a);
        seen[a] = stamp;
        let mut found = false;
        while let Some(k) = queue.pop_front() {
            if k == b {
                found = true;
                break;
            }
            for &nb in &links[k] {
                if seen[nb] != stamp && admissible(nb) {
                    seen[nb] = stamp;
                    queue.push_back(nb);
                }
            }
        }
        if !found {
            return Err(Error::NoAcceptablePath { first: a, second: b });
        }
    }
    Ok(())
}
