//! Standard BDDC and the subobject variant (constraints on objects of a
//! refined partition): weights, constraint selection, setup and
//! application.

mod constraints;
mod operator;
mod weights;

pub use crate::partition::Recipe;
pub use constraints::{full_continuity, select_constraints, ConstraintSet};
pub use operator::{apply_bddc, build_bddc, harmonic_extension, BddcOperator, SubdomainOperator};
pub use weights::{compute_weights, subsubdomain_alpha, WeightingMode, WeightingOperator};
