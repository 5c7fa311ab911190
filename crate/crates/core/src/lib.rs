//! BDDC preconditioning for Q1 finite-element Poisson problems on boxes,
//! including the variant whose coarse constraints live on the subobjects
//! (subfaces, subedges and the vertices between them) of a refined
//! partition.
//!
//! The pipeline is:
//!
//! 1. [`mesh`]: structured mesh, coefficient field and assembled system.
//! 2. [`partition`]: coarse partition, refined partition and the interface
//!    objects induced by the refined one.
//! 3. [`bddc`]: weights, constraint selection and the preconditioner.
//! 4. [`krylov`]: PCG with a Lanczos condition-number estimate.
//!
//! [`problems`] generates the coefficient fields used by the experiments and
//! [`experiment`] wires everything into config-driven runs and reports.

// `!(x > 0.0)` is used on purpose so NaN takes the failure branch
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bddc;
pub mod error;
pub mod experiment;
pub mod krylov;
pub mod linalg;
pub mod mesh;
pub mod partition;
pub mod problems;

pub use bddc::{
    build_bddc, compute_weights, select_constraints, BddcOperator, ConstraintSet, Recipe,
    WeightingMode, WeightingOperator,
};
pub use error::{Error, Result};
pub use krylov::{pcg, PcgOptions, SolveReport};
pub use mesh::{assemble, build_mesh, element_stiffness, AssembledSystem, CoefficientField, StructuredMesh};
pub use partition::{
    classify_objects, count_coarse_dofs, partition_uniform, refine_by_coefficient, refine_uniform,
    InterfaceObject, MembershipSets, ObjectKind, Partition, PartitionPair,
};
