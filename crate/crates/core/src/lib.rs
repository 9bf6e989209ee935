//! Stabilized Nitsche CutFEM for the Poisson interface and fictitious-domain
//! problems, together with block-Jacobi preconditioners built on the splitting
//! of the unfitted space into the standard conforming space and the space of
//! cut basis functions near the interface.
//!
//! The crate is organized bottom-up:
//!
//! * [`mesh`]: structured Kuhn meshes of a box and their red-refinement hierarchy.
//! * [`geometry`]: level sets, cut classification and sub-tessellation quadrature.
//! * [`space`]: P1 index sets and the two degree-of-freedom layouts.
//! * [`sparse`]: CSR storage and the sparse kernels used everywhere else.
//! * [`assembly`]: Nitsche/ghost-penalty systems and the split-basis transform.
//! * [`solver`]: PCG, Gauss-Seidel, geometric multigrid, block preconditioners
//!   and condition number estimation.
//! * [`experiments`]: manufactured solutions, error norms and the table drivers.

pub mod assembly;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod mesh;
pub mod solver;
pub mod space;
pub mod sparse;

pub use assembly::{
    assemble_fd, assemble_interface, build_l, build_l_fd, transform, AssembledSystem, ElementSize,
    GhostScaling, PenaltyAverage, ProblemCoefficients, ProblemData, TransformedSystem,
};
pub use error::{Error, Result};
pub use experiments::{Discretization, ExperimentConfig};
pub use geometry::{classify, CutInfo, LevelSet, Sphere, TetClass};
pub use mesh::{build_initial_mesh, refine_uniform, BoxDomain, Mesh, MeshHierarchy};
pub use solver::{
    estimate_condition, pcg, ConditionEstimate, Preconditioner, PreconditionerKind, SolveReport,
};
pub use space::{build_dof_layout, build_index_sets, DofLayout, IndexSets, ProblemKind};
pub use sparse::CsrMatrix;

pub type Point = [f64; 3];
