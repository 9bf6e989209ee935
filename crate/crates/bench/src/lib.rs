//! Shared setup for the benchmarks.

use cutsplit::{Discretization, ExperimentConfig, MeshHierarchy, ProblemKind};

/// Default interface problem on `level`.
pub fn interface_problem(level: usize) -> Discretization {
    problem(level, ProblemKind::Interface)
}

pub fn problem(level: usize, kind: ProblemKind) -> Discretization {
    let cfg = ExperimentConfig::default();
    Discretization::new(
        MeshHierarchy::standard(level),
        kind,
        cfg.center,
        &cfg.coefficients,
        cfg.quadrature_order,
    )
    .expect("default problem builds")
}
