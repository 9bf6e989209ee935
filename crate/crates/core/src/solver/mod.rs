//! PCG, smoothers, multigrid, the block preconditioners and spectral diagnostics.

mod block;
mod cholesky;
mod eigen;
mod multigrid;
mod sgs;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{axpy, dot, norm2, CsrMatrix};

pub use block::{
    exact_solver, make_preconditioner, BlockJacobi, DirectSolver, InnerCg, PreconditionerSettings,
};
pub use cholesky::{reverse_cuthill_mckee, SkylineCholesky};
pub use eigen::{
    estimate_condition, BlockSplit, ConditionEstimate, ConditionMode, EigenMethod, SplitOperator,
    DENSE_LIMIT,
};
pub use multigrid::{build_mg_hierarchy, MultigridHierarchy};
pub use sgs::{sgs_apply, sgs_sweep, SymmetricGaussSeidel};

/// A symmetric linear map `x -> y`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}

/// Action of `P^{-1}`.
pub trait Preconditioner {
    fn dim(&self) -> usize;
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

/// `P = I`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityPreconditioner(pub usize);

impl Preconditioner for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        (**self).apply(r, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionerKind {
    /// One symmetric Gauss-Seidel sweep on the whole matrix.
    Sgs,
    /// `P_A`: exact solves with both diagonal blocks.
    BlockExact,
    /// `P_D`: exact solve with `A0`, Gauss-Seidel on `A1`.
    BlockDiagSgs,
    /// `P_B`: multigrid on `A0`, Gauss-Seidel on `A1`.
    BlockMgSgs,
}

impl PreconditionerKind {
    pub const ALL: [PreconditionerKind; 4] = [
        PreconditionerKind::Sgs,
        PreconditionerKind::BlockExact,
        PreconditionerKind::BlockDiagSgs,
        PreconditionerKind::BlockMgSgs,
    ];

    pub const BLOCK: [PreconditionerKind; 3] = [
        PreconditionerKind::BlockExact,
        PreconditionerKind::BlockDiagSgs,
        PreconditionerKind::BlockMgSgs,
    ];

    /// Short column label.
    pub fn label(self) -> &'static str {
        match self {
            PreconditionerKind::Sgs => "SGS",
            PreconditionerKind::BlockExact => "P_A",
            PreconditionerKind::BlockDiagSgs => "P_D",
            PreconditionerKind::BlockMgSgs => "P_B",
        }
    }

    pub fn is_block(self) -> bool {
        self != PreconditionerKind::Sgs
    }
}

impl std::fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "sgs" => Ok(Self::Sgs),
            "p-a" | "pa" | "block-exact" => Ok(Self::BlockExact),
            "p-d" | "pd" | "block-diag-sgs" => Ok(Self::BlockDiagSgs),
            "p-b" | "pb" | "block-mg-sgs" => Ok(Self::BlockMgSgs),
            _ => Err(Error::InvalidInput(format!("unknown preconditioner '{s}'"))),
        }
    }
}

/// Outcome of a PCG solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `|P^{-1} r_k| / |P^{-1} r_0|` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    pub solve_seconds: f64,
}

impl SolveReport {
    pub fn final_relative_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&0.0)
    }
}

/// Preconditioned CG from `x0 = 0`, stopped once
/// `|P^{-1}(b - A x_k)|_2 <= tol |P^{-1} b|_2`.
pub fn pcg<A, P>(
    a: &A,
    b: &[f64],
    p: &P,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport)>
where
    A: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let n = a.dim();
    if b.len() != n || p.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator {n}, rhs {}, preconditioner {}",
            b.len(),
            p.dim()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let start = Instant::now();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    p.apply(&r, &mut z);
    let z0 = norm2(&z);
    let mut history = vec![1.0];
    if z0 == 0.0 {
        return Ok((
            x,
            SolveReport {
                iterations: 0,
                residual_history: vec![0.0],
                solve_seconds: start.elapsed().as_secs_f64(),
            },
        ));
    }
    let mut rz = dot(&r, &z);
    if !(rz > 0.0) {
        return Err(Error::IndefinitePreconditioner {
            iteration: 0,
            value: rz,
        });
    }
    let mut d = z.clone();
    let mut q = vec![0.0; n];
    for k in 1..=max_iter {
        a.apply(&d, &mut q);
        let alpha = rz / dot(&d, &q);
        axpy(alpha, &d, &mut x);
        axpy(-alpha, &q, &mut r);
        p.apply(&r, &mut z);
        let rel = norm2(&z) / z0;
        history.push(rel);
        if rel <= tol {
            return Ok((
                x,
                SolveReport {
                    iterations: k,
                    residual_history: history,
                    solve_seconds: start.elapsed().as_secs_f64(),
                },
            ));
        }
        let rz_new = dot(&r, &z);
        if !(rz_new > 0.0) {
            return Err(Error::IndefinitePreconditioner {
                iteration: k,
                value: rz_new,
            });
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for (di, zi) in d.iter_mut().zip(&z) {
            *di = zi + beta * *di;
        }
    }
    Err(Error::MaxIterations {
        max_iter,
        relative_residual: *history.last().unwrap(),
    })
}
