//! Block-Jacobi preconditioners over the splitting `x = (x0, x1)`.

use serde::{Deserialize, Serialize};

use crate::assembly::TransformedSystem;
use crate::error::{Error, Result};
use crate::mesh::MeshHierarchy;
use crate::space::ProblemKind;
use crate::sparse::{axpy, dot, norm2, CsrMatrix};

use super::cholesky::SkylineCholesky;
use super::multigrid::build_mg_hierarchy;
use super::sgs::SymmetricGaussSeidel;
use super::{IdentityPreconditioner, Preconditioner, PreconditionerKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreconditionerSettings {
    /// V-cycles per application of the multigrid block.
    pub mg_cycles: usize,
    /// Gauss-Seidel sweeps per application of the `A1` block in `P_D`, `P_B`.
    pub a1_sweeps: usize,
    /// Exact blocks larger than this are solved by inner CG.
    pub direct_max_dofs: usize,
    /// Same, measured by the envelope of the Cholesky factor.
    pub direct_max_envelope: usize,
    /// Relative residual of the inner CG fallback.
    pub inner_tol: f64,
}

impl Default for PreconditionerSettings {
    fn default() -> Self {
        Self {
            mg_cycles: 3,
            a1_sweeps: 1,
            direct_max_dofs: 500_000,
            direct_max_envelope: 150_000_000,
            inner_tol: 1e-12,
        }
    }
}

impl PreconditionerSettings {
    /// Defaults per problem: three Gauss-Seidel sweeps on `A1` for the
    /// fictitious-domain problem, one for the interface problem.
    pub fn for_problem(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::Interface => Self::default(),
            ProblemKind::Fictitious => Self {
                a1_sweeps: 3,
                ..Self::default()
            },
        }
    }
}

/// Exact solve through a Cholesky factorization.
#[derive(Debug, Clone)]
pub struct DirectSolver(pub SkylineCholesky);

impl Preconditioner for DirectSolver {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(&self.0.solve(r));
    }
}

/// Gauss-Seidel preconditioned CG run to a tight tolerance.
#[derive(Debug, Clone)]
pub struct InnerCg {
    matrix: CsrMatrix,
    smoother: SymmetricGaussSeidel,
    tol: f64,
}

impl InnerCg {
    pub fn new(matrix: CsrMatrix, tol: f64) -> Result<Self> {
        let smoother = SymmetricGaussSeidel::new(matrix.clone(), 1)?;
        Ok(Self {
            matrix,
            smoother,
            tol,
        })
    }
}

impl Preconditioner for InnerCg {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        x.fill(0.0);
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return;
        }
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        self.smoother.apply(&r, &mut z);
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        let mut q = vec![0.0; n];
        for _ in 0..10 * n.max(10) {
            self.matrix.matvec_into(&d, &mut q);
            let alpha = rz / dot(&d, &q);
            axpy(alpha, &d, x);
            axpy(-alpha, &q, &mut r);
            if norm2(&r) <= self.tol * bnorm {
                return;
            }
            self.smoother.apply(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (di, zi) in d.iter_mut().zip(&z) {
                *di = zi + beta * *di;
            }
        }
    }
}

/// `diag(B0, B1)^{-1}` applied blockwise.
pub struct BlockJacobi {
    n0: usize,
    b0: Box<dyn Preconditioner>,
    b1: Box<dyn Preconditioner>,
}

impl BlockJacobi {
    pub fn new(b0: Box<dyn Preconditioner>, b1: Box<dyn Preconditioner>) -> Self {
        Self {
            n0: b0.dim(),
            b0,
            b1,
        }
    }
}

impl Preconditioner for BlockJacobi {
    fn dim(&self) -> usize {
        self.n0 + self.b1.dim()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let (r0, r1) = r.split_at(self.n0);
        let (z0, z1) = z.split_at_mut(self.n0);
        self.b0.apply(r0, z0);
        self.b1.apply(r1, z1);
    }
}

/// Exact solver for `m`: Cholesky when it fits, inner CG otherwise.
pub fn exact_solver(
    m: &CsrMatrix,
    settings: &PreconditionerSettings,
) -> Result<Box<dyn Preconditioner>> {
    if m.nrows() == 0 {
        return Ok(Box::new(IdentityPreconditioner(0)));
    }
    if m.nrows() <= settings.direct_max_dofs
        && SkylineCholesky::envelope_size(m) <= settings.direct_max_envelope
    {
        Ok(Box::new(DirectSolver(SkylineCholesky::factor(m)?)))
    } else {
        Ok(Box::new(InnerCg::new(m.clone(), settings.inner_tol)?))
    }
}

fn sgs_block(m: &CsrMatrix, sweeps: usize) -> Result<Box<dyn Preconditioner>> {
    if m.nrows() == 0 {
        return Ok(Box::new(IdentityPreconditioner(0)));
    }
    Ok(Box::new(SymmetricGaussSeidel::new(m.clone(), sweeps)?))
}

/// Builds `kind` for `system`.
///
/// `hierarchy` must end at the mesh the system lives on and `x0_vertices[k]` is
/// the vertex of split coordinate `k < n0`; both are only used by
/// [`PreconditionerKind::BlockMgSgs`].
pub fn make_preconditioner(
    kind: PreconditionerKind,
    system: &TransformedSystem,
    hierarchy: &MeshHierarchy,
    x0_vertices: &[usize],
    settings: &PreconditionerSettings,
) -> Result<Box<dyn Preconditioner>> {
    if x0_vertices.len() != system.n0 {
        return Err(Error::DimensionMismatch(format!(
            "{} x0 vertices for n0 = {}",
            x0_vertices.len(),
            system.n0
        )));
    }
    let p: Box<dyn Preconditioner> = match kind {
        PreconditionerKind::Sgs => Box::new(SymmetricGaussSeidel::new(system.a_hat.clone(), 1)?),
        PreconditionerKind::BlockExact => Box::new(BlockJacobi::new(
            exact_solver(&system.a0, settings)?,
            exact_solver(&system.a1, settings)?,
        )),
        PreconditionerKind::BlockDiagSgs => Box::new(BlockJacobi::new(
            exact_solver(&system.a0, settings)?,
            sgs_block(&system.a1, settings.a1_sweeps)?,
        )),
        PreconditionerKind::BlockMgSgs => Box::new(BlockJacobi::new(
            Box::new(build_mg_hierarchy(
                &system.a0,
                hierarchy,
                x0_vertices,
                settings.mg_cycles,
            )?),
            sgs_block(&system.a1, settings.a1_sweeps)?,
        )),
    };
    Ok(p)
}
