//! Manufactured solutions, error norms and the table drivers.

mod config;
mod norms;
mod solutions;
mod studies;
mod tables;

use crate::assembly::{
    assemble_fd, assemble_interface, build_l, build_l_fd, transform, AssembledSystem,
    ProblemCoefficients, TransformedSystem,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::geometry::{CutInfo, Sphere};
use crate::mesh::{write_ascii, MeshHierarchy};
use crate::solver::{
    make_preconditioner, pcg, PreconditionerKind, PreconditionerSettings, SolveReport,
};
use crate::space::{build_dof_layout, build_index_sets, DofLayout, ProblemKind};
use crate::Point;

pub use config::ExperimentConfig;
pub use norms::{convergence_order, error_norms, ErrorNorms};
pub use solutions::{AffineSolution, ExactSolution, FictitiousSolution, InterfaceSolution};
pub use studies::{
    condition_mode, condition_study, run_delta_sweep, run_fd_study, run_interface_study,
    ConditionRow, DeltaRow, IterationCount, LevelRow,
};
pub use tables::{write_csv, write_markdown, Table};

/// Everything needed to solve one problem on one mesh level.
pub struct Discretization {
    pub level: usize,
    pub kind: ProblemKind,
    /// Levels `0..=level`.
    pub hierarchy: MeshHierarchy,
    pub cut: CutInfo,
    pub layout: DofLayout,
    pub assembled: AssembledSystem,
    pub system: TransformedSystem,
    pub exact: Box<dyn ExactSolution>,
}

impl Discretization {
    /// Builds the manufactured-solution problem of `kind` around the unit
    /// sphere centred at `center`, on the finest level of `hierarchy`.
    pub fn new(
        hierarchy: MeshHierarchy,
        kind: ProblemKind,
        center: Point,
        coeffs: &ProblemCoefficients,
        quadrature_order: usize,
    ) -> Result<Self> {
        let exact: Box<dyn ExactSolution> = match kind {
            ProblemKind::Interface => {
                Box::new(InterfaceSolution::new(center, coeffs.alpha1, coeffs.alpha2))
            }
            ProblemKind::Fictitious => Box::new(FictitiousSolution::new(center)),
        };
        Self::with_solution(hierarchy, kind, center, coeffs, quadrature_order, exact)
    }

    /// Same with the data taken from `exact`.
    pub fn with_solution(
        hierarchy: MeshHierarchy,
        kind: ProblemKind,
        center: Point,
        coeffs: &ProblemCoefficients,
        quadrature_order: usize,
        exact: Box<dyn ExactSolution>,
    ) -> Result<Self> {
        let level = hierarchy.finest_level();
        let mesh = hierarchy.level(level);
        let cut = CutInfo::new(mesh, &Sphere::unit(center), quadrature_order)?;
        let layout = build_dof_layout(&build_index_sets(mesh, &cut, kind)?);
        let (assembled, l) = match kind {
            ProblemKind::Interface => (
                assemble_interface(mesh, &cut, &layout, coeffs, exact.as_ref())?,
                build_l(&layout)?,
            ),
            ProblemKind::Fictitious => (
                assemble_fd(mesh, &cut, &layout, coeffs, exact.as_ref())?,
                build_l_fd(&layout)?,
            ),
        };
        let system = transform(&assembled, &l, layout.n0())?;
        Ok(Self {
            level,
            kind,
            hierarchy,
            cut,
            layout,
            assembled,
            system,
            exact,
        })
    }

    pub fn n0(&self) -> usize {
        self.system.n0
    }

    pub fn n1(&self) -> usize {
        self.system.n1
    }

    /// PCG on the split system; returns split coordinates and the report.
    pub fn solve(
        &self,
        kind: PreconditionerKind,
        settings: &PreconditionerSettings,
        tol: f64,
        max_iter: usize,
    ) -> Result<(Vec<f64>, SolveReport)> {
        let p = make_preconditioner(
            kind,
            &self.system,
            &self.hierarchy,
            self.layout.x0_vertices(),
            settings,
        )?;
        pcg(&self.system.a_hat, &self.system.b_hat, &p, tol, max_iter)
    }

    /// Errors of the discrete solution given in split coordinates.
    pub fn errors(&self, x_hat: &[f64]) -> Result<ErrorNorms> {
        let x = self.system.to_cutfem(x_hat);
        error_norms(
            self.hierarchy.level(self.level),
            &self.cut,
            &self.layout,
            &x,
            self.exact.as_ref(),
        )
    }

    /// Writes `A`, `L`, `A_hat`, `A0`, `A1` in Matrix Market format, the mesh
    /// dump, and the vertex of every split coordinate into `dir`.
    pub fn export(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let sys = &self.system;
        let mut written = Vec::new();
        for (name, m) in [
            ("A", &sys.a),
            ("L", &sys.l),
            ("A_hat", &sys.a_hat),
            ("A0", &sys.a0),
            ("A1", &sys.a1),
        ] {
            let path = dir.join(format!("{name}.mtx"));
            let mut w = BufWriter::new(File::create(&path)?);
            m.write_matrix_market(&mut w)?;
            w.flush()?;
            written.push(path);
        }
        let path = dir.join("mesh.txt");
        let mut w = BufWriter::new(File::create(&path)?);
        write_ascii(self.hierarchy.level(self.level), &mut w)?;
        w.flush()?;
        written.push(path);
        let path = dir.join("split_vertices.txt");
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "# block vertex (0-based), one line per column of L")?;
        for &v in self.layout.x0_vertices() {
            writeln!(w, "x0 {v}")?;
        }
        for &v in self.layout.x1_vertices() {
            writeln!(w, "x1 {v}")?;
        }
        w.flush()?;
        written.push(path);
        Ok(written)
    }
}

#[cfg(test)]
mod tests;
