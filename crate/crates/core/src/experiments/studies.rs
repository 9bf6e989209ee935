//! Level studies, the midpoint sweep and the spectral diagnostics.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::MeshHierarchy;
use crate::solver::{
    estimate_condition, BlockSplit, ConditionMode, PreconditionerKind, SplitOperator,
};
use crate::space::ProblemKind;
use crate::Point;

use super::config::ExperimentConfig;
use super::norms::{convergence_order, ErrorNorms};
use super::Discretization;

/// PCG outcome for one preconditioner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationCount {
    pub preconditioner: PreconditionerKind,
    pub iterations: usize,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub n0: usize,
    pub n1: usize,
    pub errors: Option<ErrorNorms>,
    pub l2_order: Option<f64>,
    pub h1_order: Option<f64>,
    pub h1_seminorm_order: Option<f64>,
    pub kappa: Option<f64>,
    pub iterations: Vec<IterationCount>,
}

impl LevelRow {
    pub fn iterations_for(&self, kind: PreconditionerKind) -> Option<usize> {
        self.iterations
            .iter()
            .find(|c| c.preconditioner == kind)
            .map(|c| c.iterations)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta: f64,
    pub n0: usize,
    pub n1: usize,
    pub kappa: Option<f64>,
    pub iterations: Vec<IterationCount>,
}

impl DeltaRow {
    pub fn iterations_for(&self, kind: PreconditionerKind) -> Option<usize> {
        self.iterations
            .iter()
            .find(|c| c.preconditioner == kind)
            .map(|c| c.iterations)
    }
}

/// Spectral condition numbers of `A_hat`, of `diag(A0, A1)^{-1} A_hat` and of
/// the diagonally scaled `A1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub level: usize,
    pub delta: Option<f64>,
    pub n0: usize,
    pub n1: usize,
    pub kappa_a: f64,
    pub kappa_block: f64,
    pub kappa_a1_scaled: f64,
    /// All estimates converged (always true for the dense solver).
    pub converged: bool,
}

fn solve_all(
    d: &Discretization,
    cfg: &ExperimentConfig,
    context: &str,
) -> Result<(Vec<IterationCount>, Option<Vec<f64>>)> {
    let settings = cfg.settings_for(d.kind);
    let mut counts = Vec::new();
    let mut best: Option<(PreconditionerKind, Vec<f64>)> = None;
    for &kind in &cfg.preconditioners {
        let start = Instant::now();
        let p = crate::solver::make_preconditioner(
            kind,
            &d.system,
            &d.hierarchy,
            d.layout.x0_vertices(),
            &settings,
        )
        .map_err(|e| e.context(format!("{context}, {kind}")))?;
        let setup_seconds = start.elapsed().as_secs_f64();
        let (x, report) =
            crate::solver::pcg(&d.system.a_hat, &d.system.b_hat, &p, cfg.tol, cfg.max_iter)
                .map_err(|e| e.context(format!("{context}, {kind}")))?;
        counts.push(IterationCount {
            preconditioner: kind,
            iterations: report.iterations,
            setup_seconds,
            solve_seconds: report.solve_seconds,
        });
        // errors are reported for the exact block preconditioner when it is run
        if best.is_none() || kind == PreconditionerKind::BlockExact {
            best = Some((kind, x));
        }
    }
    Ok((counts, best.map(|(_, x)| x)))
}

/// Dense eigenvalues up to level 1, Lanczos above.
pub fn condition_mode(level: usize) -> ConditionMode {
    if level <= 1 {
        ConditionMode::Dense
    } else {
        ConditionMode::Lanczos
    }
}

fn condition_of(d: &Discretization, context: &str) -> Result<f64> {
    estimate_condition(&d.system.a_hat, condition_mode(d.level))
        .map(|c| c.kappa)
        .map_err(|e| e.context(format!("{context}, condition number")))
}

fn run_levels(cfg: &ExperimentConfig, kind: ProblemKind) -> Result<Vec<LevelRow>> {
    cfg.validate()?;
    let hierarchy = MeshHierarchy::standard(cfg.max_level);
    let mut rows: Vec<LevelRow> = Vec::new();
    for level in 0..=cfg.max_level {
        let context = match kind {
            ProblemKind::Interface => format!("interface level {level}"),
            ProblemKind::Fictitious => format!("fictitious-domain level {level}"),
        };
        let d = Discretization::new(
            hierarchy.truncated(level),
            kind,
            cfg.center,
            &cfg.coefficients,
            cfg.quadrature_order,
        )
        .map_err(|e| e.context(context.clone()))?;
        let (iterations, x) = solve_all(&d, cfg, &context)?;
        let errors = x.map(|x| d.errors(&x)).transpose()?;
        let previous = rows.last().and_then(|r| r.errors);
        let order = |f: fn(&ErrorNorms) -> f64| match (previous, errors) {
            (Some(p), Some(e)) => Some(convergence_order(f(&p), f(&e))),
            _ => None,
        };
        rows.push(LevelRow {
            level,
            n0: d.n0(),
            n1: d.n1(),
            errors,
            l2_order: order(|e| e.l2),
            h1_order: order(|e| e.h1),
            h1_seminorm_order: order(|e| e.h1_seminorm),
            kappa: if cfg.condition {
                Some(condition_of(&d, &context)?)
            } else {
                None
            },
            iterations,
        });
    }
    Ok(rows)
}

/// Dimensions, errors, orders, `kappa_2(A_hat)` and PCG iterations for the
/// interface problem on levels `0..=max_level`.
pub fn run_interface_study(cfg: &ExperimentConfig) -> Result<Vec<LevelRow>> {
    run_levels(cfg, ProblemKind::Interface)
}

/// Same table for the fictitious-domain problem.
pub fn run_fd_study(cfg: &ExperimentConfig) -> Result<Vec<LevelRow>> {
    run_levels(cfg, ProblemKind::Fictitious)
}

fn shifted(delta: f64) -> Point {
    [delta, 2.0 * delta, 3.0 * delta]
}

/// Interface problem at `delta_level` with the ball centred at `(d, 2d, 3d)`.
pub fn run_delta_sweep(cfg: &ExperimentConfig) -> Result<Vec<DeltaRow>> {
    cfg.validate()?;
    let hierarchy = MeshHierarchy::standard(cfg.delta_level);
    cfg.deltas
        .iter()
        .map(|&delta| {
            let context = format!("delta {delta}");
            let d = Discretization::new(
                hierarchy.clone(),
                ProblemKind::Interface,
                shifted(delta),
                &cfg.coefficients,
                cfg.quadrature_order,
            )
            .map_err(|e| e.context(context.clone()))?;
            let (iterations, _) = solve_all(&d, cfg, &context)?;
            Ok(DeltaRow {
                delta,
                n0: d.n0(),
                n1: d.n1(),
                kappa: if cfg.condition {
                    Some(condition_of(&d, &context)?)
                } else {
                    None
                },
                iterations,
            })
        })
        .collect()
}

fn condition_row(d: &Discretization, delta: Option<f64>) -> Result<ConditionRow> {
    let sys = &d.system;
    let mode = condition_mode(d.level);
    let a = estimate_condition(&sys.a_hat, mode)?;
    let block = estimate_condition(
        &SplitOperator::new(&sys.a_hat, BlockSplit::new(&sys.a0, &sys.a1)?)?,
        mode,
    )?;
    let a1 = if sys.n1 > 0 {
        estimate_condition(&sys.a1.symmetric_scale(&sys.d1), mode)?
    } else {
        return Err(Error::InvalidInput("no cut dofs, A1 is empty".into()));
    };
    Ok(ConditionRow {
        level: d.level,
        delta,
        n0: sys.n0,
        n1: sys.n1,
        kappa_a: a.kappa,
        kappa_block: block.kappa,
        kappa_a1_scaled: a1.kappa,
        converged: a.converged && block.converged && a1.converged,
    })
}

/// Condition numbers on levels `0..=max_level` at `center`, followed by the
/// midpoint sweep at `delta_level` (skipped when `deltas` is empty).
pub fn condition_study(cfg: &ExperimentConfig) -> Result<Vec<ConditionRow>> {
    cfg.validate()?;
    let top = cfg.max_level.max(cfg.delta_level);
    let hierarchy = MeshHierarchy::standard(top);
    let mut rows = Vec::new();
    for level in 0..=cfg.max_level {
        let d = Discretization::new(
            hierarchy.truncated(level),
            cfg.problem,
            cfg.center,
            &cfg.coefficients,
            cfg.quadrature_order,
        )?;
        rows.push(condition_row(&d, None).map_err(|e| e.context(format!("level {level}")))?);
    }
    for &delta in &cfg.deltas {
        let d = Discretization::new(
            hierarchy.truncated(cfg.delta_level),
            cfg.problem,
            shifted(delta),
            &cfg.coefficients,
            cfg.quadrature_order,
        )?;
        rows.push(condition_row(&d, Some(delta)).map_err(|e| e.context(format!("delta {delta}")))?);
    }
    Ok(rows)
}
