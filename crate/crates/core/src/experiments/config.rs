use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::ProblemCoefficients;
use crate::error::{Error, Result};
use crate::geometry::DEFAULT_QUADRATURE_ORDER;
use crate::solver::{PreconditionerKind, PreconditionerSettings};
use crate::space::ProblemKind;
use crate::Point;

/// Parameters of a study, readable from TOML.
///
/// Every field has a default, so an empty file is a valid configuration:
///
/// ```toml
/// problem = "interface"
/// max_level = 3
/// center = [0.001, 0.002, 0.003]
///
/// [coefficients]
/// gamma = 10.0
/// beta = 0.1
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub max_level: usize,
    /// Midpoint of the unit ball.
    pub center: Point,
    /// Shifts of the midpoint `(d, 2d, 3d)` for the delta sweep.
    pub deltas: Vec<f64>,
    /// Mesh level of the delta sweep.
    pub delta_level: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub preconditioners: Vec<PreconditionerKind>,
    pub quadrature_order: usize,
    /// Estimate `kappa_2(A_hat)` for every row.
    pub condition: bool,
    pub coefficients: ProblemCoefficients,
    /// Defaults depend on `problem` when absent.
    pub preconditioner: Option<PreconditionerSettings>,
    /// Directory for CSV and Markdown tables.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Interface,
            max_level: 3,
            center: [0.001, 0.002, 0.003],
            deltas: vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05],
            delta_level: 2,
            tol: 1e-6,
            max_iter: 2000,
            preconditioners: PreconditionerKind::ALL.to_vec(),
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            condition: true,
            coefficients: ProblemCoefficients::default(),
            preconditioner: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn fictitious() -> Self {
        Self {
            problem: ProblemKind::Fictitious,
            ..Self::default()
        }
    }

    /// Nitsche without ghost penalty: `beta = 0`, `gamma = 100`.
    pub fn unstabilized(mut self) -> Self {
        self.coefficients.beta = 0.0;
        self.coefficients.gamma = 100.0;
        self
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn preconditioner_settings(&self) -> PreconditionerSettings {
        self.settings_for(self.problem)
    }

    /// Explicit settings if given, else the defaults for `kind`.
    pub fn settings_for(&self, kind: ProblemKind) -> PreconditionerSettings {
        self.preconditioner
            .unwrap_or_else(|| PreconditionerSettings::for_problem(kind))
    }

    pub fn validate(&self) -> Result<()> {
        self.coefficients.validate()?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if self.max_level > 6 || self.delta_level > 6 {
            return Err(Error::Config("levels above 6 are not supported".into()));
        }
        if !(1..=5).contains(&self.quadrature_order) {
            return Err(Error::Config(format!(
                "quadrature_order must be 1..=5, got {}",
                self.quadrature_order
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) || self.deltas.iter().any(|d| !d.is_finite())
        {
            return Err(Error::Config("center and deltas must be finite".into()));
        }
        if let Some(p) = &self.preconditioner {
            if p.mg_cycles == 0 || p.a1_sweeps == 0 || !(p.inner_tol > 0.0) {
                return Err(Error::Config(
                    "preconditioner settings must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}
