//! Nitsche/ghost-penalty systems and the split-basis transform.

mod nitsche;
mod transform;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Side;
use crate::space::ProblemKind;
use crate::sparse::{CsrMatrix, TripletBuilder};
use crate::Point;

pub use nitsche::{assemble_fd, assemble_interface, element_stiffness};
pub use transform::{build_l, build_l_fd, transform, TransformedSystem};

/// How `alpha_bar` in the interface penalty is formed from `alpha_1, alpha_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyAverage {
    #[default]
    Max,
    Arithmetic,
    Harmonic,
}

/// Local mesh size `h` in the Nitsche and ghost-penalty terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ElementSize {
    /// Longest edge of the tet (of the facet for ghost penalties).
    Diameter,
    /// Grid spacing `h_l` of the mesh level.
    #[default]
    GridSpacing,
}

/// Weight of the ghost penalty on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GhostScaling {
    /// `beta` on both sides.
    Unit,
    /// `beta * alpha_i` on side `i`.
    #[default]
    Diffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma: f64,
    pub beta: f64,
    pub penalty_average: PenaltyAverage,
    pub element_size: ElementSize,
    pub ghost_scaling: GhostScaling,
}

impl Default for ProblemCoefficients {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 10.0,
            gamma: 10.0,
            beta: 0.1,
            penalty_average: PenaltyAverage::Max,
            element_size: ElementSize::GridSpacing,
            ghost_scaling: GhostScaling::Diffusion,
        }
    }
}

impl ProblemCoefficients {
    /// Unit diffusion, as used by the fictitious-domain problem.
    pub fn unit_diffusion(gamma: f64, beta: f64) -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            gamma,
            beta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 > 0.0 && self.alpha2 > 0.0) {
            return Err(Error::InvalidInput(
                "diffusion coefficients must be positive".into(),
            ));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidInput(
                "Nitsche parameter must be positive".into(),
            ));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidInput(
                "ghost-penalty parameter must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn alpha(&self, side: Side) -> f64 {
        match side {
            Side::Inside => self.alpha1,
            Side::Outside => self.alpha2,
        }
    }

    /// Ghost-penalty parameter on `side`.
    pub fn ghost_weight(&self, side: Side) -> f64 {
        match self.ghost_scaling {
            GhostScaling::Unit => self.beta,
            GhostScaling::Diffusion => self.beta * self.alpha(side),
        }
    }

    pub fn alpha_bar(&self) -> f64 {
        let (a, b) = (self.alpha1, self.alpha2);
        match self.penalty_average {
            PenaltyAverage::Max => a.max(b),
            PenaltyAverage::Arithmetic => 0.5 * (a + b),
            PenaltyAverage::Harmonic => 2.0 * a * b / (a + b),
        }
    }
}

/// Right-hand side and Dirichlet data.
///
/// For the interface problem `dirichlet(side, x)` is the boundary value of `u_side`
/// on the box boundary; for the fictitious-domain problem `dirichlet(Inside, x)`
/// is the interface datum `g`.
pub trait ProblemData: Sync {
    fn source(&self, side: Side, x: &Point) -> f64;
    fn dirichlet(&self, side: Side, x: &Point) -> f64;
}

/// `A x = b` in the CutFEM basis after eliminating Dirichlet vertices.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub kind: ProblemKind,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LocalDof {
    Free(usize),
    Fixed(f64),
}

/// Adds element contributions, moving fixed columns to the right-hand side.
pub(crate) struct Scatter {
    builder: TripletBuilder,
    rhs: Vec<f64>,
}

impl Scatter {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            builder: TripletBuilder::new(n, n),
            rhs: vec![0.0; n],
        }
    }

    /// `ke` is row-major `dofs.len() x dofs.len()`.
    pub(crate) fn add(&mut self, dofs: &[LocalDof], ke: &[f64], fe: Option<&[f64]>) {
        let n = dofs.len();
        for (a, da) in dofs.iter().enumerate() {
            let LocalDof::Free(i) = *da else { continue };
            if let Some(fe) = fe {
                self.rhs[i] += fe[a];
            }
            for (b, db) in dofs.iter().enumerate() {
                let k = ke[a * n + b];
                match *db {
                    LocalDof::Free(j) => self.builder.push(i, j, k),
                    LocalDof::Fixed(g) => self.rhs[i] -= k * g,
                }
            }
        }
    }

    pub(crate) fn add_rhs(&mut self, dofs: &[LocalDof], fe: &[f64]) {
        for (d, f) in dofs.iter().zip(fe) {
            if let LocalDof::Free(i) = *d {
                self.rhs[i] += f;
            }
        }
    }

    pub(crate) fn finish(self, kind: ProblemKind) -> AssembledSystem {
        AssembledSystem {
            kind,
            matrix: self.builder.build(),
            rhs: self.rhs,
        }
    }
}

#[cfg(test)]
mod tests;
