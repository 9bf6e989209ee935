//! Manufactured solutions.

use crate::assembly::ProblemData;
use crate::geometry::Side;
use crate::Point;

/// Exact solution together with its data.
pub trait ExactSolution: ProblemData {
    fn value(&self, side: Side, x: &Point) -> f64;
    fn gradient(&self, side: Side, x: &Point) -> Point;
}

/// `p(y) = 3 y1^2 y2 - y2^3`, its gradient, and `e(y) = exp(1 - |y|^2)`.
fn harmonic_parts(center: &Point, x: &Point) -> (Point, f64, Point, f64, f64) {
    let y = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
    let p = 3.0 * y[0] * y[0] * y[1] - y[1].powi(3);
    let grad_p = [
        6.0 * y[0] * y[1],
        3.0 * y[0] * y[0] - 3.0 * y[1] * y[1],
        0.0,
    ];
    let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    (y, p, grad_p, (1.0 - r2).exp(), r2)
}

/// Interface solution `u_i = p(x - x0) (e(x - x0) - 1) / alpha_i` around the unit
/// sphere centred at `x0`.
///
/// Both `[u] = 0` and `[alpha du/dn] = 0` hold on the sphere and
/// `-alpha_i Lap u_i = (18 - 4|x - x0|^2) p e` on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSolution {
    pub center: Point,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl InterfaceSolution {
    pub fn new(center: Point, alpha1: f64, alpha2: f64) -> Self {
        Self {
            center,
            alpha1,
            alpha2,
        }
    }

    fn alpha(&self, side: Side) -> f64 {
        match side {
            Side::Inside => self.alpha1,
            Side::Outside => self.alpha2,
        }
    }
}

impl ProblemData for InterfaceSolution {
    fn source(&self, _side: Side, x: &Point) -> f64 {
        let (_, p, _, e, r2) = harmonic_parts(&self.center, x);
        (18.0 - 4.0 * r2) * p * e
    }

    fn dirichlet(&self, side: Side, x: &Point) -> f64 {
        self.value(side, x)
    }
}

impl ExactSolution for InterfaceSolution {
    fn value(&self, side: Side, x: &Point) -> f64 {
        let (_, p, _, e, _) = harmonic_parts(&self.center, x);
        p * (e - 1.0) / self.alpha(side)
    }

    fn gradient(&self, side: Side, x: &Point) -> Point {
        let (y, p, gp, e, _) = harmonic_parts(&self.center, x);
        let a = self.alpha(side);
        std::array::from_fn(|k| (gp[k] * (e - 1.0) - 2.0 * p * e * y[k]) / a)
    }
}

/// Fictitious-domain solution `u = p(x - x0) e(x - x0)` with
/// `f = u (18 - 4|x - x0|^2)` and `g = u` on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FictitiousSolution {
    pub center: Point,
}

impl FictitiousSolution {
    pub fn new(center: Point) -> Self {
        Self { center }
    }
}

impl ProblemData for FictitiousSolution {
    fn source(&self, _side: Side, x: &Point) -> f64 {
        let (_, p, _, e, r2) = harmonic_parts(&self.center, x);
        p * e * (18.0 - 4.0 * r2)
    }

    fn dirichlet(&self, side: Side, x: &Point) -> f64 {
        self.value(side, x)
    }
}

impl ExactSolution for FictitiousSolution {
    fn value(&self, _side: Side, x: &Point) -> f64 {
        let (_, p, _, e, _) = harmonic_parts(&self.center, x);
        p * e
    }

    fn gradient(&self, _side: Side, x: &Point) -> Point {
        let (y, p, gp, e, _) = harmonic_parts(&self.center, x);
        std::array::from_fn(|k| (gp[k] - 2.0 * p * y[k]) * e)
    }
}

/// `u = c0 + c . x` on both sides, with zero source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSolution(pub [f64; 4]);

impl ProblemData for AffineSolution {
    fn source(&self, _: Side, _: &Point) -> f64 {
        0.0
    }

    fn dirichlet(&self, side: Side, x: &Point) -> f64 {
        self.value(side, x)
    }
}

impl ExactSolution for AffineSolution {
    fn value(&self, _: Side, x: &Point) -> f64 {
        self.0[0] + self.0[1] * x[0] + self.0[2] * x[1] + self.0[3] * x[2]
    }

    fn gradient(&self, _: Side, _: &Point) -> Point {
        [self.0[1], self.0[2], self.0[3]]
    }
}
