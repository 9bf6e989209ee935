//! Discretization errors over the physical subdomains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{tet_rule, CutInfo, QuadratureRule, Side};
use crate::mesh::{barycentric_coordinates, barycentric_gradients, Mesh};
use crate::space::{DofLayout, ProblemKind};

use super::solutions::ExactSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub l2: f64,
    /// `|grad(u - u_h)|` in `L2`.
    pub h1_seminorm: f64,
    /// `sqrt(l2^2 + h1_seminorm^2)`.
    pub h1: f64,
}

/// Errors of the CutFEM function with coefficients `x` against `exact`.
///
/// Integrates over `Omega_1` and `Omega_2` for the interface problem and over
/// `Omega_1` for the fictitious-domain problem. Vertices without a dof take the
/// Dirichlet value of `exact`.
pub fn error_norms(
    mesh: &Mesh,
    cut: &CutInfo,
    layout: &DofLayout,
    x: &[f64],
    exact: &dyn ExactSolution,
) -> Result<ErrorNorms> {
    if x.len() != layout.num_dofs() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} dofs",
            x.len(),
            layout.num_dofs()
        )));
    }
    let sides: &[Side] = match layout.kind() {
        ProblemKind::Interface => &Side::BOTH,
        ProblemKind::Fictitious => &[Side::Inside],
    };
    let (mut l2, mut semi) = (0.0, 0.0);
    for (t, tet) in mesh.tets().iter().enumerate() {
        let pts = mesh.tet_points(t);
        let mut full: Option<QuadratureRule> = None;
        for &side in sides {
            let rule = if let Some(c) = cut.cut_data(t) {
                c.volume_rule(side)
            } else if cut.in_interior(t, side) {
                full.insert(tet_rule(&pts, cut.order())?)
            } else {
                continue;
            };
            let mut nodal = [0.0; 4];
            for (a, &v) in tet.iter().enumerate() {
                nodal[a] = match layout.cut_dof(side, v) {
                    Some(d) => x[d],
                    None if mesh.is_boundary_vertex(v) => {
                        exact.dirichlet(side, &mesh.vertices()[v])
                    }
                    None => {
                        return Err(Error::Structural(format!(
                            "vertex {v} has no dof on side {side:?}"
                        )));
                    }
                };
            }
            let grads = barycentric_gradients(&pts);
            let gh: [f64; 3] =
                std::array::from_fn(|k| (0..4).map(|a| nodal[a] * grads[a][k]).sum());
            for (p, w) in rule.iter() {
                let lam = barycentric_coordinates(&pts, p);
                let uh: f64 = (0..4).map(|a| nodal[a] * lam[a]).sum();
                let e = exact.value(side, p) - uh;
                let g = exact.gradient(side, p);
                l2 += w * e * e;
                semi += w * (0..3).map(|k| (g[k] - gh[k]).powi(2)).sum::<f64>();
            }
        }
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1_seminorm: semi.sqrt(),
        h1: (l2 + semi).sqrt(),
    })
}

/// `log2(e_coarse / e_fine)`.
pub fn convergence_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}
