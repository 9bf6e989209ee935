use crate::error::{Error, Result};
use crate::geometry::{ghost_facets, tet_rule, CutInfo, QuadratureRule, Side};
use crate::mesh::{barycentric_coordinates, barycentric_gradients, dot, Mesh};
use crate::space::{DofLayout, ProblemKind};
use crate::Point;

use super::{AssembledSystem, ElementSize, LocalDof, ProblemCoefficients, ProblemData, Scatter};

/// P1 stiffness matrix `|T| grad(lambda_a) . grad(lambda_b)`.
pub fn element_stiffness(pts: &[Point; 4]) -> [[f64; 4]; 4] {
    let g = barycentric_gradients(pts);
    let vol = crate::mesh::signed_volume(pts).abs();
    std::array::from_fn(|a| std::array::from_fn(|b| vol * dot(&g[a], &g[b])))
}

fn local_dofs(
    mesh: &Mesh,
    layout: &DofLayout,
    data: &dyn ProblemData,
    tet: &[usize],
    side: Side,
) -> Result<Vec<LocalDof>> {
    tet.iter()
        .map(|&v| match layout.cut_dof(side, v) {
            Some(d) => Ok(LocalDof::Free(d)),
            None if mesh.is_boundary_vertex(v) => {
                Ok(LocalDof::Fixed(data.dirichlet(side, &mesh.vertices()[v])))
            }
            None => Err(Error::Structural(format!(
                "vertex {v} of an active tet has no dof on side {side:?}"
            ))),
        })
        .collect()
}

fn element_size(mesh: &Mesh, t: usize, coeffs: &ProblemCoefficients) -> f64 {
    match coeffs.element_size {
        ElementSize::Diameter => mesh.tet_diameter(t),
        ElementSize::GridSpacing => mesh.mesh_size(),
    }
}

fn load_vector(rule: &QuadratureRule, pts: &[Point; 4], f: impl Fn(&Point) -> f64) -> [f64; 4] {
    let mut fe = [0.0; 4];
    for (x, w) in rule.iter() {
        let lam = barycentric_coordinates(pts, x);
        let fx = w * f(x);
        for a in 0..4 {
            fe[a] += fx * lam[a];
        }
    }
    fe
}

fn add_ghost_penalty(
    scatter: &mut Scatter,
    mesh: &Mesh,
    cut: &CutInfo,
    layout: &DofLayout,
    data: &dyn ProblemData,
    side: Side,
    coeffs: &ProblemCoefficients,
) -> Result<()> {
    let weight = coeffs.ghost_weight(side);
    if weight == 0.0 {
        return Ok(());
    }
    for f in ghost_facets(mesh, cut, side) {
        let facet = &mesh.facets()[f];
        let (ta, tb) = (
            facet.tets.0,
            facet.tets.1.expect("ghost facets are interior"),
        );
        let (va, vb) = (mesh.tets()[ta], mesh.tets()[tb]);
        let ga = barycentric_gradients(&mesh.tet_points(ta));
        let gb = barycentric_gradients(&mesh.tet_points(tb));
        let mut verts: Vec<usize> = va.to_vec();
        verts.extend(vb.iter().filter(|v| !va.contains(v)));
        // jump of the normal derivative of each nodal function (constant on the facet)
        let jump: Vec<f64> = verts
            .iter()
            .map(|v| {
                let from_a = va
                    .iter()
                    .position(|w| w == v)
                    .map_or(0.0, |k| dot(&ga[k], &facet.normal));
                let from_b = vb
                    .iter()
                    .position(|w| w == v)
                    .map_or(0.0, |k| dot(&gb[k], &facet.normal));
                from_a - from_b
            })
            .collect();
        let h = match coeffs.element_size {
            ElementSize::Diameter => facet.diameter,
            ElementSize::GridSpacing => mesh.mesh_size(),
        };
        let scale = weight * h * facet.area;
        let n = verts.len();
        let mut ke = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                ke[a * n + b] = scale * jump[a] * jump[b];
            }
        }
        let dofs = local_dofs(mesh, layout, data, &verts, side)?;
        scatter.add(&dofs, &ke, None);
    }
    Ok(())
}

/// Stabilized Nitsche system for the interface problem in the CutFEM basis.
pub fn assemble_interface(
    mesh: &Mesh,
    cut: &CutInfo,
    layout: &DofLayout,
    coeffs: &ProblemCoefficients,
    data: &dyn ProblemData,
) -> Result<AssembledSystem> {
    coeffs.validate()?;
    if layout.kind() != ProblemKind::Interface {
        return Err(Error::InvalidInput(
            "layout is not an interface layout".into(),
        ));
    }
    let order = cut.order();
    let alpha_bar = coeffs.alpha_bar();
    let mut scatter = Scatter::new(layout.num_dofs());

    for (t, tet) in mesh.tets().iter().enumerate() {
        let pts = mesh.tet_points(t);
        let grads = barycentric_gradients(&pts);
        let vol = mesh.tet_volume(t);
        let cut_tet = cut.cut_data(t);
        let full_rule = match cut_tet {
            Some(_) => None,
            None => Some(tet_rule(&pts, order)?),
        };
        let mut side_dofs: [Vec<LocalDof>; 2] = [Vec::new(), Vec::new()];
        for side in Side::BOTH {
            if !cut.in_extended(t, side) {
                continue;
            }
            let dofs = local_dofs(mesh, layout, data, tet, side)?;
            let (rule, measure) = match (cut_tet, &full_rule) {
                (Some(c), _) => (c.volume_rule(side), c.volume_rule(side).total_weight()),
                (None, Some(r)) => (r, vol),
                (None, None) => unreachable!(),
            };
            let alpha = coeffs.alpha(side);
            let mut ke = [0.0; 16];
            for a in 0..4 {
                for b in 0..4 {
                    ke[a * 4 + b] = alpha * measure * dot(&grads[a], &grads[b]);
                }
            }
            let fe = load_vector(rule, &pts, |x| data.source(side, x));
            scatter.add(&dofs, &ke, Some(&fe));
            side_dofs[side.index()] = dofs;
        }

        let Some(c) = cut_tet else { continue };
        let penalty = alpha_bar * coeffs.gamma / element_size(mesh, t, coeffs);
        // averaged flux {-alpha grad(phi)} . n, per local dof (side 1 then side 2)
        let mut flux = [0.0; 8];
        for a in 0..4 {
            let gn = dot(&grads[a], &c.normal);
            flux[a] = -c.kappa(Side::Inside) * coeffs.alpha1 * gn;
            flux[4 + a] = -c.kappa(Side::Outside) * coeffs.alpha2 * gn;
        }
        let mut ke = [0.0; 64];
        for (x, w) in c.surface_rule.iter() {
            let lam = barycentric_coordinates(&pts, x);
            let jump: [f64; 8] = std::array::from_fn(|k| if k < 4 { lam[k] } else { -lam[k - 4] });
            for k in 0..8 {
                for m in 0..8 {
                    ke[k * 8 + m] +=
                        w * (flux[k] * jump[m] + jump[k] * flux[m] + penalty * jump[k] * jump[m]);
                }
            }
        }
        let dofs: Vec<LocalDof> = side_dofs[0].iter().chain(&side_dofs[1]).copied().collect();
        scatter.add(&dofs, &ke, None);
    }

    for side in Side::BOTH {
        add_ghost_penalty(&mut scatter, mesh, cut, layout, data, side, coeffs)?;
    }
    Ok(scatter.finish(ProblemKind::Interface))
}

/// Fictitious-domain Nitsche system on `Omega_1` with unit diffusion.
///
/// The diffusion coefficients in `coeffs` are ignored.
pub fn assemble_fd(
    mesh: &Mesh,
    cut: &CutInfo,
    layout: &DofLayout,
    coeffs: &ProblemCoefficients,
    data: &dyn ProblemData,
) -> Result<AssembledSystem> {
    coeffs.validate()?;
    let coeffs = &ProblemCoefficients {
        alpha1: 1.0,
        alpha2: 1.0,
        ..*coeffs
    };
    if layout.kind() != ProblemKind::Fictitious {
        return Err(Error::InvalidInput(
            "layout is not a fictitious-domain layout".into(),
        ));
    }
    let order = cut.order();
    let side = Side::Inside;
    let mut scatter = Scatter::new(layout.num_dofs());

    for (t, tet) in mesh.tets().iter().enumerate() {
        if !cut.in_extended(t, side) {
            continue;
        }
        let pts = mesh.tet_points(t);
        let grads = barycentric_gradients(&pts);
        let dofs = local_dofs(mesh, layout, data, tet, side)?;
        let cut_tet = cut.cut_data(t);
        let full_rule;
        let (rule, measure) = match cut_tet {
            Some(c) => (&c.inside_rule, c.inside_rule.total_weight()),
            None => {
                full_rule = tet_rule(&pts, order)?;
                (&full_rule, mesh.tet_volume(t))
            }
        };
        let mut ke = [0.0; 16];
        for a in 0..4 {
            for b in 0..4 {
                ke[a * 4 + b] = measure * dot(&grads[a], &grads[b]);
            }
        }
        let fe = load_vector(rule, &pts, |x| data.source(side, x));
        scatter.add(&dofs, &ke, Some(&fe));

        let Some(c) = cut_tet else { continue };
        let penalty = coeffs.gamma / element_size(mesh, t, coeffs);
        let gn: [f64; 4] = std::array::from_fn(|a| dot(&grads[a], &c.normal));
        let mut ke = [0.0; 16];
        let mut fe = [0.0; 4];
        for (x, w) in c.surface_rule.iter() {
            let lam = barycentric_coordinates(&pts, x);
            let g = data.dirichlet(side, x);
            for a in 0..4 {
                for b in 0..4 {
                    ke[a * 4 + b] +=
                        w * (-gn[b] * lam[a] - lam[b] * gn[a] + penalty * lam[a] * lam[b]);
                }
                fe[a] += w * g * (penalty * lam[a] - gn[a]);
            }
        }
        scatter.add(&dofs, &ke, None);
        scatter.add_rhs(&dofs, &fe);
    }
    add_ghost_penalty(&mut scatter, mesh, cut, layout, data, side, coeffs)?;
    Ok(scatter.finish(ProblemKind::Fictitious))
}
