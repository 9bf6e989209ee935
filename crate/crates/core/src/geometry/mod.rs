//! Level sets, cut classification and cut-cell quadrature.
//!
//! The interface is the zero level of the piecewise-linear interpolant `phi_h`
//! of the level set. Each cut tet is split along the plane `{phi_h = 0}` into
//! sub-tetrahedra (one tet plus a prism, or two prisms, each prism cut into
//! three tets) and standard positive rules are mapped onto the pieces.

pub mod quadrature;

use crate::error::{Error, Result};
use crate::mesh::{barycentric_gradients, norm, signed_volume, Mesh};
use crate::Point;

pub use quadrature::{tet_rule, triangle_rule, QuadratureRule};

/// Vertices with `|phi| < SNAP_TOLERANCE * h` are moved to the negative side.
pub const SNAP_TOLERANCE: f64 = 1e-12;

/// Degree of exactness used by default for volume and surface rules.
pub const DEFAULT_QUADRATURE_ORDER: usize = 4;

/// Signed distance-like function; `Omega_1 = {phi < 0}`.
pub trait LevelSet: Sync {
    fn value(&self, x: &Point) -> f64;
}

impl<F> LevelSet for F
where
    F: Fn(&Point) -> f64 + Sync,
{
    fn value(&self, x: &Point) -> f64 {
        self(x)
    }
}

/// `phi(x) = |x - center| - radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Point,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn unit(center: Point) -> Self {
        Self::new(center, 1.0)
    }
}

impl LevelSet for Sphere {
    fn value(&self, x: &Point) -> f64 {
        let d = [
            x[0] - self.center[0],
            x[1] - self.center[1],
            x[2] - self.center[2],
        ];
        norm(&d) - self.radius
    }
}

/// The two subdomains. `Inside` is `Omega_1 = {phi < 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Inside,
    Outside,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Inside, Side::Outside];

    pub fn index(self) -> usize {
        match self {
            Side::Inside => 0,
            Side::Outside => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Inside => Side::Outside,
            Side::Outside => Side::Inside,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TetClass {
    /// Contained in the closure of `Omega_1`.
    Negative,
    /// Contained in the closure of `Omega_2`.
    Positive,
    Cut,
}

/// Vertex values of the snapped interpolant and per-tet classes.
#[derive(Debug, Clone)]
pub struct Classification {
    pub vertex_phi: Vec<f64>,
    pub classes: Vec<TetClass>,
}

impl Classification {
    pub fn vertex_side(&self, v: usize) -> Side {
        if self.vertex_phi[v] < 0.0 {
            Side::Inside
        } else {
            Side::Outside
        }
    }
}

/// Classify every tet from the signs of `phi` at its vertices.
pub fn classify(mesh: &Mesh, phi: &dyn LevelSet) -> Classification {
    let snap = SNAP_TOLERANCE * mesh.mesh_size();
    let vertex_phi: Vec<f64> = mesh
        .vertices()
        .iter()
        .map(|x| {
            let v = phi.value(x);
            if v.abs() < snap {
                -snap
            } else {
                v
            }
        })
        .collect();
    let classes = mesh
        .tets()
        .iter()
        .map(|tet| {
            let neg = tet.iter().filter(|&&v| vertex_phi[v] < 0.0).count();
            match neg {
                4 => TetClass::Negative,
                0 => TetClass::Positive,
                _ => TetClass::Cut,
            }
        })
        .collect();
    Classification {
        vertex_phi,
        classes,
    }
}

/// Sub-tessellation of a tet along the zero plane of its linear level set.
#[derive(Debug, Clone, Default)]
pub struct CutPieces {
    pub negative: Vec<[Point; 4]>,
    pub positive: Vec<[Point; 4]>,
    /// Triangles of the interface, oriented arbitrarily.
    pub interface: Vec<[Point; 3]>,
}

fn prism_tets(a: [Point; 3], b: [Point; 3]) -> [[Point; 4]; 3] {
    [
        [a[0], a[1], a[2], b[0]],
        [a[1], a[2], b[0], b[1]],
        [a[2], b[0], b[1], b[2]],
    ]
}

/// Split `pts` by the zero level of the linear interpolant of `phi`.
///
/// Vertices with `phi < 0` are on the negative side, all others on the positive side.
pub fn split_tet(pts: &[Point; 4], phi: &[f64; 4]) -> CutPieces {
    let neg: Vec<usize> = (0..4).filter(|&i| phi[i] < 0.0).collect();
    let pos: Vec<usize> = (0..4).filter(|&i| phi[i] >= 0.0).collect();
    let crossing = |a: usize, b: usize| -> Point {
        let t = phi[a] / (phi[a] - phi[b]);
        std::array::from_fn(|c| pts[a][c] + t * (pts[b][c] - pts[a][c]))
    };

    let mut pieces = CutPieces::default();
    match neg.len() {
        4 => pieces.negative.push(*pts),
        0 => pieces.positive.push(*pts),
        1 | 3 => {
            let (lone, others) = if neg.len() == 1 {
                (neg[0], &pos)
            } else {
                (pos[0], &neg)
            };
            let c = [
                crossing(lone, others[0]),
                crossing(lone, others[1]),
                crossing(lone, others[2]),
            ];
            let corner = [pts[lone], c[0], c[1], c[2]];
            let prism = prism_tets(c, [pts[others[0]], pts[others[1]], pts[others[2]]]);
            if neg.len() == 1 {
                pieces.negative.push(corner);
                pieces.positive.extend_from_slice(&prism);
            } else {
                pieces.positive.push(corner);
                pieces.negative.extend_from_slice(&prism);
            }
            pieces.interface.push(c);
        }
        _ => {
            let (a, b, c, d) = (neg[0], neg[1], pos[0], pos[1]);
            let p_ac = crossing(a, c);
            let p_ad = crossing(a, d);
            let p_bc = crossing(b, c);
            let p_bd = crossing(b, d);
            pieces
                .negative
                .extend_from_slice(&prism_tets([pts[a], p_ac, p_ad], [pts[b], p_bc, p_bd]));
            pieces
                .positive
                .extend_from_slice(&prism_tets([pts[c], p_ac, p_bc], [pts[d], p_ad, p_bd]));
            pieces.interface.push([p_ac, p_ad, p_bd]);
            pieces.interface.push([p_ac, p_bd, p_bc]);
        }
    }
    pieces
}

/// Volume rules on `T ∩ {phi_h < 0}` and `T ∩ {phi_h > 0}`.
pub fn cut_volume_rule(
    pts: &[Point; 4],
    phi: &[f64; 4],
    order: usize,
) -> Result<(QuadratureRule, QuadratureRule)> {
    let pieces = split_tet(pts, phi);
    let mut neg = QuadratureRule::default();
    let mut pos = QuadratureRule::default();
    for t in &pieces.negative {
        quadrature::append_tet_rule(&mut neg, t, order)?;
    }
    for t in &pieces.positive {
        quadrature::append_tet_rule(&mut pos, t, order)?;
    }
    Ok((neg, pos))
}

/// Surface rule on the interface patch of a cut tet and its unit normal,
/// pointing from `{phi_h < 0}` to `{phi_h > 0}`.
pub fn interface_rule(
    pts: &[Point; 4],
    phi: &[f64; 4],
    order: usize,
) -> Result<(QuadratureRule, Point)> {
    let pieces = split_tet(pts, phi);
    if pieces.interface.is_empty() {
        return Err(Error::InvalidInput(
            "interface rule requested for an uncut tet".into(),
        ));
    }
    let mut rule = QuadratureRule::default();
    for tri in &pieces.interface {
        quadrature::append_triangle_rule(&mut rule, tri, order)?;
    }
    Ok((rule, level_set_normal(pts, phi)))
}

/// Unit gradient of the linear interpolant of `phi` on `pts`.
pub fn level_set_normal(pts: &[Point; 4], phi: &[f64; 4]) -> Point {
    let g = barycentric_gradients(pts);
    let grad: Point = std::array::from_fn(|c| (0..4).map(|i| phi[i] * g[i][c]).sum());
    let len = norm(&grad);
    grad.map(|c| c / len)
}

/// Geometry of one cut tet.
#[derive(Debug, Clone)]
pub struct CutTet {
    pub tet: usize,
    pub inside_rule: QuadratureRule,
    pub outside_rule: QuadratureRule,
    pub surface_rule: QuadratureRule,
    /// Unit normal on the interface, pointing from `Omega_1` into `Omega_2`.
    pub normal: Point,
    /// `|T ∩ Omega_1| / |T|` for the linear cut.
    pub kappa_inside: f64,
    pub surface_area: f64,
}

impl CutTet {
    pub fn kappa(&self, side: Side) -> f64 {
        match side {
            Side::Inside => self.kappa_inside,
            Side::Outside => 1.0 - self.kappa_inside,
        }
    }

    pub fn volume_rule(&self, side: Side) -> &QuadratureRule {
        match side {
            Side::Inside => &self.inside_rule,
            Side::Outside => &self.outside_rule,
        }
    }
}

/// Classification plus quadrature on every cut tet of a mesh.
#[derive(Debug, Clone)]
pub struct CutInfo {
    classification: Classification,
    cut_index: Vec<Option<usize>>,
    cut: Vec<CutTet>,
    order: usize,
}

impl CutInfo {
    pub fn new(mesh: &Mesh, phi: &dyn LevelSet, order: usize) -> Result<Self> {
        let classification = classify(mesh, phi);
        let mut cut_index = vec![None; mesh.num_tets()];
        let mut cut = Vec::new();
        for (t, tet) in mesh.tets().iter().enumerate() {
            if classification.classes[t] != TetClass::Cut {
                continue;
            }
            let pts = mesh.tet_points(t);
            let values = tet.map(|v| classification.vertex_phi[v]);
            let (inside_rule, outside_rule) = cut_volume_rule(&pts, &values, order)?;
            let (surface_rule, normal) = interface_rule(&pts, &values, order)?;
            let vin = inside_rule.total_weight();
            let vout = outside_rule.total_weight();
            let kappa_inside = vin / (vin + vout);
            let surface_area = surface_rule.total_weight();
            cut_index[t] = Some(cut.len());
            cut.push(CutTet {
                tet: t,
                inside_rule,
                outside_rule,
                surface_rule,
                normal,
                kappa_inside,
                surface_area,
            });
        }
        Ok(Self {
            classification,
            cut_index,
            cut,
            order,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn class(&self, t: usize) -> TetClass {
        self.classification.classes[t]
    }

    pub fn vertex_phi(&self) -> &[f64] {
        &self.classification.vertex_phi
    }

    pub fn vertex_side(&self, v: usize) -> Side {
        self.classification.vertex_side(v)
    }

    pub fn cut_tets(&self) -> &[CutTet] {
        &self.cut
    }

    pub fn cut_data(&self, t: usize) -> Option<&CutTet> {
        self.cut_index[t].map(|i| &self.cut[i])
    }

    pub fn is_cut(&self, t: usize) -> bool {
        self.cut_index[t].is_some()
    }

    /// True if tet `t` belongs to the extended subdomain `Omega_{i,h}^ex`.
    pub fn in_extended(&self, t: usize, side: Side) -> bool {
        matches!(
            (self.class(t), side),
            (TetClass::Cut, _) | (TetClass::Negative, Side::Inside) | (TetClass::Positive, Side::Outside)
        )
    }

    /// True if tet `t` lies entirely in the closure of `Omega_i` (`Omega_{i,h}^-`).
    pub fn in_interior(&self, t: usize, side: Side) -> bool {
        matches!(
            (self.class(t), side),
            (TetClass::Negative, Side::Inside) | (TetClass::Positive, Side::Outside)
        )
    }

    pub fn extended_tets(&self, side: Side) -> Vec<usize> {
        (0..self.cut_index.len())
            .filter(|&t| self.in_extended(t, side))
            .collect()
    }

    pub fn interior_tets(&self, side: Side) -> Vec<usize> {
        (0..self.cut_index.len())
            .filter(|&t| self.in_interior(t, side))
            .collect()
    }

    /// Measure of `Omega_{i,h}` (linear interface).
    pub fn subdomain_volume(&self, mesh: &Mesh, side: Side) -> f64 {
        (0..mesh.num_tets())
            .map(|t| match self.cut_data(t) {
                Some(c) => c.volume_rule(side).total_weight(),
                None if self.in_interior(t, side) => signed_volume(&mesh.tet_points(t)),
                None => 0.0,
            })
            .sum()
    }

    pub fn interface_area(&self) -> f64 {
        self.cut.iter().map(|c| c.surface_area).sum()
    }
}

/// Ghost-penalty facets `F_{g,i}`: interior facets whose two neighbors are in
/// `Omega_{i,h}^ex` and at least one of which is cut.
pub fn ghost_facets(mesh: &Mesh, cut: &CutInfo, side: Side) -> Vec<usize> {
    mesh.facets()
        .iter()
        .enumerate()
        .filter_map(|(f, facet)| {
            let (a, b) = (facet.tets.0, facet.tets.1?);
            let both = cut.in_extended(a, side) && cut.in_extended(b, side);
            (both && (cut.is_cut(a) || cut.is_cut(b))).then_some(f)
        })
        .collect()
}
