//! P1 index sets and degree-of-freedom layouts.
//!
//! Two bases span the same unfitted space. The CutFEM basis stores one block per
//! subdomain (`V_1` then `V_2`), each ordered as "nodes on the own side" followed
//! by "nodes on the other side of the interface". The split basis stores the
//! conforming coefficients `x0` on `I0` followed by the cut-strip coefficients
//! `x1` on `I^Gamma`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CutInfo, Side};
use crate::mesh::{barycentric_coordinates, barycentric_gradients, Mesh};
use crate::Point;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Two-sided interface problem with Dirichlet data on the box boundary.
    Interface,
    /// Poisson problem on `Omega_1` with Nitsche boundary conditions on the interface.
    Fictitious,
}

/// Sorted vertex-id sets.
///
/// For [`ProblemKind::Fictitious`] only `i1`, `i_gamma1` are meaningful; `i0`
/// holds `I1 \ I1^Gamma` and `i_gamma` equals `i_gamma1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSets {
    pub kind: ProblemKind,
    pub num_vertices: usize,
    pub i0: Vec<usize>,
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub i_gamma: Vec<usize>,
    pub i_gamma1: Vec<usize>,
    pub i_gamma2: Vec<usize>,
}

impl IndexSets {
    pub fn n0(&self) -> usize {
        self.i0.len()
    }

    pub fn n1(&self) -> usize {
        self.i_gamma.len()
    }

    /// Vertices of `I_i` on the own side, i.e. `I_i \ I_i^Gamma`.
    pub fn own(&self, side: Side) -> Vec<usize> {
        let (all, gamma) = match side {
            Side::Inside => (&self.i1, &self.i_gamma1),
            Side::Outside => (&self.i2, &self.i_gamma2),
        };
        difference(all, gamma)
    }

    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::Inside => &self.i1,
            Side::Outside => &self.i2,
        }
    }

    pub fn gamma(&self, side: Side) -> &[usize] {
        match side {
            Side::Inside => &self.i_gamma1,
            Side::Outside => &self.i_gamma2,
        }
    }
}

fn difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_err())
        .collect()
}

fn collect_marked(marks: &[bool]) -> Vec<usize> {
    marks
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(v, _)| v)
        .collect()
}

fn check_disjoint_union(whole: &[usize], parts: [&[usize]; 2], what: &str) -> Result<()> {
    let mut merged: Vec<usize> = parts[0].iter().chain(parts[1]).copied().collect();
    let n = merged.len();
    merged.sort_unstable();
    merged.dedup();
    if merged.len() != n || merged != whole {
        return Err(Error::Structural(format!(
            "{what} is not a disjoint partition"
        )));
    }
    Ok(())
}

/// Index sets of the P1 space for the given cut configuration.
///
/// Box-boundary vertices are excluded for the interface problem (Dirichlet data is
/// imposed strongly there). Membership in `I_i^Gamma` follows the snapped sign of
/// the level set at the vertex.
pub fn build_index_sets(mesh: &Mesh, cut: &CutInfo, kind: ProblemKind) -> Result<IndexSets> {
    let nv = mesh.num_vertices();
    let keep = |v: usize| kind == ProblemKind::Fictitious || !mesh.is_boundary_vertex(v);
    let mut in_side = [vec![false; nv], vec![false; nv]];
    let mut in_gamma = vec![false; nv];
    for (t, tet) in mesh.tets().iter().enumerate() {
        for side in Side::BOTH {
            if cut.in_extended(t, side) {
                for &v in tet {
                    in_side[side.index()][v] |= keep(v);
                }
            }
        }
        if cut.is_cut(t) {
            for &v in tet {
                in_gamma[v] |= keep(v);
            }
        }
    }
    let i1 = collect_marked(&in_side[0]);
    let i2 = collect_marked(&in_side[1]);
    let i_gamma = collect_marked(&in_gamma);
    let i_gamma1: Vec<usize> = i_gamma
        .iter()
        .copied()
        .filter(|&v| cut.vertex_side(v) != Side::Inside)
        .collect();
    let i_gamma2: Vec<usize> = i_gamma
        .iter()
        .copied()
        .filter(|&v| cut.vertex_side(v) != Side::Outside)
        .collect();

    let sets = match kind {
        ProblemKind::Interface => {
            let i0: Vec<usize> = (0..nv).filter(|&v| keep(v)).collect();
            let sets = IndexSets {
                kind,
                num_vertices: nv,
                i0,
                i1,
                i2,
                i_gamma,
                i_gamma1,
                i_gamma2,
            };
            check_disjoint_union(&sets.i_gamma, [&sets.i_gamma1, &sets.i_gamma2], "I^Gamma")?;
            let own1 = sets.own(Side::Inside);
            let own2 = sets.own(Side::Outside);
            check_disjoint_union(&sets.i0, [&own1, &own2], "I0")?;
            if sets.i_gamma2.iter().any(|v| own1.binary_search(v).is_err())
                || sets.i_gamma1.iter().any(|v| own2.binary_search(v).is_err())
            {
                return Err(Error::Structural(
                    "cut node is not on the opposite side".into(),
                ));
            }
            sets
        }
        ProblemKind::Fictitious => {
            let i0 = difference(&i1, &i_gamma1);
            IndexSets {
                kind,
                num_vertices: nv,
                i0,
                i1,
                i2: Vec::new(),
                i_gamma: i_gamma1.clone(),
                i_gamma1,
                i_gamma2: Vec::new(),
            }
        }
    };
    Ok(sets)
}

/// Numbering of both bases.
#[derive(Debug, Clone)]
pub struct DofLayout {
    kind: ProblemKind,
    /// Vertex ids in CutFEM order, per side.
    blocks: [Vec<usize>; 2],
    offsets: [usize; 2],
    /// Length of the own-side part of each block.
    own_len: [usize; 2],
    cut_dof: [Vec<usize>; 2],
    x0: Vec<usize>,
    x1: Vec<usize>,
    x0_index: Vec<usize>,
    x1_index: Vec<usize>,
}

impl DofLayout {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n0(&self) -> usize {
        self.x0.len()
    }

    pub fn n1(&self) -> usize {
        self.x1.len()
    }

    pub fn num_dofs(&self) -> usize {
        self.blocks[0].len() + self.blocks[1].len()
    }

    /// Vertex ids of the CutFEM block for `side`, in dof order.
    pub fn block(&self, side: Side) -> &[usize] {
        &self.blocks[side.index()]
    }

    pub fn block_offset(&self, side: Side) -> usize {
        self.offsets[side.index()]
    }

    /// CutFEM dof of vertex `v` on `side`.
    pub fn cut_dof(&self, side: Side, v: usize) -> Option<usize> {
        let d = self.cut_dof[side.index()][v];
        (d != NONE).then_some(d)
    }

    /// True if vertex `v` is a node of `I_side^Gamma`, i.e. lies on the other side.
    pub fn is_gamma_node(&self, side: Side, v: usize) -> bool {
        self.cut_dof(side, v)
            .is_some_and(|d| d - self.offsets[side.index()] >= self.own_len[side.index()])
    }

    /// Vertex ids of the `x0` block.
    pub fn x0_vertices(&self) -> &[usize] {
        &self.x0
    }

    /// Vertex ids of the `x1` block.
    pub fn x1_vertices(&self) -> &[usize] {
        &self.x1
    }

    /// Position of vertex `v` within `x0`.
    pub fn x0_index(&self, v: usize) -> Option<usize> {
        let d = self.x0_index[v];
        (d != NONE).then_some(d)
    }

    /// Position of vertex `v` within `x1` (not offset by `n0`).
    pub fn x1_index(&self, v: usize) -> Option<usize> {
        let d = self.x1_index[v];
        (d != NONE).then_some(d)
    }
}

fn index_map(n: usize, ids: &[usize]) -> Vec<usize> {
    let mut map = vec![NONE; n];
    for (k, &v) in ids.iter().enumerate() {
        map[v] = k;
    }
    map
}

pub fn build_dof_layout(sets: &IndexSets) -> DofLayout {
    let nv = sets.num_vertices;
    let ordered = |side: Side| -> (Vec<usize>, usize) {
        let mut b = sets.own(side);
        let own = b.len();
        b.extend_from_slice(sets.gamma(side));
        (b, own)
    };
    let ((b1, own1), (b2, own2)) = match sets.kind {
        ProblemKind::Interface => (ordered(Side::Inside), ordered(Side::Outside)),
        ProblemKind::Fictitious => (ordered(Side::Inside), (Vec::new(), 0)),
    };
    let blocks = [b1, b2];
    let own_len = [own1, own2];
    let offsets = [0, blocks[0].len()];
    let mut cut_dof = [vec![NONE; nv], vec![NONE; nv]];
    for s in 0..2 {
        for (k, &v) in blocks[s].iter().enumerate() {
            cut_dof[s][v] = offsets[s] + k;
        }
    }
    let x0 = sets.i0.clone();
    let x1 = sets.i_gamma.clone();
    DofLayout {
        kind: sets.kind,
        x0_index: index_map(nv, &x0),
        x1_index: index_map(nv, &x1),
        blocks,
        offsets,
        own_len,
        cut_dof,
        x0,
        x1,
    }
}

/// Values and gradients of the four nodal P1 functions of a tet at `x`.
pub fn evaluate_basis(pts: &[Point; 4], x: &Point) -> Result<([f64; 4], [Point; 4])> {
    let lam = barycentric_coordinates(pts, x);
    let min = lam.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(Error::PointOutsideElement {
            min_barycentric: min,
        });
    }
    Ok((lam, barycentric_gradients(pts)))
}
