//! Geometric multigrid on nested P1 spaces with Galerkin coarse operators.

use crate::error::{Error, Result};
use crate::mesh::{MeshHierarchy, VertexParent};
use crate::sparse::{CsrMatrix, TripletBuilder};

use super::cholesky::SkylineCholesky;
use super::sgs::{checked_diagonal, sgs_sweep};
use super::Preconditioner;

#[derive(Debug, Clone)]
struct MgLevel {
    matrix: CsrMatrix,
    diag: Vec<f64>,
    /// Interpolation from the next coarser level; `None` on the coarsest.
    prolongation: Option<CsrMatrix>,
    restriction: Option<CsrMatrix>,
    /// Mesh vertex of each dof.
    vertices: Vec<usize>,
}

/// V(1,1)-cycle multigrid, finest level first.
#[derive(Debug, Clone)]
pub struct MultigridHierarchy {
    levels: Vec<MgLevel>,
    coarse: SkylineCholesky,
    cycles: usize,
}

/// Interpolation from the coarse vertices that stay active to the fine active
/// vertices. Returns the prolongation and the coarse active vertices.
fn restricted_prolongation(
    hierarchy: &MeshHierarchy,
    fine_level: usize,
    fine_active: &[usize],
) -> (CsrMatrix, Vec<usize>) {
    let map = hierarchy.refinement(fine_level - 1);
    let n_coarse = hierarchy.level(fine_level - 1).num_vertices();
    let n_fine = hierarchy.level(fine_level).num_vertices();
    let mut is_active = vec![false; n_fine];
    for &v in fine_active {
        is_active[v] = true;
    }
    let mut keep = vec![false; n_coarse];
    for (v, parent) in map.vertex_parents.iter().enumerate() {
        if let VertexParent::Vertex(c) = *parent {
            keep[c] = is_active[v];
        }
    }
    let coarse_active: Vec<usize> = (0..n_coarse).filter(|&c| keep[c]).collect();
    let mut coarse_index = vec![usize::MAX; n_coarse];
    for (k, &c) in coarse_active.iter().enumerate() {
        coarse_index[c] = k;
    }
    let mut b = TripletBuilder::new(fine_active.len(), coarse_active.len());
    for (k, &v) in fine_active.iter().enumerate() {
        match map.vertex_parents[v] {
            VertexParent::Vertex(c) => b.push(k, coarse_index[c], 1.0),
            VertexParent::Midpoint(p, q) => {
                for c in [p, q] {
                    if coarse_index[c] != usize::MAX {
                        b.push(k, coarse_index[c], 0.5);
                    }
                }
            }
        }
    }
    (b.build(), coarse_active)
}

/// Multigrid for `a0`, whose dof `k` sits on vertex `active[k]` of the finest
/// mesh of `hierarchy`.
///
/// A coarse vertex is active when the fine vertex at the same position is.
/// Coarsening stops at level 0 or when no coarse vertex stays active.
pub fn build_mg_hierarchy(
    a0: &CsrMatrix,
    hierarchy: &MeshHierarchy,
    active: &[usize],
    cycles: usize,
) -> Result<MultigridHierarchy> {
    if a0.nrows() != active.len() || a0.ncols() != active.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but {} active vertices were given",
            a0.nrows(),
            a0.ncols(),
            active.len()
        )));
    }
    let fine = hierarchy.finest_level();
    if let Some(&v) = active
        .iter()
        .find(|&&v| v >= hierarchy.level(fine).num_vertices())
    {
        return Err(Error::InvalidInput(format!(
            "active vertex {v} is not on the finest mesh"
        )));
    }
    let mut levels = vec![MgLevel {
        diag: checked_diagonal(a0)?,
        matrix: a0.clone(),
        prolongation: None,
        restriction: None,
        vertices: active.to_vec(),
    }];
    for l in (1..=fine).rev() {
        let current = levels.last_mut().unwrap();
        let (p, coarse_vertices) = restricted_prolongation(hierarchy, l, &current.vertices);
        if coarse_vertices.is_empty() {
            break;
        }
        let coarse_matrix = current.matrix.triple_product(&p)?;
        current.restriction = Some(p.transpose());
        current.prolongation = Some(p);
        levels.push(MgLevel {
            diag: checked_diagonal(&coarse_matrix)?,
            matrix: coarse_matrix,
            prolongation: None,
            restriction: None,
            vertices: coarse_vertices,
        });
    }
    let coarse = SkylineCholesky::factor(&levels.last().unwrap().matrix)?;
    Ok(MultigridHierarchy {
        levels,
        coarse,
        cycles: cycles.max(1),
    })
}

impl MultigridHierarchy {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Dofs per level, finest first.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.matrix.nrows()).collect()
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    /// Operator on level `i` (0 is the finest).
    pub fn operator(&self, i: usize) -> &CsrMatrix {
        &self.levels[i].matrix
    }

    /// Interpolation into level `i` from level `i + 1`.
    pub fn prolongation(&self, i: usize) -> Option<&CsrMatrix> {
        self.levels[i].prolongation.as_ref()
    }

    /// One V(1,1) cycle for `A_i x = b` starting from the given `x`.
    pub fn vcycle(&self, i: usize, b: &[f64], x: &mut [f64]) {
        let level = &self.levels[i];
        let (Some(p), Some(rt)) = (&level.prolongation, &level.restriction) else {
            x.copy_from_slice(&self.coarse.solve(b));
            return;
        };
        sgs_sweep(&level.matrix, &level.diag, b, x);
        let ax = level.matrix.matvec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let rc = rt.matvec(&r);
        let mut xc = vec![0.0; rc.len()];
        self.vcycle(i + 1, &rc, &mut xc);
        let corr = p.matvec(&xc);
        for (xi, ci) in x.iter_mut().zip(&corr) {
            *xi += ci;
        }
        sgs_sweep(&level.matrix, &level.diag, b, x);
    }
}

impl Preconditioner for MultigridHierarchy {
    fn dim(&self) -> usize {
        self.levels[0].matrix.nrows()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.fill(0.0);
        for _ in 0..self.cycles {
            self.vcycle(0, r, z);
        }
    }
}
