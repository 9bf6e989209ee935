use crate::error::{Error, Result};
use crate::geometry::Side;
use crate::space::{DofLayout, ProblemKind};
use crate::sparse::{CsrMatrix, TripletBuilder};

use super::AssembledSystem;

/// Matrix of the map `(x0, x1) -> CutFEM coefficients` for the interface problem.
///
/// A column of `x0` has one unit entry per side whose block contains the node;
/// a column of `x1` has a single unit entry at the node's cut dof on the side
/// it does not belong to.
pub fn build_l(layout: &DofLayout) -> Result<CsrMatrix> {
    if layout.kind() != ProblemKind::Interface {
        return Err(Error::InvalidInput(
            "build_l expects an interface layout".into(),
        ));
    }
    let n0 = layout.n0();
    let mut b = TripletBuilder::new(layout.num_dofs(), n0 + layout.n1());
    for (k, &v) in layout.x0_vertices().iter().enumerate() {
        for side in Side::BOTH {
            if let Some(d) = layout.cut_dof(side, v) {
                b.push(d, k, 1.0);
            }
        }
    }
    for (k, &v) in layout.x1_vertices().iter().enumerate() {
        let side = Side::BOTH
            .into_iter()
            .find(|&s| layout.is_gamma_node(s, v))
            .ok_or_else(|| Error::Structural(format!("cut node {v} has no cut dof")))?;
        b.push(layout.cut_dof(side, v).expect("checked above"), n0 + k, 1.0);
    }
    Ok(b.build())
}

/// Same map for the fictitious-domain layout, where it is a permutation.
pub fn build_l_fd(layout: &DofLayout) -> Result<CsrMatrix> {
    if layout.kind() != ProblemKind::Fictitious {
        return Err(Error::InvalidInput(
            "build_l_fd expects a fictitious-domain layout".into(),
        ));
    }
    let n0 = layout.n0();
    let mut b = TripletBuilder::new(layout.num_dofs(), n0 + layout.n1());
    let columns = layout.x0_vertices().iter().chain(layout.x1_vertices());
    for (k, &v) in columns.enumerate() {
        let d = layout
            .cut_dof(Side::Inside, v)
            .ok_or_else(|| Error::Structural(format!("node {v} has no dof")))?;
        b.push(d, k, 1.0);
    }
    Ok(b.build())
}

/// The system in split coordinates together with its diagonal blocks.
#[derive(Debug, Clone)]
pub struct TransformedSystem {
    pub kind: ProblemKind,
    /// CutFEM matrix.
    pub a: CsrMatrix,
    pub l: CsrMatrix,
    pub a_hat: CsrMatrix,
    pub b_hat: Vec<f64>,
    /// `I0 x I0` block of `a_hat`.
    pub a0: CsrMatrix,
    /// `I^Gamma x I^Gamma` block of `a_hat`.
    pub a1: CsrMatrix,
    /// Diagonal of `a1`.
    pub d1: Vec<f64>,
    pub n0: usize,
    pub n1: usize,
}

impl TransformedSystem {
    /// CutFEM coefficients `L x_hat`.
    pub fn to_cutfem(&self, x_hat: &[f64]) -> Vec<f64> {
        self.l.matvec(x_hat)
    }
}

/// `A_hat = L^T A L`, `b_hat = L^T b`; the first `n0` split coordinates form `x0`.
pub fn transform(system: &AssembledSystem, l: &CsrMatrix, n0: usize) -> Result<TransformedSystem> {
    let a = &system.matrix;
    if l.nrows() != a.nrows()
        || l.nrows() != l.ncols()
        || system.rhs.len() != a.nrows()
        || n0 > l.ncols()
    {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, L is {}x{}",
            a.nrows(),
            a.ncols(),
            l.nrows(),
            l.ncols()
        )));
    }
    let lt = l.transpose();
    let a_hat = lt.matmul(&a.matmul(l)?)?;
    let b_hat = lt.matvec(&system.rhs);
    let n = a_hat.nrows();
    let n1 = n - n0;
    let first: Vec<usize> = (0..n0).collect();
    let second: Vec<usize> = (n0..n).collect();
    let a0 = a_hat.submatrix(&first, &first);
    let a1 = a_hat.submatrix(&second, &second);
    let d1 = a1.diagonal();
    if let Some((row, &pivot)) = d1.iter().enumerate().find(|(_, &d)| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite {
            row: n0 + row,
            pivot,
        });
    }
    Ok(TransformedSystem {
        kind: system.kind,
        a: a.clone(),
        l: l.clone(),
        a_hat,
        b_hat,
        a0,
        a1,
        d1,
        n0,
        n1,
    })
}
