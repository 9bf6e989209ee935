//! Extreme eigenvalues and spectral condition numbers of symmetric operators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

use super::cholesky::SkylineCholesky;
use super::LinearOperator;

/// Largest dimension handled by the dense eigensolver in [`ConditionMode::Auto`].
pub const DENSE_LIMIT: usize = 3000;

const LANCZOS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionMode {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    pub method: EigenMethod,
    /// Lanczos steps taken (the dimension for the dense solver).
    pub iterations: usize,
    /// `false` when Lanczos ran out of budget; `kappa` is then a lower bound.
    pub converged: bool,
}

/// `S^{-1} A S^{-T}` with `S S^T = diag(A0, A1)` from Cholesky factors of the
/// diagonal blocks of `A`. Its spectrum is that of `diag(A0, A1)^{-1} A`.
pub struct SplitOperator<'a> {
    a: &'a CsrMatrix,
    split: BlockSplit,
}

/// Cholesky factors of the two diagonal blocks.
#[derive(Debug, Clone)]
pub struct BlockSplit {
    n0: usize,
    f0: Option<SkylineCholesky>,
    f1: Option<SkylineCholesky>,
}

impl BlockSplit {
    pub fn new(a0: &CsrMatrix, a1: &CsrMatrix) -> Result<Self> {
        let factor = |m: &CsrMatrix| -> Result<Option<SkylineCholesky>> {
            if m.nrows() == 0 {
                Ok(None)
            } else {
                SkylineCholesky::factor(m).map(Some)
            }
        };
        Ok(Self {
            n0: a0.nrows(),
            f0: factor(a0)?,
            f1: factor(a1)?,
        })
    }

    fn pieces(&self) -> [(usize, Option<&SkylineCholesky>); 2] {
        [(0, self.f0.as_ref()), (self.n0, self.f1.as_ref())]
    }

    fn dim(&self) -> usize {
        self.n0 + self.f1.as_ref().map_or(0, |f| f.dim())
    }
}

impl<'a> SplitOperator<'a> {
    pub fn new(a: &'a CsrMatrix, split: BlockSplit) -> Result<Self> {
        if a.nrows() != split.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator {} vs blocks {}",
                a.nrows(),
                split.dim()
            )));
        }
        Ok(Self { a, split })
    }
}

impl LinearOperator for SplitOperator<'_> {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut w = x.to_vec();
        for (off, f) in self.split.pieces() {
            if let Some(f) = f {
                let part = f.solve_upper(&x[off..off + f.dim()]);
                w[off..off + f.dim()].copy_from_slice(&part);
            }
        }
        let v = self.a.matvec(&w);
        for (off, f) in self.split.pieces() {
            if let Some(f) = f {
                let part = f.solve_lower(&v[off..off + f.dim()]);
                y[off..off + f.dim()].copy_from_slice(&part);
            }
        }
    }
}

/// Extreme eigenvalues of a symmetric positive definite operator.
pub fn estimate_condition<A: LinearOperator + ?Sized>(
    op: &A,
    mode: ConditionMode,
) -> Result<ConditionEstimate> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty operator".into()));
    }
    let dense = match mode {
        ConditionMode::Auto => n <= DENSE_LIMIT,
        ConditionMode::Dense => true,
        ConditionMode::Lanczos => false,
    };
    let (lambda_min, lambda_max, iterations, converged, method) = if dense {
        let (lo, hi) = dense_extremes(op);
        (lo, hi, n, true, EigenMethod::Dense)
    } else {
        let (lo, hi, it, conv) = lanczos_extremes(op, (5 * n).min(2000).min(n));
        (lo, hi, it, conv, EigenMethod::Lanczos)
    };
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite {
            row: 0,
            pivot: lambda_min,
        });
    }
    Ok(ConditionEstimate {
        lambda_min,
        lambda_max,
        kappa: lambda_max / lambda_min,
        method,
        iterations,
        converged,
    })
}

fn dense_extremes<A: LinearOperator + ?Sized>(op: &A) -> (f64, f64) {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        m.column_mut(j).copy_from_slice(&col);
    }
    let sym = (&m + m.transpose()) * 0.5;
    let ev = sym.symmetric_eigenvalues();
    (ev.min(), ev.max())
}

/// Extreme Ritz values of `T_m` and the residual bounds `beta_m |s_{m,i}|`.
fn ritz_extremes(alpha: &[f64], beta: &[f64]) -> (f64, f64, f64, f64) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (mut imin, mut imax) = (0, 0);
    for i in 0..m {
        if eig.eigenvalues[i] < eig.eigenvalues[imin] {
            imin = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[imax] {
            imax = i;
        }
    }
    let b = beta.get(m - 1).copied().unwrap_or(0.0);
    let res = |i: usize| (b * eig.eigenvectors[(m - 1, i)]).abs();
    (
        eig.eigenvalues[imin],
        eig.eigenvalues[imax],
        res(imin),
        res(imax),
    )
}

fn lanczos_extremes<A: LinearOperator + ?Sized>(op: &A, budget: usize) -> (f64, f64, usize, bool) {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = norm2(&q);
    q.iter_mut().for_each(|v| *v /= s);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last = (0.0, 0.0, false);
    let mut next_check = 10;
    for j in 0..budget {
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = norm2(&w);
        beta.push(b);
        let m = j + 1;
        let exhausted = b <= 1e-14 * a.abs().max(1.0) || m == budget;
        if m >= next_check || exhausted {
            let (lo, hi, rlo, rhi) = ritz_extremes(&alpha, &beta);
            let converged = rlo <= LANCZOS_TOL * lo.abs() && rhi <= LANCZOS_TOL * hi.abs();
            last = (lo, hi, converged);
            if converged || exhausted {
                return (
                    lo,
                    hi,
                    m,
                    converged || b <= 1e-14 * a.abs().max(1.0) || m == n,
                );
            }
            next_check = m + (m / 10).max(10);
        }
        basis.push(w.iter().map(|v| v / b).collect());
    }
    (last.0, last.1, budget, last.2)
}
