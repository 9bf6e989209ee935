//! Symmetric Gauss-Seidel.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

use super::Preconditioner;

/// One forward sweep followed by one backward sweep on `M z = r`, starting from
/// `z` (natural ordering).
pub fn sgs_sweep(m: &CsrMatrix, diag: &[f64], r: &[f64], z: &mut [f64]) {
    let n = m.nrows();
    for i in 0..n {
        let (cols, vals) = m.row(i);
        let mut s = r[i];
        for (&j, &a) in cols.iter().zip(vals) {
            if j != i {
                s -= a * z[j];
            }
        }
        z[i] = s / diag[i];
    }
    for i in (0..n).rev() {
        let (cols, vals) = m.row(i);
        let mut s = r[i];
        for (&j, &a) in cols.iter().zip(vals) {
            if j != i {
                s -= a * z[j];
            }
        }
        z[i] = s / diag[i];
    }
}

/// `z = (D + L) D^{-1} (D + U)` inverse applied to `r`, i.e. one symmetric sweep
/// from a zero initial guess.
pub fn sgs_apply(m: &CsrMatrix, r: &[f64]) -> Result<Vec<f64>> {
    let diag = checked_diagonal(m)?;
    let mut z = vec![0.0; r.len()];
    sgs_sweep(m, &diag, r, &mut z);
    Ok(z)
}

pub(crate) fn checked_diagonal(m: &CsrMatrix) -> Result<Vec<f64>> {
    let diag = m.diagonal();
    if let Some(row) = diag.iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDiagonal { row });
    }
    Ok(diag)
}

/// `sweeps` symmetric Gauss-Seidel iterations from zero, used as a preconditioner.
#[derive(Debug, Clone)]
pub struct SymmetricGaussSeidel {
    matrix: CsrMatrix,
    diag: Vec<f64>,
    sweeps: usize,
}

impl SymmetricGaussSeidel {
    pub fn new(matrix: CsrMatrix, sweeps: usize) -> Result<Self> {
        let diag = checked_diagonal(&matrix)?;
        Ok(Self {
            matrix,
            diag,
            sweeps: sweeps.max(1),
        })
    }
}

impl Preconditioner for SymmetricGaussSeidel {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.fill(0.0);
        for _ in 0..self.sweeps {
            sgs_sweep(&self.matrix, &self.diag, r, z);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 2.0);
            if i > 0 {
                b.push(i, i - 1, -1.0);
                b.push(i - 1, i, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn diagonal_matrix_is_solved_exactly() {
        let m = CsrMatrix::from_diagonal(&[2.0, 4.0, 8.0]);
        let z = sgs_apply(&m, &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(z, vec![1.0, 0.5, 0.25]);
    }

    #[test]
    fn stationary_iteration_contracts() {
        let m = tridiag(10);
        let n = 10;
        // iteration matrix I - P^{-1} M, column by column
        let mut e = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            let col = m.to_dense().column(j).iter().copied().collect::<Vec<_>>();
            let z = sgs_apply(&m, &col).unwrap();
            for i in 0..n {
                e[(i, j)] = if i == j { 1.0 } else { 0.0 } - z[i];
            }
        }
        let rho = e
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        assert!(rho < 1.0, "{rho}");
    }

    #[test]
    fn sweeps_are_symmetric() {
        let m = tridiag(25);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for sweeps in [1, 3] {
            let p = SymmetricGaussSeidel::new(m.clone(), sweeps).unwrap();
            let u: Vec<f64> = (0..25).map(|_| rng.random()).collect();
            let v: Vec<f64> = (0..25).map(|_| rng.random()).collect();
            let (mut pu, mut pv) = (vec![0.0; 25], vec![0.0; 25]);
            p.apply(&u, &mut pu);
            p.apply(&v, &mut pv);
            let a: f64 = pu.iter().zip(&v).map(|(x, y)| x * y).sum();
            let b: f64 = u.iter().zip(&pv).map(|(x, y)| x * y).sum();
            assert!((a - b).abs() < 1e-10 * a.abs());
        }
    }

    #[test]
    fn zero_diagonal_is_an_error() {
        let m = CsrMatrix::from_dense(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 1.0],
        ));
        assert!(matches!(
            sgs_apply(&m, &[1.0, 1.0]),
            Err(Error::ZeroDiagonal { row: 0 })
        ));
    }
}
