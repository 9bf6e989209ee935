//! Envelope (skyline) Cholesky factorization with reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Reverse Cuthill-McKee ordering of the symmetric pattern of `a`.
///
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut nodes_by_degree: Vec<usize> = (0..n).collect();
    nodes_by_degree.sort_by_key(|&i| (degree[i], i));

    for &seed in &nodes_by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        let mut nbrs = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).0.iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Node of (approximately) maximal eccentricity in the component of `seed`.
fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..5 {
        let levels = bfs_levels(a, current);
        let max_level = *levels
            .iter()
            .filter(|&&l| l != usize::MAX)
            .max()
            .unwrap_or(&0);
        if max_level <= ecc && ecc > 0 {
            break;
        }
        ecc = max_level;
        current = (0..a.nrows())
            .filter(|&v| levels[v] == max_level)
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(current);
    }
    current
}

fn bfs_levels(a: &CsrMatrix, start: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; a.nrows()];
    let mut queue = VecDeque::new();
    level[start] = 0;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for &w in a.row(v).0 {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    level
}

/// `P A P^T = L L^T` with `L` stored row-wise over its envelope.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// First stored column of each row of `L`.
    first: Vec<usize>,
    /// Start of each row in `values`; row `i` holds columns `first[i]..=i`.
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineCholesky {
    /// Envelope size of `a` under RCM ordering, without factoring.
    pub fn envelope_size(a: &CsrMatrix) -> usize {
        let perm = reverse_cuthill_mckee(a);
        let (first, _) = envelope(a, &perm);
        first.iter().enumerate().map(|(i, &f)| i - f + 1).sum()
    }

    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(
                "Cholesky needs a square matrix".into(),
            ));
        }
        let n = a.nrows();
        let perm = reverse_cuthill_mckee(a);
        let (first, inv) = envelope(a, &perm);
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);
        let mut values = vec![0.0; total];
        for (new_i, &old_i) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old_i);
            for (&old_j, &v) in cols.iter().zip(vals) {
                let new_j = inv[old_j];
                if new_j <= new_i {
                    values[start[new_i] + new_j - first[new_i]] += v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let li = &values[row_i + k0 - fi..row_i + j - fi];
                let lj = &values[start[j] + k0 - fj..start[j] + j - fj];
                let s: f64 = li.iter().zip(lj).map(|(x, y)| x * y).sum();
                let djj = values[start[j] + j - fj];
                values[row_i + j - fi] = (values[row_i + j - fi] - s) / djj;
            }
            let row = &values[row_i..row_i + i - fi];
            let s: f64 = row.iter().map(|x| x * x).sum();
            let pivot = values[row_i + i - fi] - s;
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    row: perm[i],
                    pivot,
                });
            }
            values[row_i + i - fi] = pivot.sqrt();
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn envelope_len(&self) -> usize {
        self.values.len()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.values[self.start[i] + j - self.first[i]]
    }

    /// `y = L^{-1} P b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i] + i - fi];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - s) / self.entry(i, i);
        }
        y
    }

    /// `x = P^T L^{-T} y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let mut z = y.to_vec();
        for i in (0..self.n).rev() {
            z[i] /= self.entry(i, i);
            let zi = z[i];
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i] + i - fi];
            for (zj, l) in z[fi..i].iter_mut().zip(row) {
                *zj -= l * zi;
            }
        }
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = z[new];
        }
        x
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }
}

/// First column of the envelope of each permuted row, and the inverse permutation.
fn envelope(a: &CsrMatrix, perm: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = a.nrows();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut first: Vec<usize> = (0..n).collect();
    for (new_i, &old_i) in perm.iter().enumerate() {
        for &old_j in a.row(old_i).0 {
            let new_j = inv[old_j];
            if new_j < first[new_i] {
                first[new_i] = new_j;
            }
        }
    }
    (first, inv)
}
