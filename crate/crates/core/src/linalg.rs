//! Dense real matrices sized for desk-scale spectral problems.
//!
//! Everything here is square and row-major. The symmetric eigensolver is a
//! cyclic Jacobi iteration; linear solves use Gaussian elimination with
//! partial pivoting. Non-symmetric eigenproblems are deliberately absent:
//! callers route those through a diagonal symmetrizer first.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sweep cap for the Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("matrix order must be positive")]
    Empty,
    #[error("entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric: |S[{row},{col}] - S[{col},{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix is singular: pivot {pivot} has magnitude {magnitude:e}")]
    Singular { pivot: usize, magnitude: f64 },
    #[error("{what} residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { what: &'static str, residual: f64, tolerance: f64 },
}

/// Numerical thresholds shared by every decision in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// An entry with magnitude at or below this counts as zero.
    pub zero_tol: f64,
    /// Eigenvalue distinctness threshold.
    pub eig_tol: f64,
    /// Threshold for verifying identities after a computation.
    pub residual_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { zero_tol: 1e-10, eig_tol: 1e-8, residual_tol: 1e-8 }
    }
}

impl Tolerance {
    /// Entry-is-nonzero test.
    #[inline]
    pub fn is_nonzero(&self, x: f64) -> bool {
        x.abs() > self.zero_tol
    }
}

/// Dense square matrix of `f64`, rows and columns indexed `0..n`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows, rejecting ragged, empty or non-finite input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(LinalgError::Ragged { row: i, len: row.len(), expected: n });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
                data.push(v);
            }
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Standard matrix product.
    pub fn multiply(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(self.matmul(other))
    }

    pub(crate) fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch { left: self.n, right: other.n });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { n: self.n, data })
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|&x| c * x).collect() }
    }

    /// `A - theta * I`.
    pub fn shifted(&self, theta: f64) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= theta;
        }
        m
    }

    pub fn power(&self, r: usize) -> Matrix {
        let mut out = Matrix::identity(self.n);
        for _ in 0..r {
            out = out.matmul(self);
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n, "max_abs_diff: order mismatch");
        self.data.iter().zip(&other.data).fold(0.0, |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Worst asymmetry `(i, j, |A_ij - A_ji|)`.
    pub fn max_asymmetry(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap > worst.2 {
                    worst = (i, j, gap);
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_asymmetry().2 <= tol
    }

    /// `(Λ A Λ⁻¹)` for the permutation sending position `i` to vertex `ordering[i]`,
    /// i.e. the entry `(i, j)` of the result is `A[ordering[i], ordering[j]]`.
    pub fn permuted(&self, ordering: &[usize]) -> Matrix {
        assert_eq!(ordering.len(), self.n, "ordering length must equal the order");
        Matrix::from_fn(self.n, |i, j| self[(ordering[i], ordering[j])])
    }

    /// `Δ A Δ⁻¹` for `Δ = diag(delta)`.
    pub fn diagonal_similarity(&self, delta: &[f64]) -> Matrix {
        assert_eq!(delta.len(), self.n);
        Matrix::from_fn(self.n, |i, j| delta[i] * self[(i, j)] / delta[j])
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn has_negative_entry(&self, below: f64) -> Option<(usize, usize, f64)> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self[(i, j)];
                if v < below {
                    return Some((i, j, v));
                }
            }
        }
        None
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.n, self.n)?;
        for row in self.rows() {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, Vec<f64>)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (v, self.vector(i)))
    }
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Input symmetry is checked against `zero_tol` scaled by the largest entry;
/// the reconstruction `S - V D Vᵗ` is checked against `residual_tol` likewise.
pub fn sym_eigen(s: &Matrix, tol: &Tolerance) -> Result<SymEigen, LinalgError> {
    let n = s.order();
    let scale = s.max_abs().max(1.0);
    let (row, col, gap) = s.max_asymmetry();
    if gap > tol.zero_tol * scale {
        return Err(LinalgError::NotSymmetric { row, col, gap });
    }

    let mut a = Matrix::from_fn(n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut v = Matrix::identity(n);
    let frob = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();

    let off_norm = |a: &Matrix| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        acc.sqrt()
    };

    let mut converged = n <= 1;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off = off_norm(&a);
        if off <= f64::EPSILON * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                // A <- Jᵗ A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > f64::EPSILON * frob {
            return Err(LinalgError::NoConvergence { sweeps: MAX_JACOBI_SWEEPS, off_norm: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);

    let recon = Matrix::from_fn(n, |i, j| (0..n).map(|k| vectors[(i, k)] * values[k] * vectors[(j, k)]).sum());
    let residual = recon.max_abs_diff(s);
    let limit = tol.residual_tol * scale;
    if residual > limit {
        return Err(LinalgError::Residual { what: "eigen-reconstruction", residual, tolerance: limit });
    }
    Ok(SymEigen { values, vectors })
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
///
/// A pivot whose magnitude is at or below `zero_tol * max|A|` is reported as
/// singular.
pub fn solve(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<Matrix, LinalgError> {
    let n = a.order();
    if b.order() != n {
        return Err(LinalgError::DimensionMismatch { left: n, right: b.order() });
    }
    let scale = a.max_abs();
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let (piv, mag) =
            (col..n)
                .map(|r| (r, lu[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= tol.zero_tol * scale || mag == 0.0 {
            return Err(LinalgError::Singular { pivot: col, magnitude: mag });
        }
        if piv != col {
            for k in 0..n {
                lu.data.swap(col * n + k, piv * n + k);
                x.data.swap(col * n + k, piv * n + k);
            }
        }
        let p = lu[(col, col)];
        for r in (col + 1)..n {
            let factor = lu[(r, col)] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                lu[(r, k)] -= factor * lu[(col, k)];
            }
            for k in 0..n {
                x[(r, k)] -= factor * x[(col, k)];
            }
        }
    }
    for col in (0..n).rev() {
        let p = lu[(col, col)];
        for k in 0..n {
            let mut acc = x[(col, k)];
            for j in (col + 1)..n {
                acc -= lu[(col, j)] * x[(j, k)];
            }
            x[(col, k)] = acc / p;
        }
    }

    let residual = a.matmul(&x).max_abs_diff(b);
    let limit = tol.residual_tol * (scale * x.max_abs()).max(b.max_abs()).max(1.0);
    if residual > limit {
        return Err(LinalgError::Residual { what: "solve", residual, tolerance: limit });
    }
    Ok(x)
}

/// Numeric rank of the span of `columns`, each scaled to unit length first.
///
/// Modified Gram-Schmidt with column pivoting runs until the largest
/// remaining residual norm drops to `rel_tol` or below.
pub fn numeric_rank(columns: &[Vec<f64>], rel_tol: f64) -> usize {
    let work = columns
        .iter()
        .filter_map(|c| {
            let norm = l2(c);
            (norm > 0.0).then(|| c.iter().map(|x| x / norm).collect())
        })
        .collect();
    pivoted_rank(work, rel_tol)
}

/// Numeric rank of a square matrix: columns whose residual norm falls to
/// `abs_tol` or below are treated as dependent.
pub fn matrix_rank(a: &Matrix, abs_tol: f64) -> usize {
    pivoted_rank((0..a.order()).map(|j| a.column(j)).collect(), abs_tol)
}

fn pivoted_rank(mut work: Vec<Vec<f64>>, threshold: f64) -> usize {
    let mut rank = 0;
    while !work.is_empty() {
        let (best, norm) =
            work.iter()
                .enumerate()
                .map(|(i, c)| (i, l2(c)))
                .fold((0, -1.0), |b, cur| if cur.1 > b.1 { cur } else { b });
        if norm <= threshold {
            break;
        }
        let q: Vec<f64> = work.swap_remove(best).iter().map(|x| x / norm).collect();
        rank += 1;
        for c in &mut work {
            // two passes keep the projection orthogonal to working precision
            for _ in 0..2 {
                let dot: f64 = c.iter().zip(&q).map(|(a, b)| a * b).sum();
                for (x, &qv) in c.iter_mut().zip(&q) {
                    *x -= dot * qv;
                }
            }
        }
    }
    rank
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
