//! Positive diagonal symmetrizers.
//!
//! A matrix `A` is symmetrized by `Δ = diag(δ)` when `Δ A Δ⁻¹` is symmetric,
//! which is the detailed-balance condition `κ_i A_ij = κ_j A_ji` on the
//! weights `κ_i = δ_i²`.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::digraph::is_irreducible_tridiagonal;
use crate::linalg::{Matrix, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Symmetrizer {
    /// Diagonal of `Δ`.
    pub delta: Vec<f64>,
    /// Detailed-balance weights, `kappa[i] = delta[i]^2`.
    pub kappa: Vec<f64>,
}

impl Symmetrizer {
    pub fn from_kappa(kappa: Vec<f64>) -> Self {
        let delta = kappa.iter().map(|k| k.sqrt()).collect();
        Self { delta, kappa }
    }

    /// `Δ A Δ⁻¹`, with the residual asymmetry averaged away.
    pub fn symmetrize(&self, a: &Matrix) -> Matrix {
        let s = a.diagonal_similarity(&self.delta);
        Matrix::from_fn(s.order(), |i, j| 0.5 * (s[(i, j)] + s[(j, i)]))
    }

    /// Scale-free comparison of two weight vectors: on each connected
    /// component the ratios `self/other` must agree. Returns the worst relative
    /// spread of those ratios over the given components.
    pub fn ratio_spread(&self, other: &Symmetrizer, components: &[Vec<usize>]) -> f64 {
        let mut worst: f64 = 0.0;
        for comp in components {
            let ratios: Vec<f64> = comp.iter().map(|&v| self.kappa[v] / other.kappa[v]).collect();
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max((hi - lo) / hi.abs().max(f64::MIN_POSITIVE));
        }
        worst
    }
}

/// Why no positive diagonal symmetrizer exists.
#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum NotSymmetrizable {
    #[error("A[{i}][{j}] is nonzero but A[{j}][{i}] is zero")]
    AsymmetricPattern { i: usize, j: usize },
    #[error("A[{i}][{j}] and A[{j}][{i}] have opposite signs")]
    NonPositiveRatio { i: usize, j: usize },
    #[error("weights disagree around a cycle at edge ({i},{j}), relative residual {residual:e}")]
    InconsistentCycle { i: usize, j: usize, residual: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetrizeError {
    #[error("expected a nonnegative irreducible tridiagonal matrix")]
    NotIrreducibleTridiagonal,
}

/// Connected components of the undirected support (off-diagonal nonzeros),
/// each sorted, listed by smallest vertex.
pub fn support_components(a: &Matrix, tol: &Tolerance) -> Vec<Vec<usize>> {
    let n = a.order();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for root in 0..n {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[root] = id;
        let mut members = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if v != u && comp[v] == usize::MAX && (tol.is_nonzero(a[(u, v)]) || tol.is_nonzero(a[(v, u)])) {
                    comp[v] = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Decides whether positive weights `w` with `w_i A_ij = w_j A_ji` exist,
/// by propagating weights along a BFS spanning forest of the support and
/// checking every remaining edge.
pub fn find_symmetrizer(a: &Matrix, tol: &Tolerance) -> Result<Symmetrizer, NotSymmetrizable> {
    let n = a.order();
    for i in 0..n {
        for j in (i + 1)..n {
            let (aij, aji) = (a[(i, j)], a[(j, i)]);
            match (tol.is_nonzero(aij), tol.is_nonzero(aji)) {
                (true, false) => return Err(NotSymmetrizable::AsymmetricPattern { i, j }),
                (false, true) => return Err(NotSymmetrizable::AsymmetricPattern { i: j, j: i }),
                (true, true) if aij * aji <= 0.0 => return Err(NotSymmetrizable::NonPositiveRatio { i, j }),
                _ => {}
            }
        }
    }

    let mut w = vec![0.0; n];
    for root in 0..n {
        if w[root] != 0.0 {
            continue;
        }
        w[root] = 1.0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if v != u && w[v] == 0.0 && tol.is_nonzero(a[(u, v)]) {
                    w[v] = w[u] * a[(u, v)] / a[(v, u)];
                    queue.push_back(v);
                }
            }
        }
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if !tol.is_nonzero(a[(i, j)]) {
                continue;
            }
            let lhs = w[i] * a[(i, j)];
            let rhs = w[j] * a[(j, i)];
            let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
            if residual > tol.residual_tol {
                return Err(NotSymmetrizable::InconsistentCycle { i, j, residual });
            }
        }
    }
    Ok(Symmetrizer::from_kappa(w))
}

/// Closed-form weights for a nonnegative irreducible tridiagonal matrix:
/// `κ_i = (A_01 A_12 ⋯ A_{i-1,i}) / (A_10 A_21 ⋯ A_{i,i-1})`.
pub fn tridiagonal_symmetrizer(a: &Matrix, tol: &Tolerance) -> Result<Symmetrizer, SymmetrizeError> {
    if !is_irreducible_tridiagonal(a, tol) || a.has_negative_entry(0.0).is_some() {
        return Err(SymmetrizeError::NotIrreducibleTridiagonal);
    }
    let n = a.order();
    let mut kappa = Vec::with_capacity(n);
    kappa.push(1.0);
    for i in 1..n {
        kappa.push(kappa[i - 1] * a[(i - 1, i)] / a[(i, i - 1)]);
    }
    Ok(Symmetrizer::from_kappa(kappa))
}

/// `‖K A − Aᵗ K‖_max` for `K = diag(kappa)`.
pub fn detailed_balance_residual(a: &Matrix, kappa: &[f64]) -> f64 {
    let n = a.order();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((kappa[i] * a[(i, j)] - a[(j, i)] * kappa[j]).abs());
        }
    }
    worst
}
