//! Eigenmatrices and Krein parameters.
//!
//! The intersection matrices `B_j` commute and share the left eigenvectors
//! given by the rows of `P`. A seeded random combination `M = Σ c_j B_j`
//! separates the eigenspaces; `Δ = diag(√k)` symmetrizes `M`, so Jacobi
//! applies, and each eigenvector `u` of `ΔMΔ⁻¹` gives the row `uᵗΔ`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{IntersectionNumbers, SchemeError, ValidatedScheme};
use crate::linalg::{solve, sym_eigen, Matrix, Tolerance};

/// Attempts beyond the first when the random combination fails to separate.
pub const MAX_RETRIES: usize = 5;

/// Krein parameters `q^h_{ij}` flattened as `[h][i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinTensor {
    d: usize,
    data: Vec<f64>,
}

impl KreinTensor {
    /// `q^h_{ij}`.
    #[inline]
    pub fn get(&self, h: usize, i: usize, j: usize) -> f64 {
        let n = self.d + 1;
        self.data[(h * n + i) * n + j]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Residuals of the identities checked before [`eigendata`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenResiduals {
    /// `max(‖PQ − |X|I‖, ‖QP − |X|I‖)`
    pub pq: f64,
    /// `max_i max(|P_{i0} − 1|, |Q_{i0} − 1|)`
    pub first_column: f64,
    /// `max_j ‖P B_j − diag(P_{·j}) P‖`
    pub common_eigenvectors: f64,
    /// `max |q^h_{ij} − q^h_{ji}|`
    pub krein_symmetry: f64,
    /// `max |q^h_{i0} − δ_{hi}|`
    pub krein_unit: f64,
    /// `max |m_h q^h_{ij} − m_j q^j_{ih}|`
    pub krein_balance: f64,
    /// Smallest Krein parameter.
    pub krein_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeEigendata {
    pub x_size: usize,
    pub d: usize,
    /// First eigenmatrix: `A_j = Σ_i P_{ij} E_i`.
    pub p: Matrix,
    /// Second eigenmatrix: `E_j = |X|⁻¹ Σ_i Q_{ij} A_i`.
    pub q: Matrix,
    pub k: Vec<f64>,
    pub m: Vec<f64>,
    pub intersection: IntersectionNumbers,
    pub krein: KreinTensor,
    /// Seed the combination coefficients were drawn from.
    pub seed: u64,
    /// Number of combinations tried (1 unless a collision forced a retry).
    pub attempts: usize,
    pub coefficients: Vec<f64>,
    pub residuals: EigenResiduals,
    /// Tolerance each residual above was compared against, in field order.
    pub tolerances: EigenResiduals,
}

impl SchemeEigendata {
    pub(crate) fn check_index(&self, i: usize) -> Result<(), SchemeError> {
        if i > self.d {
            Err(SchemeError::IndexOutOfRange { index: i, d: self.d })
        } else {
            Ok(())
        }
    }

    /// Scale for judging Krein parameters against zero.
    pub fn krein_scale(&self) -> f64 {
        self.krein.max().abs().max(self.krein.min().abs()).max(1.0)
    }
}

fn invariant(invariant: &'static str, residual: f64, tolerance: f64) -> Result<(), SchemeError> {
    if residual > tolerance || residual.is_nan() {
        Err(SchemeError::Invariant { invariant, residual, tolerance })
    } else {
        Ok(())
    }
}

/// Orders eigenmatrix rows: the valency row first, the rest by descending
/// `P_{i1}` with later columns breaking near-ties.
fn order_rows(rows: &mut [Vec<f64>], k: &[f64], tie: f64) {
    let perron = (0..rows.len())
        .min_by(|&a, &b| {
            let da = rows[a].iter().zip(k).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let db = rows[b].iter().zip(k).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            da.total_cmp(&db)
        })
        .unwrap();
    rows.swap(0, perron);
    rows[1..].sort_by(|a, b| {
        for (x, y) in a.iter().zip(b).skip(1) {
            if (x - y).abs() > tie {
                return y.total_cmp(x);
            }
        }
        Ordering::Equal
    });
}

/// Computes `P`, `Q`, `m` and the Krein tensor, verifying every identity.
pub fn eigendata(scheme: &ValidatedScheme, tol: &Tolerance, seed: u64) -> Result<SchemeEigendata, SchemeError> {
    let d = scheme.d();
    let n = d + 1;
    let x = scheme.x_size() as f64;
    let k: Vec<f64> = scheme.valencies().iter().map(|&v| v as f64).collect();
    let sqrt_k: Vec<f64> = k.iter().map(|v| v.sqrt()).collect();
    let b: Vec<Matrix> = (0..n).map(|j| scheme.intersection_matrix(j)).collect::<Result<_, _>>()?;
    let b_scale = b.iter().map(Matrix::max_abs).fold(1.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_gap = 0.0;
    for attempt in 1..=MAX_RETRIES + 1 {
        let coefficients: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..=2.0)).collect();
        let mut m = Matrix::zeros(n);
        for (c, bj) in coefficients.iter().zip(&b) {
            m = m.add(&bj.scale(*c))?;
        }
        let s = m.diagonal_similarity(&sqrt_k);
        let s = Matrix::from_fn(n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
        let eig = sym_eigen(&s, tol)?;
        let spread = eig.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
        last_gap = eig.values.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        if n > 1 && last_gap <= tol.eig_tol * spread {
            continue;
        }
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let u = eig.vector(i);
                let l: Vec<f64> = u.iter().zip(&sqrt_k).map(|(a, b)| a * b).collect();
                l.iter().map(|v| v / l[0]).collect()
            })
            .collect();
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            continue;
        }
        order_rows(&mut rows, &k, tol.eig_tol * b_scale);
        let p = Matrix::from_rows(&rows)?;

        // every row must be a common left eigenvector of all B_j
        let mut common = 0.0f64;
        for (j, bj) in b.iter().enumerate() {
            let pb = p.matmul(bj);
            let dp = Matrix::from_fn(n, |i, c| p[(i, j)] * p[(i, c)]);
            common = common.max(pb.max_abs_diff(&dp));
        }
        let common_tol = tol.residual_tol * b_scale * p.max_abs().max(1.0);
        if common > common_tol {
            last_gap = last_gap.min(common);
            continue;
        }

        let q = solve(&p, &Matrix::identity(n).scale(x), tol)?;
        let scaled_i = Matrix::identity(n).scale(x);
        let pq = p.matmul(&q).max_abs_diff(&scaled_i).max(q.matmul(&p).max_abs_diff(&scaled_i));
        let first_column = (0..n).map(|i| (p[(i, 0)] - 1.0).abs().max((q[(i, 0)] - 1.0).abs())).fold(0.0, f64::max);
        let perron = p.row(0).iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let m_vec = q.row(0).to_vec();

        let krein = krein_from_q(&q, x, tol)?;
        let mut krein_symmetry = 0.0f64;
        let mut krein_unit = 0.0f64;
        let mut krein_balance = 0.0f64;
        for h in 0..n {
            for i in 0..n {
                krein_unit = krein_unit.max((krein.get(h, i, 0) - if h == i { 1.0 } else { 0.0 }).abs());
                for j in 0..n {
                    krein_symmetry = krein_symmetry.max((krein.get(h, i, j) - krein.get(h, j, i)).abs());
                    krein_balance =
                        krein_balance.max((m_vec[h] * krein.get(h, i, j) - m_vec[j] * krein.get(j, i, h)).abs());
                }
            }
        }
        let krein_min = krein.min();
        let krein_scale = krein.max().abs().max(1.0);
        let m_scale = m_vec.iter().map(|v| v.abs()).fold(1.0, f64::max);

        let residuals = EigenResiduals {
            pq,
            first_column: first_column.max(perron),
            common_eigenvectors: common,
            krein_symmetry,
            krein_unit,
            krein_balance,
            krein_min,
        };
        let tolerances = EigenResiduals {
            pq: tol.residual_tol * x,
            first_column: tol.residual_tol * b_scale,
            common_eigenvectors: common_tol,
            krein_symmetry: tol.residual_tol * krein_scale,
            krein_unit: tol.residual_tol * krein_scale,
            krein_balance: tol.residual_tol * krein_scale * m_scale,
            krein_min: -tol.residual_tol * krein_scale,
        };
        invariant("PQ = QP = |X|I", residuals.pq, tolerances.pq)?;
        invariant("P_{i0} = Q_{i0} = 1 and P_{0j} = k_j", residuals.first_column, tolerances.first_column)?;
        invariant("q^h_{ij} = q^h_{ji}", residuals.krein_symmetry, tolerances.krein_symmetry)?;
        invariant("q^h_{i0} = δ_{hi}", residuals.krein_unit, tolerances.krein_unit)?;
        invariant("m_h q^h_{ij} = m_j q^j_{ih}", residuals.krein_balance, tolerances.krein_balance)?;
        invariant("Krein nonnegativity", -krein_min, -tolerances.krein_min)?;

        return Ok(SchemeEigendata {
            x_size: scheme.x_size(),
            d,
            p,
            q,
            k,
            m: m_vec,
            intersection: scheme.intersection_numbers().clone(),
            krein,
            seed,
            attempts: attempt,
            coefficients,
            residuals,
            tolerances,
        });
    }
    Err(SchemeError::EigenvalueCollision { attempts: MAX_RETRIES + 1, gap: last_gap })
}

/// Expands `E_i ∘ E_j = |X|⁻¹ Σ_h q^h_{ij} E_h` in the adjacency basis:
/// comparing coefficients of `A_k` gives `Σ_h Q_{kh} q^h_{ij} = Q_{ki} Q_{kj}`.
fn krein_from_q(q: &Matrix, x: f64, tol: &Tolerance) -> Result<KreinTensor, SchemeError> {
    let n = q.order();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        let w = Matrix::from_fn(n, |row, j| q[(row, i)] * q[(row, j)]);
        let v = solve(q, &w, &Tolerance { residual_tol: tol.residual_tol * x.max(1.0), ..*tol })?;
        for h in 0..n {
            for j in 0..n {
                data[(h * n + i) * n + j] = v[(h, j)];
            }
        }
    }
    Ok(KreinTensor { d: n - 1, data })
}

/// Recomputes the Krein tensor from `Q`.
pub fn krein_parameters(ed: &SchemeEigendata, tol: &Tolerance) -> Result<KreinTensor, SchemeError> {
    krein_from_q(&ed.q, ed.x_size as f64, tol)
}

/// `B*_i`, with `(h, j)` entry `q^h_{ij}`; nonnegativity and symmetrization
/// by `diag(√m)` are checked.
pub fn krein_matrix(ed: &SchemeEigendata, i: usize, tol: &Tolerance) -> Result<Matrix, SchemeError> {
    ed.check_index(i)?;
    let n = ed.d + 1;
    let b = Matrix::from_fn(n, |h, j| ed.krein.get(h, i, j));
    let scale = ed.krein_scale();
    let min = b.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    invariant("Krein matrix nonnegativity", -min, tol.residual_tol * scale)?;
    let sqrt_m: Vec<f64> = ed.m.iter().map(|v| v.max(0.0).sqrt()).collect();
    let (_, _, gap) = b.diagonal_similarity(&sqrt_m).max_asymmetry();
    invariant("diag(√m) symmetrizes B*_i", gap, tol.residual_tol * scale)?;
    Ok(b)
}

/// `ρ(E_i)`: `(h, j)` entry `|X|⁻¹ Q_{hi} P_{ij}`.
pub fn rho_idempotent(ed: &SchemeEigendata, i: usize) -> Result<Matrix, SchemeError> {
    ed.check_index(i)?;
    let x = ed.x_size as f64;
    Ok(Matrix::from_fn(ed.d + 1, |h, j| ed.q[(h, i)] * ed.p[(i, j)] / x))
}

/// `ρ*(E*_i)`: `(h, j)` entry `|X|⁻¹ P_{hi} Q_{ij}`.
pub fn rho_dual_idempotent(ed: &SchemeEigendata, i: usize) -> Result<Matrix, SchemeError> {
    ed.check_index(i)?;
    let x = ed.x_size as f64;
    Ok(Matrix::from_fn(ed.d + 1, |h, j| ed.p[(h, i)] * ed.q[(i, j)] / x))
}

/// The `|X|×|X|` idempotent `E_j = |X|⁻¹ Σ_i Q_{ij} A_i`, for relations input.
pub fn full_idempotent(
    scheme: &ValidatedScheme,
    ed: &SchemeEigendata,
    j: usize,
) -> Result<Option<Matrix>, SchemeError> {
    ed.check_index(j)?;
    let x = scheme.x_size();
    if !scheme.has_relations() {
        return Ok(None);
    }
    Ok(Some(Matrix::from_fn(x, |a, b| {
        let i = scheme.relation_of(a, b).unwrap();
        ed.q[(i, j)] / x as f64
    })))
}
