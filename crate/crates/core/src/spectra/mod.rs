//! Multiplicity-free classification and primitive idempotents.
//!
//! For a multiplicity-free `A` with eigenvalues `θ_0 > ... > θ_d`, the
//! primitive idempotents are
//!
//! ```text
//! E_i = Π_{j≠i} (A − θ_j I) / (θ_i − θ_j)
//! ```
//!
//! and `f_i(λ) = Π_{j≠i} (λ − θ_j)` satisfies `f_i(A) = f_i(θ_i) E_i`. The
//! entry-product profile `c_i = (E_i)_{st} f_i(θ_i)` is therefore the
//! `(s, t)` entry of `f_i(A)`, and that is how it is computed here: no
//! division by the possibly tiny `f_i(θ_i)` is involved.

pub mod charpoly;

use serde::Serialize;
use thiserror::Error;

use crate::digraph::gamma;
use crate::linalg::{matrix_rank, sym_eigen, LinalgError, Matrix, Tolerance};
use crate::symmetrize::{find_symmetrizer, NotSymmetrizable, Symmetrizer};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("eigenvalues are not distinct: θ_{i} and θ_{j} differ by {gap:e}")]
    NotDistinct { i: usize, j: usize, gap: f64 },
    #[error("{identity} violated: residual {residual:e} exceeds {tolerance:e}")]
    IdentityViolation { identity: &'static str, residual: f64, tolerance: f64 },
    #[error("f_{index}(θ_{index}) = {value:e} is degenerate")]
    DegenerateSpectrum { index: usize, value: f64 },
    #[error("matrix is not multiplicity-free ({0})")]
    NotMultiplicityFree(&'static str),
    #[error("index {index} out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected {expected} eigenvalues, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Distinct eigenvalues (descending) of a multiplicity-free matrix with the
/// matching primitive idempotents.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    theta: Vec<f64>,
    idempotents: Vec<Matrix>,
    residuals: SpectrumResiduals,
}

/// Worst deviations from the defining identities, measured at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumResiduals {
    /// `‖Σ E_i − I‖_max`
    pub resolution: f64,
    /// `max_{i,j} ‖E_i E_j − δ_ij E_i‖_max`
    pub orthogonality: f64,
    /// `‖A − Σ θ_i E_i‖_max`
    pub reconstruction: f64,
    /// `max_i ‖E_i‖_max`, the scale against which the first two are judged.
    pub idempotent_scale: f64,
}

impl Spectrum {
    /// Validates `Σ E_i = I`, `E_i E_j = δ_ij E_i` and `A = Σ θ_i E_i`.
    ///
    /// The first two are compared against `residual_tol · max(1, max ‖E_i‖)`
    /// and the third additionally scaled by `max(1, ‖A‖)`.
    pub fn new(a: &Matrix, theta: Vec<f64>, idempotents: Vec<Matrix>, tol: &Tolerance) -> Result<Self, SpectraError> {
        let n = a.order();
        if theta.len() != n || idempotents.len() != n {
            return Err(SpectraError::WrongCount { expected: n, found: theta.len().min(idempotents.len()) });
        }
        check_distinct(&theta, tol, spectral_scale(&theta))?;
        let residuals = measure_residuals(a, &theta, &idempotents);
        let base = tol.residual_tol * residuals.idempotent_scale.max(1.0);
        if residuals.resolution > base {
            return Err(SpectraError::IdentityViolation {
                identity: "sum of idempotents equals identity",
                residual: residuals.resolution,
                tolerance: base,
            });
        }
        if residuals.orthogonality > base {
            return Err(SpectraError::IdentityViolation {
                identity: "idempotent orthogonality",
                residual: residuals.orthogonality,
                tolerance: base,
            });
        }
        let recon_limit = base * a.max_abs().max(1.0);
        if residuals.reconstruction > recon_limit {
            return Err(SpectraError::IdentityViolation {
                identity: "spectral reconstruction",
                residual: residuals.reconstruction,
                tolerance: recon_limit,
            });
        }
        Ok(Self { theta, idempotents, residuals })
    }

    /// `d`, one less than the matrix order.
    pub fn d(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn idempotents(&self) -> &[Matrix] {
        &self.idempotents
    }

    pub fn idempotent(&self, i: usize) -> &Matrix {
        &self.idempotents[i]
    }

    pub fn residuals(&self) -> SpectrumResiduals {
        self.residuals
    }
}

pub fn measure_residuals(a: &Matrix, theta: &[f64], idempotents: &[Matrix]) -> SpectrumResiduals {
    let n = a.order();
    let mut sum = Matrix::zeros(n);
    let mut recon = Matrix::zeros(n);
    for (e, &t) in idempotents.iter().zip(theta) {
        sum = sum.add(e).expect("orders agree");
        recon = recon.add(&e.scale(t)).expect("orders agree");
    }
    let mut orthogonality: f64 = 0.0;
    for (i, ei) in idempotents.iter().enumerate() {
        for (j, ej) in idempotents.iter().enumerate() {
            let prod = ei.matmul(ej);
            let dev = if i == j { prod.max_abs_diff(ei) } else { prod.max_abs() };
            orthogonality = orthogonality.max(dev);
        }
    }
    SpectrumResiduals {
        resolution: sum.max_abs_diff(&Matrix::identity(n)),
        orthogonality,
        reconstruction: recon.max_abs_diff(a),
        idempotent_scale: idempotents.iter().map(Matrix::max_abs).fold(0.0, f64::max),
    }
}

/// How the eigenvalues were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectralRoute {
    /// Jacobi on `Δ A Δ⁻¹` for a positive diagonal symmetrizer `Δ`.
    Symmetrized,
    /// Strongly connected blocks of the pattern, each through a symmetrizer
    /// when one exists and through its characteristic polynomial otherwise.
    BlockCharacteristic,
}

/// One eigenvalue cluster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCluster {
    pub value: f64,
    pub algebraic: usize,
    /// `n − rank(A − θI)`, measured only for repeated eigenvalues.
    pub geometric: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralDiagnostics {
    pub route: SpectralRoute,
    /// Real eigenvalue clusters, descending.
    pub eigenvalues: Vec<EigenCluster>,
    /// Number of non-real eigenvalues (counted with multiplicity).
    pub complex_count: usize,
    /// Smallest gap between adjacent distinct eigenvalues.
    pub min_gap: Option<f64>,
    /// Threshold the gaps were compared against.
    pub gap_threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum SpectralTag {
    MultiplicityFree(Spectrum),
    DiagonalizableNotMF,
    NotDiagonalizable,
    ComplexSpectrum,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralClass {
    pub tag: SpectralTag,
    pub diagnostics: SpectralDiagnostics,
    /// Outcome of the symmetrizer search that chose the route.
    pub symmetrizer: Result<Symmetrizer, NotSymmetrizable>,
}

impl SpectralClass {
    pub fn name(&self) -> &'static str {
        match self.tag {
            SpectralTag::MultiplicityFree(_) => "MultiplicityFree",
            SpectralTag::DiagonalizableNotMF => "DiagonalizableNotMF",
            SpectralTag::NotDiagonalizable => "NotDiagonalizable",
            SpectralTag::ComplexSpectrum => "ComplexSpectrum",
        }
    }

    pub fn spectrum(&self) -> Option<&Spectrum> {
        match &self.tag {
            SpectralTag::MultiplicityFree(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.spectrum().is_some()
    }

    pub fn is_diagonalizable(&self) -> bool {
        matches!(self.tag, SpectralTag::MultiplicityFree(_) | SpectralTag::DiagonalizableNotMF)
    }
}

pub(crate) fn spectral_scale(theta: &[f64]) -> f64 {
    theta.iter().fold(1.0, |m: f64, t| m.max(t.abs()))
}

pub(crate) fn check_distinct(theta: &[f64], tol: &Tolerance, scale: f64) -> Result<(), SpectraError> {
    for i in 0..theta.len() {
        for j in (i + 1)..theta.len() {
            let gap = (theta[i] - theta[j]).abs();
            if gap <= tol.eig_tol * scale {
                return Err(SpectraError::NotDistinct { i, j, gap });
            }
        }
    }
    Ok(())
}

/// Groups descending eigenvalues whose neighbours lie within `threshold`.
fn cluster(sorted_desc: &[f64], threshold: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in sorted_desc {
        match out.last_mut() {
            Some((sum, count, last)) if (*last - v).abs() <= threshold => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(sum, count, _)| (sum / count as f64, count)).collect()
}

fn min_gap(values: &[f64]) -> Option<f64> {
    values.windows(2).map(|w| (w[0] - w[1]).abs()).reduce(f64::min)
}

/// Strongly connected components of the pattern digraph with loops, via
/// Kosaraju's two passes.
pub(crate) fn strong_components(a: &Matrix, tol: &Tolerance) -> Vec<Vec<usize>> {
    let g = gamma(a, tol, true);
    let n = g.vertex_count();
    let mut visited = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((v, idx)) = stack.pop() {
            let nbrs = g.out_neighbors(v);
            if idx < nbrs.len() {
                stack.push((v, idx + 1));
                let w = nbrs[idx];
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                finish.push(v);
            }
        }
    }
    let mut reverse = vec![Vec::new(); n];
    for (i, j) in g.arcs() {
        reverse[j].push(i);
    }
    let mut comp = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for &root in finish.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = comps.len();
        comp[root] = id;
        let mut members = vec![root];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &reverse[v] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

fn submatrix(a: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(idx.len(), |i, j| a[(idx[i], idx[j])])
}

/// Real eigenvalues of a block plus the count of non-real ones.
fn block_eigenvalues(block: &Matrix, tol: &Tolerance) -> Result<(Vec<f64>, usize), SpectraError> {
    if block.order() == 1 {
        return Ok((vec![block[(0, 0)]], 0));
    }
    if let Ok(sym) = find_symmetrizer(block, tol) {
        let eig = sym_eigen(&sym.symmetrize(block), tol)?;
        return Ok((eig.values, 0));
    }
    let coeffs = charpoly::characteristic_polynomial(block);
    let mut real = Vec::new();
    for (root, mult) in charpoly::real_roots(&coeffs) {
        real.extend(std::iter::repeat_n(root, mult));
    }
    let complex = block.order().saturating_sub(real.len());
    Ok((real, complex))
}

/// Classifies `A` as multiplicity-free, diagonalizable with a repeated
/// eigenvalue, not diagonalizable, or having non-real eigenvalues.
///
/// A positive diagonal symmetrizer, when one exists, makes the spectrum real
/// and the matrix diagonalizable; Jacobi on the symmetrized matrix then gives
/// eigenvalues and orthonormal eigenvectors, from which `E_i = Δ⁻¹ v_i v_iᵗ Δ`.
/// Otherwise the pattern is split into strongly connected blocks (the
/// spectrum of `A` is the union of the block spectra), and repeated
/// eigenvalues are tested for diagonalizability through `rank(A − θI)`.
///
/// Errors only on numerical breakdown (Jacobi divergence or an idempotent
/// identity failing verification).
pub fn classify(a: &Matrix, tol: &Tolerance) -> Result<SpectralClass, SpectraError> {
    let n = a.order();
    let symmetrizer = find_symmetrizer(a, tol);
    if let Ok(sym) = &symmetrizer {
        let eig = sym_eigen(&sym.symmetrize(a), tol)?;
        let scale = spectral_scale(&eig.values);
        let threshold = tol.eig_tol * scale;
        let clusters = cluster(&eig.values, threshold);
        let diagnostics = SpectralDiagnostics {
            route: SpectralRoute::Symmetrized,
            eigenvalues: clusters
                .iter()
                .map(|&(value, algebraic)| EigenCluster {
                    value,
                    algebraic,
                    geometric: (algebraic > 1).then_some(algebraic),
                })
                .collect(),
            complex_count: 0,
            min_gap: min_gap(&eig.values),
            gap_threshold: threshold,
        };
        let tag = if clusters.len() == n {
            let idempotents = (0..n)
                .map(|i| {
                    let v = eig.vector(i);
                    Matrix::from_fn(n, |s, t| v[s] * v[t] * sym.delta[t] / sym.delta[s])
                })
                .collect();
            SpectralTag::MultiplicityFree(Spectrum::new(a, eig.values.clone(), idempotents, tol)?)
        } else {
            SpectralTag::DiagonalizableNotMF
        };
        return Ok(SpectralClass { tag, diagnostics, symmetrizer });
    }

    let mut real = Vec::with_capacity(n);
    let mut complex_count = 0;
    for comp in strong_components(a, tol) {
        let (vals, cplx) = block_eigenvalues(&submatrix(a, &comp), tol)?;
        real.extend(vals);
        complex_count += cplx;
    }
    real.sort_by(|x, y| y.total_cmp(x));
    let scale = spectral_scale(&real);
    let threshold = tol.eig_tol * scale;
    let clusters = cluster(&real, threshold);
    let rank_tol = tol.eig_tol * a.max_abs().max(1.0);
    let eigenvalues: Vec<EigenCluster> = clusters
        .iter()
        .map(|&(value, algebraic)| EigenCluster {
            value,
            algebraic,
            geometric: (algebraic > 1).then(|| n - matrix_rank(&a.shifted(value), rank_tol)),
        })
        .collect();
    let diagnostics = SpectralDiagnostics {
        route: SpectralRoute::BlockCharacteristic,
        eigenvalues: eigenvalues.clone(),
        complex_count,
        min_gap: min_gap(&real),
        gap_threshold: threshold,
    };
    let tag = if complex_count > 0 {
        SpectralTag::ComplexSpectrum
    } else if eigenvalues.iter().any(|c| c.geometric.is_some_and(|g| g < c.algebraic)) {
        SpectralTag::NotDiagonalizable
    } else if clusters.len() < n {
        SpectralTag::DiagonalizableNotMF
    } else {
        let theta: Vec<f64> = clusters.iter().map(|c| c.0).collect();
        let idempotents = primitive_idempotents(a, &theta, tol)?;
        SpectralTag::MultiplicityFree(Spectrum::new(a, theta, idempotents, tol)?)
    };
    Ok(SpectralClass { tag, diagnostics, symmetrizer })
}

/// `Π_{j≠i} (A − θ_j I)`, factors applied in descending `|θ_i − θ_j|` order.
pub fn f_matrix(a: &Matrix, theta: &[f64], i: usize) -> Matrix {
    let mut others: Vec<usize> = (0..theta.len()).filter(|&j| j != i).collect();
    others.sort_by(|&x, &y| (theta[i] - theta[y]).abs().total_cmp(&(theta[i] - theta[x]).abs()));
    let mut prod = Matrix::identity(a.order());
    for j in others {
        prod = prod.matmul(&a.shifted(theta[j]));
    }
    prod
}

/// Primitive idempotents by the product formula, verified before return.
pub fn primitive_idempotents(a: &Matrix, theta: &[f64], tol: &Tolerance) -> Result<Vec<Matrix>, SpectraError> {
    if theta.len() != a.order() {
        return Err(SpectraError::WrongCount { expected: a.order(), found: theta.len() });
    }
    check_distinct(theta, tol, spectral_scale(theta))?;
    let mut out = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let mut others: Vec<usize> = (0..theta.len()).filter(|&j| j != i).collect();
        others.sort_by(|&x, &y| (theta[i] - theta[y]).abs().total_cmp(&(theta[i] - theta[x]).abs()));
        let mut e = Matrix::identity(a.order());
        for j in others {
            e = e.matmul(&a.shifted(theta[j])).scale(1.0 / (theta[i] - theta[j]));
        }
        out.push(e);
    }
    let residuals = measure_residuals(a, theta, &out);
    let base = tol.residual_tol * residuals.idempotent_scale.max(1.0);
    let worst = residuals.resolution.max(residuals.orthogonality);
    if worst > base {
        return Err(SpectraError::IdentityViolation {
            identity: "primitive idempotent identities",
            residual: worst,
            tolerance: base,
        });
    }
    let limit = base * a.max_abs().max(1.0);
    if residuals.reconstruction > limit {
        return Err(SpectraError::IdentityViolation {
            identity: "spectral reconstruction",
            residual: residuals.reconstruction,
            tolerance: limit,
        });
    }
    Ok(out)
}

/// `f_i(θ_i) = Π_{j≠i} (θ_i − θ_j)`.
pub fn f_eval(theta: &[f64], i: usize, tol: &Tolerance) -> Result<f64, SpectraError> {
    if i >= theta.len() {
        return Err(SpectraError::IndexOutOfRange { index: i, n: theta.len() });
    }
    let value: f64 = (0..theta.len()).filter(|&j| j != i).map(|j| theta[i] - theta[j]).product();
    let d = theta.len() as i32 - 1;
    if !value.is_finite() || value == 0.0 || (d > 0 && value.abs() <= tol.eig_tol.powi(d)) {
        return Err(SpectraError::DegenerateSpectrum { index: i, value });
    }
    Ok(value)
}

/// Entry-product profile `c_i = (E_i)_{st} f_i(θ_i)` with its constancy verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub s: usize,
    pub t: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    /// `max_i |c_i − mean|`
    pub deviation: f64,
    /// `residual_tol · max(‖A‖_max, 1 if A = 0)^d`
    pub threshold: f64,
    pub is_constant: bool,
    /// Constant but indistinguishable from zero.
    pub constant_zero: bool,
    pub common_value: Option<f64>,
}

impl Profile {
    /// Constant with a nonzero common value.
    pub fn is_constant_nonzero(&self) -> bool {
        self.common_value.is_some()
    }
}

/// Threshold for profile constancy: `c_i` is homogeneous of degree `d` in
/// `A`, so the comparison scales with `‖A‖_max^d`.
pub fn profile_threshold(a: &Matrix, tol: &Tolerance) -> f64 {
    let norm = a.max_abs();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    tol.residual_tol * scale.powi(a.order() as i32 - 1)
}

/// The matrices `f_i(A)`, from which every `(s, t)` profile is read off.
#[derive(Debug, Clone)]
pub struct ScaledIdempotents {
    pub f_matrices: Vec<Matrix>,
    pub threshold: f64,
}

impl ScaledIdempotents {
    pub fn new(a: &Matrix, spectrum: &Spectrum, tol: &Tolerance) -> Self {
        let theta = spectrum.theta();
        Self {
            f_matrices: (0..theta.len()).map(|i| f_matrix(a, theta, i)).collect(),
            threshold: profile_threshold(a, tol),
        }
    }

    pub fn profile(&self, s: usize, t: usize) -> Profile {
        let values: Vec<f64> = self.f_matrices.iter().map(|f| f[(s, t)]).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let deviation = values.iter().fold(0.0, |m: f64, c| m.max((c - mean).abs()));
        let is_constant = deviation <= self.threshold;
        let nonzero = mean.abs() > self.threshold;
        Profile {
            s,
            t,
            values,
            mean,
            deviation,
            threshold: self.threshold,
            is_constant,
            constant_zero: is_constant && !nonzero,
            common_value: (is_constant && nonzero).then_some(mean),
        }
    }
}

/// Profile of `A` at `(s, t)`; `A` must classify as multiplicity-free.
pub fn entry_product_profile(a: &Matrix, s: usize, t: usize, tol: &Tolerance) -> Result<Profile, SpectraError> {
    let n = a.order();
    for idx in [s, t] {
        if idx >= n {
            return Err(SpectraError::IndexOutOfRange { index: idx, n });
        }
    }
    let class = classify(a, tol)?;
    let spectrum = class.spectrum().ok_or(SpectraError::NotMultiplicityFree(class.name()))?;
    Ok(ScaledIdempotents::new(a, spectrum, tol).profile(s, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn path3() -> Matrix {
        m(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]])
    }

    #[test]
    fn classify_examples() {
        let tol = Tolerance::default();
        let c = classify(&Matrix::diagonal(&[1.0, 2.0, 3.0]), &tol).unwrap();
        assert_eq!(c.spectrum().unwrap().theta(), &[3.0, 2.0, 1.0]);

        let c = classify(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), &tol).unwrap();
        assert!(matches!(c.tag, SpectralTag::NotDiagonalizable));
        assert_eq!(c.diagnostics.eigenvalues, vec![EigenCluster { value: 0.0, algebraic: 2, geometric: Some(1) }]);

        let c = classify(&path3(), &tol).unwrap();
        let r2 = 2f64.sqrt();
        for (got, want) in c.spectrum().unwrap().theta().iter().zip([r2, 0.0, -r2]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn classify_other_tags() {
        let tol = Tolerance::default();
        let c = classify(&Matrix::identity(3), &tol).unwrap();
        assert!(matches!(c.tag, SpectralTag::DiagonalizableNotMF));

        let cyc = m(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let c = classify(&cyc, &tol).unwrap();
        assert!(matches!(c.tag, SpectralTag::ComplexSpectrum));
        assert_eq!(c.diagnostics.complex_count, 2);

        // upper triangular with a repeated diagonal value but a zero coupling
        let a = m(&[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 5.0]]);
        let c = classify(&a, &tol).unwrap();
        assert!(matches!(c.tag, SpectralTag::DiagonalizableNotMF), "{}", c.name());

        // non-symmetrizable but multiplicity-free
        let a = m(&[&[1.0, 1.0], &[0.0, 2.0]]);
        let c = classify(&a, &tol).unwrap();
        assert_eq!(c.spectrum().unwrap().theta(), &[2.0, 1.0]);
        assert_eq!(c.diagnostics.route, SpectralRoute::BlockCharacteristic);
    }

    #[test]
    fn idempotent_examples() {
        let tol = Tolerance::default();
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = primitive_idempotents(&a, &[1.0, -1.0], &tol).unwrap();
        assert_eq!(e[0], m(&[&[0.5, 0.5], &[0.5, 0.5]]));
        assert_eq!(e[1], m(&[&[0.5, -0.5], &[-0.5, 0.5]]));

        let e = primitive_idempotents(&m(&[&[4.2]]), &[4.2], &tol).unwrap();
        assert_eq!(e[0], Matrix::identity(1));

        let r2 = 2f64.sqrt();
        let e = primitive_idempotents(&path3(), &[r2, 0.0, -r2], &tol).unwrap();
        let want = m(&[&[0.5, 0.0, -0.5], &[0.0, 0.0, 0.0], &[-0.5, 0.0, 0.5]]);
        assert!(e[1].max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn idempotents_reject_wrong_eigenvalues() {
        let tol = Tolerance::default();
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let err = primitive_idempotents(&a, &[1.0, -0.5], &tol).unwrap_err();
        assert!(matches!(err, SpectraError::IdentityViolation { .. }));
        let err = primitive_idempotents(&a, &[1.0, 1.0], &tol).unwrap_err();
        assert!(matches!(err, SpectraError::NotDistinct { .. }));
    }

    #[test]
    fn f_eval_examples() {
        let tol = Tolerance::default();
        assert_eq!(f_eval(&[1.0, -1.0], 0, &tol).unwrap(), 2.0);
        let r2 = 2f64.sqrt();
        assert!((f_eval(&[r2, 0.0, -r2], 1, &tol).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(f_eval(&[3.0, 1.0, -1.0, -3.0], 0, &tol).unwrap(), 48.0);
        assert!(matches!(f_eval(&[1.0, 1.0], 0, &tol), Err(SpectraError::DegenerateSpectrum { .. })));
        assert!(f_eval(&[1.0], 3, &tol).is_err());
        assert_eq!(f_eval(&[7.0], 0, &tol).unwrap(), 1.0);
    }

    #[test]
    fn profile_examples() {
        let tol = Tolerance::default();
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let p = entry_product_profile(&a, 0, 1, &tol).unwrap();
        assert_eq!(p.common_value, Some(1.0));
        for c in &p.values {
            assert!((c - 1.0).abs() < 1e-15);
        }

        let p = entry_product_profile(&path3(), 0, 2, &tol).unwrap();
        assert!(p.is_constant_nonzero());
        for c in &p.values {
            assert!((c - 1.0).abs() < 1e-12);
        }

        let p = entry_product_profile(&path3(), 0, 1, &tol).unwrap();
        let r2 = 2f64.sqrt();
        assert!(!p.is_constant);
        for (c, want) in p.values.iter().zip([r2, 0.0, -r2]) {
            assert!((c - want).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_zero_and_errors() {
        let tol = Tolerance::default();
        let p = entry_product_profile(&Matrix::diagonal(&[1.0, 2.0]), 0, 1, &tol).unwrap();
        assert!(p.is_constant && p.constant_zero && p.common_value.is_none());
        let p = entry_product_profile(&m(&[&[5.0]]), 0, 0, &tol).unwrap();
        assert_eq!(p.common_value, Some(1.0));
        assert!(matches!(
            entry_product_profile(&Matrix::identity(2), 0, 1, &tol),
            Err(SpectraError::NotMultiplicityFree("DiagonalizableNotMF"))
        ));
        assert!(entry_product_profile(&Matrix::identity(2), 0, 2, &tol).is_err());
    }

    #[test]
    fn strong_components_split_triangular_pattern() {
        let a = m(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 0.0, 3.0]]);
        let mut comps = strong_components(&a, &Tolerance::default());
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2]]);
    }
}
