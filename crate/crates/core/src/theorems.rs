//! Executable checks of the two characterizations for nonnegative matrices:
//!
//! * path form: `Γ(A)` is a bidirected path with endpoints `s, t` iff `A` is
//!   symmetrizable, multiplicity-free, and the profile at `(s, t)` is a
//!   nonzero constant;
//! * Hessenberg form: `A` is diagonalizable with `∂(s, t) = d` iff `A` is
//!   multiplicity-free and the profile at `(s, t)` is a nonzero constant.
//!
//! Both sides are evaluated independently; a disagreement can only be
//! numerical and is reported with the data needed to diagnose it.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::digraph::{bidirected_path_endpoints, directed_distance, gamma, hessenberg_ordering, Digraph, DigraphError};
use crate::linalg::{Matrix, Tolerance};
use crate::spectra::{classify, Profile, ScaledIdempotents, SpectraError, SpectralClass};
use crate::symmetrize::NotSymmetrizable;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoremError {
    #[error("entry ({row},{col}) = {value:e} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("index {index} out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Bidirected path characterization.
    MainSym,
    /// Directed distance (Hessenberg) characterization.
    Main,
}

impl FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mainsym" => Ok(Theorem::MainSym),
            "main" => Ok(Theorem::Main),
            other => Err(format!("unknown theorem {other:?} (expected main or mainsym)")),
        }
    }
}

/// Evidence for the combinatorial side.
#[derive(Debug, Clone, Serialize)]
pub struct PatternSide {
    pub holds: bool,
    /// Vertex sequence of `Γ(A)` when it is a bidirected path.
    pub path: Option<Vec<usize>>,
    /// `∂(s, t)` in `Γ(A)`.
    pub distance: Option<usize>,
    /// Present for the distance form: whether `A` classified as diagonalizable.
    pub diagonalizable: Option<bool>,
    /// Hessenberg ordering `x_0 = t, ..., x_d = s` when `∂(s, t) = d`.
    pub hessenberg_ordering: Option<Vec<usize>>,
}

/// Evidence for the spectral side.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSide {
    pub holds: bool,
    pub class: &'static str,
    pub symmetrizer: Result<Vec<f64>, NotSymmetrizable>,
    pub theta: Option<Vec<f64>>,
    pub min_gap: Option<f64>,
    pub profile: Option<Profile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub which: Theorem,
    pub s: usize,
    pub t: usize,
    pub condition_i: PatternSide,
    pub condition_ii: SpectralSide,
}

impl TheoremReport {
    pub fn equivalent(&self) -> bool {
        self.condition_i.holds == self.condition_ii.holds
    }

    /// Human-readable explanation of a disagreement, if any.
    pub fn disagreement(&self) -> Option<String> {
        if self.equivalent() {
            return None;
        }
        let ii = &self.condition_ii;
        let profile = ii.profile.as_ref().map_or_else(
            || "none".to_string(),
            |p| format!("{:?} (deviation {:e}, threshold {:e})", p.values, p.deviation, p.threshold),
        );
        Some(format!(
            "numerical disagreement: condition (i) = {}, condition (ii) = {}; class {}, min eigenvalue gap {:?}, profile {}",
            self.condition_i.holds, ii.holds, ii.class, ii.min_gap, profile
        ))
    }
}

/// Everything about `A` that does not depend on `(s, t)`, computed once so
/// that all vertex pairs can be checked cheaply.
#[derive(Debug, Clone)]
pub struct MatrixAnalysis {
    matrix: Matrix,
    graph: Digraph,
    path: Option<Vec<usize>>,
    class: SpectralClass,
    scaled: Option<ScaledIdempotents>,
}

/// Replaces entries in `[-zero_tol, 0)` by zero and rejects anything more negative.
pub fn clamp_nonnegative(a: &Matrix, tol: &Tolerance) -> Result<Matrix, TheoremError> {
    if let Some((row, col, value)) = a.has_negative_entry(-tol.zero_tol) {
        return Err(TheoremError::NegativeEntry { row, col, value });
    }
    Ok(Matrix::from_fn(a.order(), |i, j| a[(i, j)].max(0.0)))
}

impl MatrixAnalysis {
    pub fn new(a: &Matrix, tol: &Tolerance) -> Result<Self, TheoremError> {
        let matrix = clamp_nonnegative(a, tol)?;
        let graph = gamma(&matrix, tol, false);
        let path = bidirected_path_endpoints(&graph);
        let class = classify(&matrix, tol)?;
        let scaled = class.spectrum().map(|sp| ScaledIdempotents::new(&matrix, sp, tol));
        Ok(Self { matrix, graph, path, class, scaled })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn class(&self) -> &SpectralClass {
        &self.class
    }

    /// Path through `Γ(A)`, lower-numbered endpoint first.
    pub fn path(&self) -> Option<&[usize]> {
        self.path.as_deref()
    }

    pub fn profile(&self, s: usize, t: usize) -> Option<Profile> {
        self.scaled.as_ref().map(|sc| sc.profile(s, t))
    }

    fn check_indices(&self, s: usize, t: usize) -> Result<(), TheoremError> {
        let n = self.matrix.order();
        for index in [s, t] {
            if index >= n {
                return Err(TheoremError::IndexOutOfRange { index, n });
            }
        }
        Ok(())
    }

    fn spectral_side(&self, s: usize, t: usize, need_symmetrizer: bool) -> SpectralSide {
        let profile = self.profile(s, t);
        let symmetrizable = self.class.symmetrizer.is_ok();
        let holds = (!need_symmetrizer || symmetrizable) && profile.as_ref().is_some_and(Profile::is_constant_nonzero);
        SpectralSide {
            holds,
            class: self.class.name(),
            symmetrizer: self.class.symmetrizer.clone().map(|s| s.kappa),
            theta: self.class.spectrum().map(|sp| sp.theta().to_vec()),
            min_gap: self.class.diagnostics.min_gap,
            profile,
        }
    }

    fn distance(&self, s: usize, t: usize) -> Result<(Option<usize>, Option<Vec<usize>>), TheoremError> {
        let distance = directed_distance(&self.graph, s, t)?;
        let ordering = hessenberg_ordering(&self.graph, s, t)?;
        Ok((distance, ordering))
    }

    /// Path characterization at `(s, t)`; endpoint order does not matter.
    pub fn check_main_sym(&self, s: usize, t: usize) -> Result<TheoremReport, TheoremError> {
        self.check_indices(s, t)?;
        let n = self.matrix.order();
        let endpoints_match = self.path.as_ref().is_some_and(|p| {
            let (first, last) = (p[0], p[n - 1]);
            if n == 1 {
                s == t
            } else {
                (first, last) == (s, t) || (first, last) == (t, s)
            }
        });
        let (distance, ordering) = self.distance(s, t)?;
        Ok(TheoremReport {
            which: Theorem::MainSym,
            s,
            t,
            condition_i: PatternSide {
                holds: endpoints_match,
                path: self.path.clone(),
                distance,
                diagonalizable: None,
                hessenberg_ordering: ordering,
            },
            condition_ii: self.spectral_side(s, t, true),
        })
    }

    /// Distance characterization at `(s, t)`.
    pub fn check_main(&self, s: usize, t: usize) -> Result<TheoremReport, TheoremError> {
        self.check_indices(s, t)?;
        let d = self.matrix.order() - 1;
        let (distance, ordering) = self.distance(s, t)?;
        let diagonalizable = self.class.is_diagonalizable();
        Ok(TheoremReport {
            which: Theorem::Main,
            s,
            t,
            condition_i: PatternSide {
                holds: diagonalizable && distance == Some(d),
                path: self.path.clone(),
                distance,
                diagonalizable: Some(diagonalizable),
                hessenberg_ordering: ordering,
            },
            condition_ii: self.spectral_side(s, t, false),
        })
    }

    pub fn check(&self, which: Theorem, s: usize, t: usize) -> Result<TheoremReport, TheoremError> {
        match which {
            Theorem::MainSym => self.check_main_sym(s, t),
            Theorem::Main => self.check_main(s, t),
        }
    }
}

pub fn check_main_sym(a: &Matrix, s: usize, t: usize, tol: &Tolerance) -> Result<TheoremReport, TheoremError> {
    MatrixAnalysis::new(a, tol)?.check_main_sym(s, t)
}

pub fn check_main(a: &Matrix, s: usize, t: usize, tol: &Tolerance) -> Result<TheoremReport, TheoremError> {
    MatrixAnalysis::new(a, tol)?.check_main(s, t)
}

/// Families of random test matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InstanceKind {
    Tridiagonal,
    PermutedPath,
    Hessenberg,
    GeneralNonneg,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::Tridiagonal => "tridiagonal",
            InstanceKind::PermutedPath => "permuted_path",
            InstanceKind::Hessenberg => "hessenberg",
            InstanceKind::GeneralNonneg => "general_nonneg",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown instance kind {0:?}")]
pub struct InvalidKind(pub String);

impl FromStr for InstanceKind {
    type Err = InvalidKind;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tridiagonal" => Ok(InstanceKind::Tridiagonal),
            "permuted_path" => Ok(InstanceKind::PermutedPath),
            "hessenberg" => Ok(InstanceKind::Hessenberg),
            "general_nonneg" => Ok(InstanceKind::GeneralNonneg),
            other => Err(InvalidKind(other.to_string())),
        }
    }
}

/// Nonzero generated entries are drawn from this range.
pub const ENTRY_RANGE: std::ops::Range<f64> = 0.1..2.0;
pub const DEFAULT_DENSITY: f64 = 0.5;

/// Deterministic random nonnegative matrix of order `d + 1`.
///
/// Sub- and superdiagonals of the tridiagonal families, and the subdiagonal
/// of the Hessenberg family, are drawn from [`ENTRY_RANGE`]; tridiagonal
/// diagonals are uniform on `[0, 2)`. Sparse entries are nonzero with
/// probability `density` (default [`DEFAULT_DENSITY`]).
pub fn gen_instance(kind: InstanceKind, d: usize, seed: u64, density: Option<f64>) -> Matrix {
    let n = d + 1;
    let density = density.unwrap_or(DEFAULT_DENSITY).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sparse = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(density) {
            rng.gen_range(ENTRY_RANGE)
        } else {
            0.0
        }
    };
    match kind {
        InstanceKind::Tridiagonal | InstanceKind::PermutedPath => {
            let mut a = Matrix::zeros(n);
            for i in 0..n {
                a[(i, i)] = rng.gen_range(0.0..2.0);
                if i + 1 < n {
                    a[(i, i + 1)] = rng.gen_range(ENTRY_RANGE);
                    a[(i + 1, i)] = rng.gen_range(ENTRY_RANGE);
                }
            }
            if kind == InstanceKind::PermutedPath {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                a = a.permuted(&perm);
            }
            a
        }
        InstanceKind::Hessenberg => {
            let mut a = Matrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    a[(i, j)] = sparse(&mut rng);
                }
                if i > 0 {
                    a[(i, i - 1)] = rng.gen_range(ENTRY_RANGE);
                }
            }
            a
        }
        InstanceKind::GeneralNonneg => Matrix::from_fn(n, |_, _| sparse(&mut rng)),
    }
}

/// Random permutation of `0..n`, deterministic per seed.
pub fn gen_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}
