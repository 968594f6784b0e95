//! Symmetric association schemes.
//!
//! A scheme arrives either as its relations (0/1 matrices over `X × X`) or as
//! its intersection numbers `p^h_{ij}` with valencies `k_i`. Validation checks
//! the axioms in exact integer arithmetic and always produces the integer
//! tensor; the floating-point eigendata lives in [`eigen`].

pub mod eigen;
pub mod format;
pub mod poly;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;

pub use eigen::{eigendata, krein_matrix, krein_parameters, rho_dual_idempotent, rho_idempotent, SchemeEigendata};
pub use poly::{detect_p_polynomial, detect_q_polynomial, kn_p_check, kn_q_check, KnReport, PolyStructure};

/// Builtin schemes are capped at this many points.
pub const MAX_POINTS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("axiom ({axiom}) violated: {detail}")]
    Axiom { axiom: &'static str, detail: String },
    #[error("intersection numbers inconsistent: {detail}")]
    Tensor { detail: String },
    #[error("index {index} out of range 0..={d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("index must be nontrivial (1..={d}), got {index}")]
    TrivialIndex { index: usize, d: usize },
    #[error("scheme would have {points} points, above the cap of {MAX_POINTS}")]
    TooLarge { points: usize },
    #[error("invalid builtin parameter: {0}")]
    InvalidBuiltin(String),
    #[error("random combination failed to separate eigenspaces after {attempts} attempts (last gap {gap:e})")]
    EigenvalueCollision { attempts: usize, gap: f64 },
    #[error("{invariant} violated: residual {residual:e} exceeds {tolerance:e}")]
    Invariant { invariant: &'static str, residual: f64, tolerance: f64 },
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    Theorem(#[from] crate::theorems::TheoremError),
}

/// Square 0/1 matrix packed into 64-bit words, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        Self { n, words_per_row, words: vec![0; n * words_per_row] }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        (self.words[x * self.words_per_row + y / 64] >> (y % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        let w = &mut self.words[x * self.words_per_row + y / 64];
        if v {
            *w |= 1 << (y % 64);
        } else {
            *w &= !(1 << (y % 64));
        }
    }
}

/// Unvalidated scheme data.
#[derive(Debug, Clone, PartialEq)]
pub enum AssociationScheme {
    /// One 0/1 matrix per relation `R_0, ..., R_d`.
    Relations { x_size: usize, relations: Vec<BitMatrix> },
    /// Valencies and `p[h][i][j] = p^h_{ij}`.
    PTensor { x_size: usize, k: Vec<u64>, p: Vec<Vec<Vec<u64>>> },
}

impl AssociationScheme {
    pub fn x_size(&self) -> usize {
        match self {
            AssociationScheme::Relations { x_size, .. } | AssociationScheme::PTensor { x_size, .. } => *x_size,
        }
    }

    /// Class count `d`.
    pub fn d(&self) -> usize {
        match self {
            AssociationScheme::Relations { relations, .. } => relations.len().saturating_sub(1),
            AssociationScheme::PTensor { k, .. } => k.len().saturating_sub(1),
        }
    }

    /// Scheme whose relations are given by a label function `label(x, y) ∈ 0..=d`.
    pub fn from_labels(x_size: usize, d: usize, label: impl Fn(usize, usize) -> usize) -> Self {
        let mut relations = vec![BitMatrix::new(x_size); d + 1];
        for x in 0..x_size {
            for y in 0..x_size {
                relations[label(x, y)].set(x, y, true);
            }
        }
        AssociationScheme::Relations { x_size, relations }
    }
}

/// Intersection tensor `p^h_{ij}` flattened as `[h][i][j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionNumbers {
    d: usize,
    data: Vec<u64>,
}

impl IntersectionNumbers {
    fn zeros(d: usize) -> Self {
        Self { d, data: vec![0; (d + 1).pow(3)] }
    }

    #[inline]
    fn idx(&self, h: usize, i: usize, j: usize) -> usize {
        let n = self.d + 1;
        (h * n + i) * n + j
    }

    /// `p^h_{ij}`.
    #[inline]
    pub fn get(&self, h: usize, i: usize, j: usize) -> u64 {
        self.data[self.idx(h, i, j)]
    }

    fn set(&mut self, h: usize, i: usize, j: usize, v: u64) {
        let k = self.idx(h, i, j);
        self.data[k] = v;
    }
}

/// A scheme whose axioms have been checked.
#[derive(Debug, Clone)]
pub struct ValidatedScheme {
    x_size: usize,
    d: usize,
    k: Vec<u64>,
    p: IntersectionNumbers,
    /// Relation index of each pair `(x, y)`, row-major; only for relations input.
    labels: Option<Vec<u16>>,
}

impl ValidatedScheme {
    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn valencies(&self) -> &[u64] {
        &self.k
    }

    /// `p^h_{ij}`.
    pub fn p(&self, h: usize, i: usize, j: usize) -> u64 {
        self.p.get(h, i, j)
    }

    pub fn intersection_numbers(&self) -> &IntersectionNumbers {
        &self.p
    }

    pub fn has_relations(&self) -> bool {
        self.labels.is_some()
    }

    /// Relation containing `(x, y)`, for relations input.
    pub fn relation_of(&self, x: usize, y: usize) -> Option<usize> {
        self.labels.as_ref().map(|l| l[x * self.x_size + y] as usize)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<(), SchemeError> {
        if i > self.d {
            Err(SchemeError::IndexOutOfRange { index: i, d: self.d })
        } else {
            Ok(())
        }
    }

    /// `B_i`, the `(d+1)×(d+1)` matrix with `(h, j)` entry `p^h_{ij}`.
    pub fn intersection_matrix(&self, i: usize) -> Result<Matrix, SchemeError> {
        self.check_index(i)?;
        Ok(Matrix::from_fn(self.d + 1, |h, j| self.p(h, i, j) as f64))
    }

    /// The `|X|×|X|` adjacency matrix `A_i`, for relations input.
    pub fn adjacency_matrix(&self, i: usize) -> Result<Option<Matrix>, SchemeError> {
        self.check_index(i)?;
        Ok(self.labels.as_ref().map(|labels| {
            Matrix::from_fn(self.x_size, |x, y| if labels[x * self.x_size + y] as usize == i { 1.0 } else { 0.0 })
        }))
    }
}

fn axiom(axiom: &'static str, detail: String) -> SchemeError {
    SchemeError::Axiom { axiom, detail }
}

/// Checks the scheme axioms and derives the intersection numbers.
///
/// Relations input: `R_0` is the diagonal, the relations partition `X × X`,
/// each is symmetric and nonempty, and the count
/// `|{z : (x,z) ∈ R_i, (z,y) ∈ R_j}|` depends only on the relation of `(x, y)`.
/// Tensor input: the standard identities among `p^h_{ij}` and `k_i`.
pub fn validate_scheme(raw: &AssociationScheme) -> Result<ValidatedScheme, SchemeError> {
    match raw {
        AssociationScheme::Relations { x_size, relations } => validate_relations(*x_size, relations),
        AssociationScheme::PTensor { x_size, k, p } => validate_tensor(*x_size, k, p),
    }
}

fn validate_relations(x_size: usize, relations: &[BitMatrix]) -> Result<ValidatedScheme, SchemeError> {
    if relations.is_empty() {
        return Err(axiom("i", "no relations given".into()));
    }
    if x_size == 0 {
        return Err(axiom("i", "point set is empty".into()));
    }
    let d = relations.len() - 1;
    if d > u16::MAX as usize {
        return Err(axiom("ii", format!("{} relations exceed the supported count", d + 1)));
    }
    for (i, r) in relations.iter().enumerate() {
        if r.order() != x_size {
            return Err(axiom("ii", format!("relation {i} has order {}, expected {x_size}", r.order())));
        }
    }
    for x in 0..x_size {
        for y in 0..x_size {
            if relations[0].get(x, y) != (x == y) {
                return Err(axiom("i", format!("R_0 differs from the diagonal at ({x},{y})")));
            }
        }
    }
    let mut labels = vec![0u16; x_size * x_size];
    for x in 0..x_size {
        for y in 0..x_size {
            let hits: Vec<usize> = (0..=d).filter(|&i| relations[i].get(x, y)).collect();
            if hits.len() != 1 {
                return Err(axiom("ii", format!("pair ({x},{y}) lies in relations {hits:?}")));
            }
            labels[x * x_size + y] = hits[0] as u16;
        }
    }
    for x in 0..x_size {
        for y in (x + 1)..x_size {
            let (a, b) = (labels[x * x_size + y], labels[y * x_size + x]);
            if a != b {
                return Err(axiom("iii", format!("R_{a} contains ({x},{y}) but not ({y},{x})")));
            }
        }
    }
    let mut witness: Vec<Option<(usize, usize)>> = vec![None; d + 1];
    for x in 0..x_size {
        for y in 0..x_size {
            let h = labels[x * x_size + y] as usize;
            witness[h].get_or_insert((x, y));
        }
    }
    if let Some(i) = witness.iter().position(Option::is_none) {
        return Err(axiom("ii", format!("relation R_{i} is empty")));
    }

    // The count matrix at (y, x) is the transpose of the one at (x, y), so
    // pairs with x <= y plus symmetry of each p^h cover every pair. The
    // row-major first witness of each relation already has x <= y.
    let n = d + 1;
    let mut p = IntersectionNumbers::zeros(d);
    let mut counts = vec![0u64; n * n];
    for x in 0..x_size {
        let row_x = &labels[x * x_size..(x + 1) * x_size];
        for y in x..x_size {
            counts.iter_mut().for_each(|c| *c = 0);
            // labels are symmetric by now, so column y is row y
            let row_y = &labels[y * x_size..(y + 1) * x_size];
            for (&i, &j) in row_x.iter().zip(row_y) {
                counts[i as usize * n + j as usize] += 1;
            }
            let h = row_x[y] as usize;
            let first = witness[h] == Some((x, y));
            for i in 0..n {
                for j in 0..n {
                    let c = counts[i * n + j];
                    if first {
                        p.set(h, i, j, c);
                    } else if p.get(h, i, j) != c {
                        let (x0, y0) = witness[h].unwrap();
                        return Err(axiom(
                            "iv",
                            format!("p^{h}_{{{i}{j}}} is {} at ({x0},{y0}) but {c} at ({x},{y})", p.get(h, i, j)),
                        ));
                    }
                }
            }
        }
    }
    for (h, w) in witness.iter().enumerate() {
        let (x0, y0) = w.unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (p.get(h, i, j), p.get(h, j, i));
                if a != b {
                    return Err(axiom("iv", format!("p^{h}_{{{i}{j}}} is {a} at ({x0},{y0}) but {b} at ({y0},{x0})")));
                }
            }
        }
    }
    let k = (0..n).map(|i| p.get(0, i, i)).collect();
    Ok(ValidatedScheme { x_size, d, k, p, labels: Some(labels) })
}

fn tensor_err(detail: String) -> SchemeError {
    SchemeError::Tensor { detail }
}

fn validate_tensor(x_size: usize, k: &[u64], raw: &[Vec<Vec<u64>>]) -> Result<ValidatedScheme, SchemeError> {
    if k.is_empty() {
        return Err(tensor_err("no valencies given".into()));
    }
    let d = k.len() - 1;
    let n = d + 1;
    if raw.len() != n || raw.iter().any(|b| b.len() != n || b.iter().any(|r| r.len() != n)) {
        return Err(tensor_err(format!("expected {n} blocks of {n}x{n} intersection numbers")));
    }
    if k[0] != 1 {
        return Err(tensor_err(format!("k_0 must be 1, found {}", k[0])));
    }
    if let Some(i) = k.iter().position(|&v| v == 0) {
        return Err(tensor_err(format!("k_{i} must be positive")));
    }
    let total: u64 = k.iter().sum();
    if total != x_size as u64 {
        return Err(tensor_err(format!("valencies sum to {total}, but |X| = {x_size}")));
    }
    let mut p = IntersectionNumbers::zeros(d);
    for (h, block) in raw.iter().enumerate() {
        for (i, row) in block.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                p.set(h, i, j, v);
            }
        }
    }
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = p.get(h, i, j);
                if v != p.get(h, j, i) {
                    return Err(tensor_err(format!(
                        "p^{h}_{{{i}{j}}} = {v} but p^{h}_{{{j}{i}}} = {}",
                        p.get(h, j, i)
                    )));
                }
                if h == 0 && v != if i == j { k[i] } else { 0 } {
                    return Err(tensor_err(format!("p^0_{{{i}{j}}} = {v} must equal δ_{{{i}{j}}} k_{i}")));
                }
                if i == 0 && v != u64::from(h == j) {
                    return Err(tensor_err(format!("p^{h}_{{0{j}}} = {v} must equal δ_{{{h}{j}}}")));
                }
                if k[h] * v != k[j] * p.get(j, i, h) {
                    return Err(tensor_err(format!(
                        "k_{h} p^{h}_{{{i}{j}}} = {} differs from k_{j} p^{j}_{{{i}{h}}} = {}",
                        k[h] * v,
                        k[j] * p.get(j, i, h)
                    )));
                }
            }
            let row_sum: u64 = (0..n).map(|j| p.get(h, i, j)).sum();
            if row_sum != k[i] {
                return Err(tensor_err(format!("Σ_j p^{h}_{{{i}j}} = {row_sum}, expected k_{i} = {}", k[i])));
            }
        }
    }
    Ok(ValidatedScheme { x_size, d, k: k.to_vec(), p, labels: None })
}

/// Schemes available without an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinScheme {
    /// Hamming distances on `{0,1}^n`.
    Hypercube(usize),
    /// `n` points, one nontrivial relation.
    Complete(usize),
}

impl fmt::Display for BuiltinScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinScheme::Hypercube(n) => write!(f, "hypercube({n})"),
            BuiltinScheme::Complete(n) => write!(f, "complete({n})"),
        }
    }
}

impl FromStr for BuiltinScheme {
    type Err = SchemeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || SchemeError::InvalidBuiltin(format!("{s:?} (expected hypercube(n) or complete(n))"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let arg = rest.strip_suffix(')').ok_or_else(bad)?;
        let n: usize = arg.trim().parse().map_err(|_| bad())?;
        match name.trim() {
            "hypercube" => Ok(BuiltinScheme::Hypercube(n)),
            "complete" => Ok(BuiltinScheme::Complete(n)),
            _ => Err(bad()),
        }
    }
}

pub fn builtin_scheme(which: BuiltinScheme) -> Result<AssociationScheme, SchemeError> {
    match which {
        BuiltinScheme::Hypercube(n) => {
            if n == 0 {
                return Err(SchemeError::InvalidBuiltin("hypercube needs n >= 1".into()));
            }
            if n >= usize::BITS as usize || (1usize << n) > MAX_POINTS {
                return Err(SchemeError::TooLarge { points: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX) });
            }
            let points = 1usize << n;
            Ok(AssociationScheme::from_labels(points, n, |x, y| (x ^ y).count_ones() as usize))
        }
        BuiltinScheme::Complete(n) => {
            if n < 2 {
                return Err(SchemeError::InvalidBuiltin("complete needs n >= 2".into()));
            }
            if n > MAX_POINTS {
                return Err(SchemeError::TooLarge { points: n });
            }
            Ok(AssociationScheme::from_labels(n, 1, |x, y| usize::from(x != y)))
        }
    }
}
