//! P- and Q-polynomial structures.
//!
//! A scheme is P-polynomial relative to `A_b` exactly when `Γ(B_b)` is a
//! bidirected path; that path, read from `0`, orders the relations and ends at
//! the last one. The dual statement uses the Krein matrices `B*_e`. The
//! `kn_*_check` functions compare this against the closed form for the dual
//! eigenvalues (resp. eigenvalues) of the last idempotent (resp. relation).

use serde::Serialize;

use super::eigen::{krein_matrix, rho_dual_idempotent, rho_idempotent, SchemeEigendata};
use super::{SchemeError, ValidatedScheme};
use crate::digraph::{bidirected_path_endpoints, gamma};
use crate::linalg::{Matrix, Tolerance};
use crate::spectra::{check_distinct, f_eval, spectral_scale};
use crate::theorems::{MatrixAnalysis, TheoremReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyStructure {
    pub generator: usize,
    /// Relation (or idempotent) indices `0, generator, ..., last`.
    pub ordering: Vec<usize>,
    pub last: usize,
}

/// Path through `Γ(B)` read from vertex 0, if `Γ(B)` is a bidirected path
/// starting `0, i`.
fn structure_from(b: &Matrix, i: usize, tol: &Tolerance) -> Option<PolyStructure> {
    let path = bidirected_path_endpoints(&gamma(b, tol, false))?;
    (path[0] == 0 && path.get(1) == Some(&i)).then(|| PolyStructure {
        generator: i,
        last: *path.last().unwrap(),
        ordering: path,
    })
}

pub fn detect_p_polynomial(scheme: &ValidatedScheme, tol: &Tolerance) -> Vec<PolyStructure> {
    (1..=scheme.d()).filter_map(|i| structure_from(&scheme.intersection_matrix(i).ok()?, i, tol)).collect()
}

/// Krein parameters are computed, so exact zeros come back as roundoff;
/// zero is judged relative to the largest parameter.
pub(crate) fn krein_tolerance(ed: &SchemeEigendata, tol: &Tolerance) -> Tolerance {
    Tolerance { zero_tol: tol.zero_tol.max(tol.residual_tol * ed.krein_scale()), ..*tol }
}

pub fn detect_q_polynomial(ed: &SchemeEigendata, tol: &Tolerance) -> Result<Vec<PolyStructure>, SchemeError> {
    let ktol = krein_tolerance(ed, tol);
    let mut out = Vec::new();
    for i in 1..=ed.d {
        let b = krein_matrix(ed, i, tol)?;
        out.extend(structure_from(&b, i, &ktol));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Duality {
    /// Relations generated by `A_b`, last relation `A_c`.
    P,
    /// Idempotents generated by `E_e`, last idempotent `E_f`.
    Q,
}

/// Both sides of the polynomial-structure equivalence.
#[derive(Debug, Clone, Serialize)]
pub struct KnReport {
    pub duality: Duality,
    pub generator: usize,
    pub last: usize,
    /// Side (i): detection found this generator with this last index.
    pub side_i: bool,
    pub detected: Vec<PolyStructure>,
    /// `θ_i = P_{ib}` (or `θ*_i = Q_{ie}`).
    pub theta: Vec<f64>,
    pub theta_distinct: bool,
    /// `f_0(θ_0) / f_i(θ_i)` when the θ are distinct.
    pub expected: Option<Vec<f64>>,
    /// `Q_{ci}` (or `P_{fi}`), read as `|X|` times the `(c, 0)` entry of `ρ(E_i)`.
    pub observed: Vec<f64>,
    pub max_deviation: Option<f64>,
    /// Bound for `|observed_i − expected_i|`, relative to `max(1, |expected_i|)`.
    pub tolerance: f64,
    /// Side (ii): distinct θ and observed matches expected.
    pub side_ii: bool,
    /// Path characterization of `B_b` (or `B*_e`) at `(last, 0)`.
    pub path_check: TheoremReport,
}

impl KnReport {
    pub fn agree(&self) -> bool {
        self.side_i == self.side_ii
    }

    /// The path characterization gave the same answer on both of its sides
    /// and matched side (i).
    pub fn path_check_consistent(&self) -> bool {
        self.path_check.equivalent() && self.path_check.condition_i.holds == self.side_i
    }
}

fn check_nontrivial(i: usize, d: usize) -> Result<(), SchemeError> {
    if i > d {
        Err(SchemeError::IndexOutOfRange { index: i, d })
    } else if i == 0 {
        Err(SchemeError::TrivialIndex { index: i, d })
    } else {
        Ok(())
    }
}

struct Sides {
    theta: Vec<f64>,
    theta_distinct: bool,
    expected: Option<Vec<f64>>,
    max_deviation: Option<f64>,
    side_ii: bool,
}

fn closed_form(theta: Vec<f64>, observed: &[f64], tol: &Tolerance) -> Sides {
    let n = theta.len();
    let distinct = check_distinct(&theta, tol, spectral_scale(&theta)).is_ok();
    let values: Option<Vec<f64>> = if distinct { (0..n).map(|i| f_eval(&theta, i, tol).ok()).collect() } else { None };
    let expected = values.map(|f| f.iter().map(|fi| f[0] / fi).collect::<Vec<f64>>());
    let mut max_deviation = None;
    let mut side_ii = false;
    if let Some(exp) = &expected {
        let rel = exp.iter().zip(observed).map(|(e, o)| (e - o).abs() / e.abs().max(1.0)).fold(0.0, f64::max);
        max_deviation = Some(exp.iter().zip(observed).map(|(e, o)| (e - o).abs()).fold(0.0, f64::max));
        side_ii = rel <= tol.residual_tol;
    }
    Sides { theta_distinct: expected.is_some(), theta, expected, max_deviation, side_ii }
}

/// P-polynomial relative to `A_b` with last relation `A_c`, checked both by
/// pattern and by the closed form `Q_{ci} = f_0(θ_0) / f_i(θ_i)`.
pub fn kn_p_check(
    scheme: &ValidatedScheme,
    ed: &SchemeEigendata,
    b: usize,
    c: usize,
    tol: &Tolerance,
) -> Result<KnReport, SchemeError> {
    let d = scheme.d();
    check_nontrivial(b, d)?;
    check_nontrivial(c, d)?;
    let detected = detect_p_polynomial(scheme, tol);
    let side_i = detected.iter().any(|s| s.generator == b && s.last == c);
    let x = ed.x_size as f64;
    let observed: Vec<f64> = (0..=d).map(|i| rho_idempotent(ed, i).map(|r| x * r[(c, 0)])).collect::<Result<_, _>>()?;
    let theta: Vec<f64> = (0..=d).map(|i| ed.p[(i, b)]).collect();
    let sides = closed_form(theta, &observed, tol);
    let bb = scheme.intersection_matrix(b)?;
    let path_check = MatrixAnalysis::new(&bb, tol).and_then(|a| a.check_main_sym(c, 0))?;
    Ok(KnReport {
        duality: Duality::P,
        generator: b,
        last: c,
        side_i,
        detected,
        theta: sides.theta,
        theta_distinct: sides.theta_distinct,
        expected: sides.expected,
        observed,
        max_deviation: sides.max_deviation,
        tolerance: tol.residual_tol,
        side_ii: sides.side_ii,
        path_check,
    })
}

/// Q-polynomial relative to `E_e` with last idempotent `E_f`, checked both by
/// pattern and by the closed form `P_{fi} = f*_0(θ*_0) / f*_i(θ*_i)`.
pub fn kn_q_check(ed: &SchemeEigendata, e: usize, f: usize, tol: &Tolerance) -> Result<KnReport, SchemeError> {
    let d = ed.d;
    check_nontrivial(e, d)?;
    check_nontrivial(f, d)?;
    let detected = detect_q_polynomial(ed, tol)?;
    let side_i = detected.iter().any(|s| s.generator == e && s.last == f);
    let x = ed.x_size as f64;
    let observed: Vec<f64> =
        (0..=d).map(|i| rho_dual_idempotent(ed, i).map(|r| x * r[(f, 0)])).collect::<Result<_, _>>()?;
    let theta: Vec<f64> = (0..=d).map(|i| ed.q[(i, e)]).collect();
    let sides = closed_form(theta, &observed, tol);
    let be = krein_matrix(ed, e, tol)?;
    let ktol = krein_tolerance(ed, tol);
    let path_check = MatrixAnalysis::new(&be, &ktol).and_then(|a| a.check_main_sym(f, 0))?;
    Ok(KnReport {
        duality: Duality::Q,
        generator: e,
        last: f,
        side_i,
        detected,
        theta: sides.theta,
        theta_distinct: sides.theta_distinct,
        expected: sides.expected,
        observed,
        max_deviation: sides.max_deviation,
        tolerance: tol.residual_tol,
        side_ii: sides.side_ii,
        path_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{builtin_scheme, eigendata, validate_scheme, BuiltinScheme};

    fn setup(b: BuiltinScheme) -> (ValidatedScheme, SchemeEigendata) {
        let s = validate_scheme(&builtin_scheme(b).unwrap()).unwrap();
        let ed = eigendata(&s, &Tolerance::default(), 3).unwrap();
        (s, ed)
    }

    #[test]
    fn cube_structures() {
        let tol = Tolerance::default();
        let (s, ed) = setup(BuiltinScheme::Hypercube(3));
        let want = vec![PolyStructure { generator: 1, ordering: vec![0, 1, 2, 3], last: 3 }];
        assert_eq!(detect_p_polynomial(&s, &tol), want);
        assert_eq!(detect_q_polynomial(&ed, &tol).unwrap(), want);
        let (s, ed) = setup(BuiltinScheme::Hypercube(4));
        // the distance-3 graph of the 4-cube is again a 4-cube
        let want = vec![
            PolyStructure { generator: 1, ordering: vec![0, 1, 2, 3, 4], last: 4 },
            PolyStructure { generator: 3, ordering: vec![0, 3, 2, 1, 4], last: 4 },
        ];
        assert_eq!(detect_p_polynomial(&s, &tol), want);
        assert_eq!(detect_q_polynomial(&ed, &tol).unwrap(), want);
        let (s, ed) = setup(BuiltinScheme::Complete(5));
        let want = vec![PolyStructure { generator: 1, ordering: vec![0, 1], last: 1 }];
        assert_eq!(detect_p_polynomial(&s, &tol), want);
        assert_eq!(detect_q_polynomial(&ed, &tol).unwrap(), want);
    }

    #[test]
    fn cube_kn_checks() {
        let tol = Tolerance::default();
        let (s, ed) = setup(BuiltinScheme::Hypercube(3));
        let values = [1.0, -3.0, 3.0, -1.0];
        for r in [kn_p_check(&s, &ed, 1, 3, &tol).unwrap(), kn_q_check(&ed, 1, 3, &tol).unwrap()] {
            assert!(r.side_i && r.side_ii && r.agree() && r.path_check_consistent());
            for (o, v) in r.observed.iter().zip(values) {
                assert!((o - v).abs() < 1e-9);
            }
            let exp = r.expected.unwrap();
            for (e, v) in exp.iter().zip(values) {
                assert!((e - v).abs() < 1e-9);
            }
        }
        for r in [kn_p_check(&s, &ed, 1, 2, &tol).unwrap(), kn_q_check(&ed, 1, 2, &tol).unwrap()] {
            assert!(!r.side_i && !r.side_ii && r.agree() && r.path_check_consistent());
        }
        // θ_i = P_{i2} = (3, −1, −1, 3) repeats
        let r = kn_p_check(&s, &ed, 2, 3, &tol).unwrap();
        assert!(!r.theta_distinct && !r.side_ii && !r.side_i);
        assert!(matches!(kn_p_check(&s, &ed, 0, 3, &tol), Err(SchemeError::TrivialIndex { .. })));
        assert!(matches!(kn_q_check(&ed, 1, 4, &tol), Err(SchemeError::IndexOutOfRange { .. })));
    }

    #[test]
    fn complete_kn_checks() {
        let tol = Tolerance::default();
        for n in 2..6 {
            let (s, ed) = setup(BuiltinScheme::Complete(n));
            assert!(kn_p_check(&s, &ed, 1, 1, &tol).unwrap().side_ii);
            let q = kn_q_check(&ed, 1, 1, &tol).unwrap();
            assert!(q.side_i && q.side_ii);
        }
    }
}
