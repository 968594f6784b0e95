//! Characteristic polynomials and their real roots.
//!
//! Coefficients come from the Faddeev-LeVerrier recurrence. Real roots are
//! isolated recursively: the critical points of `p` (real roots of `p'`)
//! split the line into intervals on which `p` is monotone, and each sign
//! change is refined by bisection. A critical point where `p` vanishes is a
//! repeated root whose multiplicity is one more than its multiplicity in `p'`.

use crate::linalg::Matrix;

/// Relative size of `|p(c)|` (against the evaluation's own magnitude) below
/// which a critical point counts as a root.
const TANGENT_REL_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

/// Coefficients of `det(λI − A)`, lowest degree first; the last entry is 1.
pub fn characteristic_polynomial(a: &Matrix) -> Vec<f64> {
    let n = a.order();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = Matrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        m = a.matmul(&m).shifted(-coeffs[n - k + 1]);
        let am = a.matmul(&m);
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

/// Horner evaluation, returning the value and a magnitude bound
/// `Σ |c_i| |x|^i` for judging how close to zero the value is.
pub fn evaluate(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut magnitude = 0.0;
    for &c in coeffs.iter().rev() {
        value = value * x + c;
        magnitude = magnitude * x.abs() + c.abs();
    }
    (value, magnitude)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()
}

fn degree(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0.0)
}

/// Real roots with multiplicities, ascending.
pub fn real_roots(coeffs: &[f64]) -> Vec<(f64, usize)> {
    let Some(deg) = degree(coeffs) else {
        return Vec::new();
    };
    let coeffs = &coeffs[..=deg];
    match deg {
        0 => return Vec::new(),
        1 => return vec![(-coeffs[0] / coeffs[1], 1)],
        _ => {}
    }
    let lead = coeffs[deg];
    let bound = 1.0 + coeffs[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let critical = real_roots(&derivative(coeffs));

    let is_root_at = |x: f64| {
        let (v, mag) = evaluate(coeffs, x);
        v == 0.0 || v.abs() <= TANGENT_REL_TOL * mag
    };

    let mut roots = Vec::new();
    let mut points: Vec<(f64, Option<usize>)> = vec![(-bound, None)];
    points.extend(critical.iter().map(|&(c, m)| (c, Some(m))));
    points.push((bound, None));

    let flagged: Vec<bool> = points.iter().map(|&(x, crit)| crit.is_some() && is_root_at(x)).collect();

    for (idx, window) in points.windows(2).enumerate() {
        let (lo, hi) = (window[0].0, window[1].0);
        if flagged[idx] {
            roots.push((lo, window[0].1.unwrap() + 1));
        }
        if flagged[idx] || flagged[idx + 1] {
            continue;
        }
        let plo = evaluate(coeffs, lo).0;
        let phi = evaluate(coeffs, hi).0;
        if plo == 0.0 {
            continue;
        }
        if phi == 0.0 {
            // only the outer bound can land here; interior points are flagged
            if window[1].1.is_none() {
                roots.push((hi, 1));
            }
            continue;
        }
        if plo.signum() != phi.signum() {
            roots.push((bisect(coeffs, lo, hi, plo), 1));
        }
    }
    roots
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64, plo: f64) -> f64 {
    let sign_lo = plo.signum();
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = evaluate(coeffs, mid).0;
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faddeev_leverrier_small_cases() {
        let a = Matrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(characteristic_polynomial(&a), vec![0.0, -2.0, 0.0, 1.0]);
        let cyc = Matrix::from_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(characteristic_polynomial(&cyc), vec![-1.0, 0.0, 0.0, 1.0]);
        let d = Matrix::diagonal(&[2.0, 3.0]);
        assert_eq!(characteristic_polynomial(&d), vec![6.0, -5.0, 1.0]);
    }

    #[test]
    fn roots_of_known_polynomials() {
        let r = real_roots(&[0.0, -2.0, 0.0, 1.0]);
        assert_eq!(r.len(), 3);
        let r2 = 2f64.sqrt();
        for ((x, m), want) in r.iter().zip([-r2, 0.0, r2]) {
            assert_eq!(*m, 1);
            assert!((x - want).abs() < 1e-14);
        }
        // λ³ − 1: one real root
        let r = real_roots(&[-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(r.len(), 1);
        assert!((r[0].0 - 1.0).abs() < 1e-14);
        // (λ − 1)² (λ + 2)
        let r = real_roots(&[2.0, -3.0, 0.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert!((r[0].0 + 2.0).abs() < 1e-12 && r[0].1 == 1);
        assert!((r[1].0 - 1.0).abs() < 1e-9 && r[1].1 == 2);
        // λ⁴
        assert_eq!(real_roots(&[0.0, 0.0, 0.0, 0.0, 1.0]), vec![(0.0, 4)]);
        // λ² + 1
        assert!(real_roots(&[1.0, 0.0, 1.0]).is_empty());
    }

    #[test]
    fn roots_of_wide_polynomial() {
        // (λ−1)(λ−2)...(λ−7)
        let mut coeffs = vec![1.0];
        for r in 1..=7 {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r as f64 * c;
            }
            coeffs = next;
        }
        let roots = real_roots(&coeffs);
        assert_eq!(roots.len(), 7);
        for (k, (x, m)) in roots.iter().enumerate() {
            assert_eq!(*m, 1);
            assert!((x - (k + 1) as f64).abs() < 1e-9, "{x}");
        }
    }
}
