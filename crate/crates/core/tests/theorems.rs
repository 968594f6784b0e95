use proptest::prelude::*;
use spectralpath::theorems::{
    check_main, check_main_sym, gen_instance, gen_permutation, InstanceKind, MatrixAnalysis, TheoremError,
};
use spectralpath::{Matrix, Tolerance};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() }
}

/// Shortest walk lengths by repeated boolean products of the off-diagonal pattern.
fn distances(a: &Matrix) -> Vec<Vec<Option<usize>>> {
    let n = a.order();
    let adj = |i: usize, j: usize| i != j && a[(i, j)] != 0.0;
    let mut dist = vec![vec![None; n]; n];
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    for r in 0..n {
        for s in 0..n {
            for t in 0..n {
                if reach[s][t] && dist[s][t].is_none() {
                    dist[s][t] = Some(r);
                }
            }
        }
        reach = (0..n).map(|s| (0..n).map(|t| (0..n).any(|k| reach[s][k] && adj(k, t))).collect()).collect();
    }
    dist
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn path_form_holds_only_at_endpoints(d in 0..10usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        let perm = gen_permutation(d + 1, seed.wrapping_mul(31));
        let b = a.permuted(&perm);
        // vertex perm^{-1}(0) of b plays the role of 0 in a
        let ends = [perm.iter().position(|&p| p == 0).unwrap(), perm.iter().position(|&p| p == d).unwrap()];
        let an = MatrixAnalysis::new(&b, &tol).unwrap();
        for s in 0..=d {
            for t in 0..=d {
                let r = an.check_main_sym(s, t).unwrap();
                prop_assert!(r.equivalent(), "{:?}", r.disagreement());
                let want = (s == ends[0] && t == ends[1]) || (s == ends[1] && t == ends[0]) || d == 0;
                prop_assert_eq!(r.condition_i.holds, want);
            }
        }
    }

    #[test]
    fn distance_form_on_diagonalizable(d in 0..7usize, seed in any::<u64>(), density in 0.2..0.9f64) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::GeneralNonneg, d, seed, Some(density));
        let an = MatrixAnalysis::new(&a, &tol).unwrap();
        let dist = distances(&a);
        for s in 0..=d {
            for t in 0..=d {
                let r = an.check_main(s, t).unwrap();
                prop_assert_eq!(r.condition_i.distance, dist[s][t]);
                if an.class().is_diagonalizable() {
                    prop_assert!(r.equivalent(), "{:?}", r.disagreement());
                    prop_assert_eq!(r.condition_i.holds, dist[s][t] == Some(d));
                }
            }
        }
    }

    /// Positive scaling changes the profile value but never a verdict.
    #[test]
    fn verdicts_are_scale_invariant(d in 1..7usize, seed in any::<u64>(), c in 0.1..10.0f64) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Hessenberg, d, seed, None);
        let b = a.scale(c);
        for s in 0..=d {
            for t in 0..=d {
                let ra = check_main(&a, s, t, &tol).unwrap();
                let rb = check_main(&b, s, t, &tol).unwrap();
                prop_assert_eq!(ra.condition_i.holds, rb.condition_i.holds);
                prop_assert_eq!(ra.condition_ii.holds, rb.condition_ii.holds);
            }
        }
    }
}

#[test]
fn input_errors() {
    let tol = Tolerance::default();
    let neg = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
    assert!(matches!(check_main_sym(&neg, 0, 1, &tol), Err(TheoremError::NegativeEntry { row: 0, col: 1, .. })));
    let tiny = Matrix::from_rows(&[[1.0, -1e-12], [1.0, 2.0]]).unwrap();
    assert!(!check_main(&tiny, 0, 1, &tol).unwrap().condition_i.holds);
    assert!(check_main(&tiny, 1, 0, &tol).unwrap().condition_i.holds);
    let path = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
    assert!(matches!(check_main(&path, 0, 2, &tol), Err(TheoremError::IndexOutOfRange { index: 2, n: 2 })));
}

#[test]
fn nilpotent_shift_has_distance_but_no_spectrum() {
    let tol = Tolerance::default();
    let a = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
    let r = check_main(&a, 0, 2, &tol).unwrap();
    assert_eq!(r.condition_i.distance, Some(2));
    assert_eq!(r.condition_i.diagonalizable, Some(false));
    assert!(!r.condition_i.holds);
    assert!(!r.condition_ii.holds);
}
