use proptest::prelude::*;
use spectralpath::linalg::sym_eigen;
use spectralpath::spectra::{classify, entry_product_profile, f_eval, f_matrix, SpectralTag};
use spectralpath::theorems::{gen_instance, InstanceKind};
use spectralpath::{Matrix, Tolerance};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(cfg())]

    /// At the path endpoints every `c_i` equals `(A^d)_{0d}`, the product of
    /// the superdiagonal.
    #[test]
    fn tridiagonal_endpoint_profile(d in 0..9usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        let up: f64 = (0..d).map(|i| a[(i, i + 1)]).product();
        let down: f64 = (0..d).map(|i| a[(i + 1, i)]).product();
        let p = entry_product_profile(&a, 0, d, &tol).unwrap();
        prop_assert!(p.is_constant_nonzero());
        prop_assert!(rel(p.common_value.unwrap(), up) < 1e-7, "{:?} vs {up}", p.values);
        let q = entry_product_profile(&a, d, 0, &tol).unwrap();
        prop_assert!(rel(q.common_value.unwrap(), down) < 1e-7);
    }

    #[test]
    fn idempotent_entries_sum_to_identity(d in 1..8usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        let class = classify(&a, &tol).unwrap();
        let spectrum = class.spectrum().unwrap();
        let theta = spectrum.theta();
        for s in 0..=d {
            for t in 0..=d {
                let p = entry_product_profile(&a, s, t, &tol).unwrap();
                let sum: f64 = p.values.iter().enumerate().map(|(i, c)| c / f_eval(theta, i, &tol).unwrap()).sum();
                let want = if s == t { 1.0 } else { 0.0 };
                prop_assert!((sum - want).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn f_matrix_is_scaled_idempotent(d in 0..8usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        let class = classify(&a, &tol).unwrap();
        let spectrum = class.spectrum().unwrap();
        for i in 0..=d {
            let f = f_eval(spectrum.theta(), i, &tol).unwrap();
            let diff = f_matrix(&a, spectrum.theta(), i).max_abs_diff(&spectrum.idempotent(i).scale(f));
            prop_assert!(diff <= 1e-6 * f.abs().max(1.0));
        }
    }

    /// `(A^d)_{d0}` is the product of the subdiagonal, so the profile at
    /// `(d, 0)` of a multiplicity-free Hessenberg matrix is that product.
    #[test]
    fn hessenberg_corner_profile(d in 0..8usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Hessenberg, d, seed, None);
        let class = classify(&a, &tol).unwrap();
        prop_assume!(class.is_multiplicity_free());
        let down: f64 = (0..d).map(|i| a[(i + 1, i)]).product();
        let p = entry_product_profile(&a, d, 0, &tol).unwrap();
        prop_assert!(p.is_constant);
        prop_assert!(rel(p.mean, down) < 1e-6, "{:?} vs {down}", p.values);
    }

    #[test]
    fn symmetric_eigenvalues_agree(d in 0..8usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        let s = Matrix::from_fn(d + 1, |i, j| (a[(i, j)] * a[(j, i)]).sqrt());
        let jac = sym_eigen(&s, &tol).unwrap().values;
        let class = classify(&a, &tol).unwrap();
        let theta = class.spectrum().unwrap().theta();
        prop_assert_eq!(theta.len(), jac.len());
        for (x, y) in theta.iter().zip(&jac) {
            prop_assert!((x - y).abs() < 1e-9 * a.max_abs().max(1.0));
        }
    }
}

#[test]
fn classification_tags() {
    let tol = Tolerance::default();
    let cycle = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
    assert!(matches!(classify(&cycle, &tol).unwrap().tag, SpectralTag::ComplexSpectrum));
    let nil = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
    assert!(matches!(classify(&nil, &tol).unwrap().tag, SpectralTag::NotDiagonalizable));
    assert!(matches!(classify(&Matrix::identity(2), &tol).unwrap().tag, SpectralTag::DiagonalizableNotMF));
    let upper = Matrix::from_rows(&[[1.0, 1.0], [0.0, 2.0]]).unwrap();
    let class = classify(&upper, &tol).unwrap();
    assert_eq!(class.spectrum().unwrap().theta(), &[2.0, 1.0]);
    assert!(entry_product_profile(&nil, 0, 1, &tol).is_err());
    assert!(entry_product_profile(&upper, 0, 2, &tol).is_err());
}
