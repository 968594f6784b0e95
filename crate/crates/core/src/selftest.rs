//! Generator-driven invariant suites.
//!
//! Each suite runs a family of random instances through the library and
//! records how many checks ran, which failed, and the worst residual seen for
//! each measured identity next to the tolerance it was held to. Instance `i`
//! of a run with seed `s` uses seed `s + i`.

use serde::Serialize;

use crate::digraph::{
    bidirected_path_endpoints, directed_distance, gamma, is_hessenberg, is_irreducible_tridiagonal, Digraph,
};
use crate::linalg::{matrix_rank, numeric_rank, Matrix, Tolerance};
use crate::scheme::{
    builtin_scheme, detect_p_polynomial, detect_q_polynomial, eigendata, kn_p_check, kn_q_check, krein_matrix,
    validate_scheme, BuiltinScheme,
};
use crate::spectra::{f_eval, f_matrix, Spectrum};
use crate::symmetrize::{detailed_balance_residual, find_symmetrizer, support_components, tridiagonal_symmetrizer};
use crate::theorems::{gen_instance, gen_permutation, InstanceKind, MatrixAnalysis};

/// Largest residual seen for one identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Worst {
    pub identity: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    pub checks: usize,
    pub failures: usize,
    /// Description of the first failed check.
    pub first_failure: Option<String>,
    pub worst: Vec<Worst>,
    /// Named tallies (for example how many instances were diagonalizable).
    pub counts: Vec<(&'static str, usize)>,
}

impl SuiteReport {
    pub fn new(name: &'static str) -> Self {
        Self { name, instances: 0, checks: 0, failures: 0, first_failure: None, worst: Vec::new(), counts: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn count(&self, name: &str) -> usize {
        self.counts.iter().find(|(n, _)| *n == name).map_or(0, |(_, c)| *c)
    }

    fn bump(&mut self, name: &'static str) {
        match self.counts.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => self.counts.push((name, 1)),
        }
    }

    /// Records a boolean check; `describe` is only called on failure.
    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// Records `residual ≤ tolerance` and keeps the worst ratio per identity.
    pub fn measure(&mut self, identity: &'static str, residual: f64, tolerance: f64, context: impl FnOnce() -> String) {
        let ok = residual <= tolerance;
        self.check(ok, || format!("{identity}: residual {residual:e} > {tolerance:e} ({})", context()));
        let ratio = |r: f64, t: f64| if t > 0.0 { r / t } else { r };
        match self.worst.iter_mut().find(|w| w.identity == identity) {
            Some(w) => {
                if residual.is_nan() || ratio(residual, tolerance) > ratio(w.residual, w.tolerance) {
                    w.residual = residual;
                    w.tolerance = tolerance;
                }
            }
            None => self.worst.push(Worst { identity, residual, tolerance }),
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Case {
    pub d: usize,
    pub seed: u64,
}

/// `trials` cases with `d` cycling through `0..=d_max` and seeds `seed + i`.
pub fn cycling_cases(d_max: usize, trials: usize, seed: u64) -> Vec<Case> {
    (0..trials).map(|i| Case { d: i % (d_max + 1), seed: seed.wrapping_add(i as u64) }).collect()
}

/// Spectral identities of one multiplicity-free decomposition, at the
/// thresholds of the acceptance criteria.
pub fn record_spectrum(acc: &mut SuiteReport, a: &Matrix, spectrum: &Spectrum, tol: &Tolerance, label: &str) {
    acc.instances += 1;
    let r = spectrum.residuals();
    let ctx = || label.to_string();
    acc.measure("sum of idempotents = I", r.resolution, 1e-8, ctx);
    acc.measure("E_i E_j = δ_ij E_i", r.orthogonality, 1e-8, ctx);
    acc.measure("A = Σ θ_i E_i (relative to ‖A‖)", r.reconstruction, 1e-8 * a.max_abs().max(f64::MIN_POSITIVE), ctx);
    let theta = spectrum.theta();
    for i in 0..theta.len() {
        match f_eval(theta, i, tol) {
            Ok(fi) => {
                let lhs = f_matrix(a, theta, i);
                let rhs = spectrum.idempotent(i).scale(fi);
                acc.measure(
                    "f_i(A) = f_i(θ_i) E_i (relative to |f_i(θ_i)|)",
                    lhs.max_abs_diff(&rhs),
                    1e-6 * fi.abs(),
                    ctx,
                );
            }
            Err(e) => acc.fail(format!("{label}: {e}")),
        }
    }
}

fn brute_force_distance(g: &Digraph, s: usize, t: usize) -> Option<usize> {
    // layered reachability without BFS parents: walks of length r, r = 0..n
    let n = g.vertex_count();
    let mut frontier = vec![false; n];
    frontier[s] = true;
    for r in 0..n {
        if frontier[t] {
            return Some(r);
        }
        let mut next = frontier.clone();
        for (u, v) in g.arcs() {
            if frontier[u] {
                next[v] = true;
            }
        }
        frontier = next;
    }
    frontier[t].then_some(n)
}

/// Whether a walk of exactly `r` steps from `s` to `t` exists, by explicit
/// enumeration of vertex sequences.
pub fn walk_exists(g: &Digraph, s: usize, t: usize, r: usize) -> bool {
    if r == 0 {
        return s == t;
    }
    g.out_neighbors(s).iter().any(|&w| walk_exists(g, w, t, r - 1))
}

/// Path characterization on permuted paths.
pub fn path_form_suite(cases: &[Case], tol: &Tolerance, spectra: &mut SuiteReport, force_bug: bool) -> SuiteReport {
    let mut suite = SuiteReport::new("path form (permuted paths)");
    let mut bug_pending = force_bug;
    for case in cases {
        suite.instances += 1;
        let a = gen_instance(InstanceKind::PermutedPath, case.d, case.seed, None);
        let label = || format!("permuted_path d={} seed={}", case.d, case.seed);
        let analysis = match MatrixAnalysis::new(&a, tol) {
            Ok(x) => x,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        if let Some(sp) = analysis.class().spectrum() {
            record_spectrum(spectra, analysis.matrix(), sp, tol, &label());
        }
        let symmetrizable = analysis.class().symmetrizer.is_ok();
        suite.check(symmetrizable, || format!("{}: no symmetrizer", label()));
        suite.check(analysis.class().is_multiplicity_free(), || format!("{}: not multiplicity-free", label()));
        let n = case.d + 1;
        let mut true_pairs = 0;
        for s in 0..n {
            for t in 0..n {
                let mut report = match analysis.check_main_sym(s, t) {
                    Ok(r) => r,
                    Err(e) => {
                        suite.fail(format!("{} ({s},{t}): {e}", label()));
                        continue;
                    }
                };
                if bug_pending {
                    report.condition_ii.holds = !report.condition_ii.holds;
                    bug_pending = false;
                }
                suite.check(report.equivalent(), || {
                    format!("{} ({s},{t}): {}", label(), report.disagreement().unwrap_or_default())
                });
                if report.condition_i.holds && (s < t || n == 1) {
                    true_pairs += 1;
                }
                // symmetrizable with ∂(s,t) = d characterizes the path endpoints
                let by_distance = symmetrizable && report.condition_i.distance == Some(case.d);
                suite.check(by_distance == report.condition_i.holds, || {
                    format!("{} ({s},{t}): endpoint test disagrees with symmetrizer plus distance", label())
                });
            }
        }
        suite.check(true_pairs == 1, || format!("{}: {true_pairs} true endpoint pairs", label()));
    }
    suite
}

/// Distance characterization on sparse nonnegative matrices, with the
/// walk and distance facts it rests on.
pub fn distance_form_suite(cases: &[Case], density: f64, tol: &Tolerance, spectra: &mut SuiteReport) -> SuiteReport {
    let mut suite = SuiteReport::new("distance form (general nonnegative)");
    for case in cases {
        suite.instances += 1;
        let a = gen_instance(InstanceKind::GeneralNonneg, case.d, case.seed, Some(density));
        let label = || format!("general_nonneg d={} seed={}", case.d, case.seed);
        let analysis = match MatrixAnalysis::new(&a, tol) {
            Ok(x) => x,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        let class = analysis.class();
        suite.bump(class.name());
        if class.is_diagonalizable() {
            suite.bump("diagonalizable");
        }
        if let Some(sp) = class.spectrum() {
            record_spectrum(spectra, analysis.matrix(), sp, tol, &label());
        }
        if class.symmetrizer.is_ok() {
            suite.check(class.is_diagonalizable(), || format!("{}: symmetrizable but {}", label(), class.name()));
        }
        let n = case.d + 1;
        let g = analysis.graph();
        let g_loops = gamma(analysis.matrix(), tol, true);
        let powers: Vec<Matrix> = (0..=case.d).map(|r| analysis.matrix().power(r)).collect();
        for s in 0..n {
            for t in 0..n {
                let report = match analysis.check_main(s, t) {
                    Ok(r) => r,
                    Err(e) => {
                        suite.fail(format!("{} ({s},{t}): {e}", label()));
                        continue;
                    }
                };
                suite.check(report.equivalent(), || {
                    format!("{} ({s},{t}): {}", label(), report.disagreement().unwrap_or_default())
                });
                if report.condition_i.holds {
                    suite.bump("pairs with condition (i)");
                }
                let dist = report.condition_i.distance;
                if case.d <= 5 {
                    let brute = brute_force_distance(g, s, t);
                    suite
                        .check(brute == dist, || format!("{} ({s},{t}): BFS {dist:?}, brute force {brute:?}", label()));
                }
                if s != t {
                    let with_loops = directed_distance(&g_loops, s, t).ok().flatten();
                    suite.check(with_loops == dist, || format!("{} ({s},{t}): loops change the distance", label()));
                }
                let first_nonzero_at_d = (0..=case.d).all(|r| tol.is_nonzero(powers[r][(s, t)]) == (r == case.d));
                suite.check(first_nonzero_at_d == (dist == Some(case.d)), || {
                    format!("{} ({s},{t}): power pattern disagrees with ∂ = {dist:?}", label())
                });
                if n <= 6 {
                    for r in 0..=case.d.min(5) {
                        let walk = walk_exists(&g_loops, s, t, r);
                        suite.check(walk == tol.is_nonzero(powers[r][(s, t)]), || {
                            format!("{} ({s},{t}) r={r}: walk enumeration disagrees with A^r", label())
                        });
                    }
                }
                if let Some(ord) = &report.condition_i.hessenberg_ordering {
                    let h = analysis.matrix().permuted(ord);
                    suite.check(is_hessenberg(&h, tol), || format!("{} ({s},{t}): ordering not Hessenberg", label()));
                }
            }
        }
    }
    suite
}

/// Power pattern, rank and multiplicity-freeness of Hessenberg matrices.
pub fn hessenberg_suite(cases: &[Case], tol: &Tolerance, spectra: &mut SuiteReport) -> SuiteReport {
    const PATTERN_TOL: f64 = 1e-12;
    let mut suite = SuiteReport::new("Hessenberg structure");
    for case in cases {
        suite.instances += 1;
        let a = gen_instance(InstanceKind::Hessenberg, case.d, case.seed, None);
        let label = || format!("hessenberg d={} seed={}", case.d, case.seed);
        let n = case.d + 1;
        suite.check(is_hessenberg(&a, tol), || format!("{}: generator output not Hessenberg", label()));
        let powers: Vec<Matrix> = (0..=case.d).map(|r| a.power(r)).collect();
        for (r, ar) in powers.iter().enumerate() {
            for i in 0..n {
                for j in 0..i {
                    let v = ar[(i, j)].abs();
                    if i - j == r {
                        suite.check(v > PATTERN_TOL, || {
                            format!("{}: (A^{r})[{i},{j}] = {v:e} should be nonzero", label())
                        });
                    } else if i - j > r {
                        suite
                            .check(v < PATTERN_TOL, || format!("{}: (A^{r})[{i},{j}] = {v:e} should be zero", label()));
                    }
                }
            }
        }
        let columns: Vec<Vec<f64>> = powers.iter().map(|p| p.as_slice().to_vec()).collect();
        let rank = numeric_rank(&columns, tol.residual_tol);
        suite.check(rank == n, || format!("{}: powers A^0..A^d have rank {rank}", label()));

        let analysis = match MatrixAnalysis::new(&a, tol) {
            Ok(x) => x,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        let class = analysis.class();
        suite.bump(class.name());
        if class.is_diagonalizable() {
            suite.check(class.is_multiplicity_free(), || format!("{}: diagonalizable but {}", label(), class.name()));
        }
        if let Some(sp) = class.spectrum() {
            record_spectrum(spectra, analysis.matrix(), sp, tol, &label());
            // (A^r)_{d0} = 0 for r < d holds, so the profile at (d, 0) is constant
            let profile = analysis.profile(case.d, 0).expect("multiplicity-free");
            suite.check(profile.is_constant_nonzero(), || {
                format!("{}: profile at (d,0) {:?} not constant", label(), profile.values)
            });
        }
    }
    suite
}

/// Symmetrizers of irreducible tridiagonal matrices and their behaviour
/// under permutation.
pub fn symmetrizer_suite(
    cases: &[Case],
    permutations: usize,
    tol: &Tolerance,
    spectra: &mut SuiteReport,
) -> SuiteReport {
    let mut suite = SuiteReport::new("symmetrizers (tridiagonal)");
    for case in cases {
        suite.instances += 1;
        let a = gen_instance(InstanceKind::Tridiagonal, case.d, case.seed, None);
        let label = || format!("tridiagonal d={} seed={}", case.d, case.seed);
        let n = case.d + 1;
        suite.check(is_irreducible_tridiagonal(&a, tol), || format!("{}: not irreducible tridiagonal", label()));
        let closed = match tridiagonal_symmetrizer(&a, tol) {
            Ok(s) => s,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        suite.measure(
            "‖KA − AᵗK‖ (relative to ‖A‖)",
            detailed_balance_residual(&a, &closed.kappa),
            1e-9 * a.max_abs(),
            label,
        );
        let general = match find_symmetrizer(&a, tol) {
            Ok(s) => s,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        let all: Vec<Vec<usize>> = vec![(0..n).collect()];
        suite.measure("closed form vs propagation (ratio spread)", closed.ratio_spread(&general, &all), 1e-9, label);
        match MatrixAnalysis::new(&a, tol) {
            Ok(an) => {
                suite.check(an.class().is_multiplicity_free(), || format!("{}: {}", label(), an.class().name()));
                if let Some(sp) = an.class().spectrum() {
                    record_spectrum(spectra, an.matrix(), sp, tol, &label());
                }
            }
            Err(e) => suite.fail(format!("{}: {e}", label())),
        }
        for p in 0..permutations {
            let perm = gen_permutation(n, case.seed.wrapping_mul(31).wrapping_add(p as u64));
            let b = a.permuted(&perm);
            match find_symmetrizer(&b, tol) {
                Ok(sb) => {
                    let expected =
                        crate::symmetrize::Symmetrizer::from_kappa(perm.iter().map(|&i| general.kappa[i]).collect());
                    let comps = support_components(&b, tol);
                    suite.measure("permuted κ (ratio spread)", sb.ratio_spread(&expected, &comps), 1e-9, label);
                    suite.measure(
                        "‖KA − AᵗK‖ after permutation (relative to ‖A‖)",
                        detailed_balance_residual(&b, &sb.kappa),
                        1e-9 * b.max_abs(),
                        label,
                    );
                }
                Err(e) => suite.fail(format!("{} permutation {perm:?}: {e}", label())),
            }
            let path = bidirected_path_endpoints(&gamma(&b, tol, false));
            let tri = path.as_ref().is_some_and(|ord| is_irreducible_tridiagonal(&b.permuted(ord), tol));
            suite.check(tri, || {
                format!("{} permutation {perm:?}: path ordering does not restore tridiagonal form", label())
            });
        }
    }
    suite
}

/// Hypercube and complete-graph schemes up to `n_max`.
pub fn scheme_suite(n_max: usize, seed: u64, tol: &Tolerance) -> SuiteReport {
    let mut suite = SuiteReport::new("association schemes");
    let mut builtins = Vec::new();
    for n in 1..=n_max.max(1) {
        builtins.push(BuiltinScheme::Hypercube(n));
        builtins.push(BuiltinScheme::Complete(n + 1));
    }
    for b in builtins {
        suite.instances += 1;
        let label = || b.to_string();
        let scheme = match builtin_scheme(b).and_then(|raw| validate_scheme(&raw)) {
            Ok(s) => s,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        let ed = match eigendata(&scheme, tol, seed) {
            Ok(e) => e,
            Err(e) => {
                suite.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        let d = scheme.d();
        let x = scheme.x_size() as f64;
        suite.measure("PQ = |X| I", ed.residuals.pq, ed.tolerances.pq, label);
        suite.measure("Krein nonnegativity (−min q)", -ed.krein.min(), tol.residual_tol * ed.krein_scale(), label);
        let sqrt_k: Vec<f64> = ed.k.iter().map(|v| v.sqrt()).collect();
        for i in 0..=d {
            let bi = scheme.intersection_matrix(i).expect("index in range");
            suite.check(bi.has_negative_entry(0.0).is_none(), || format!("{}: B_{i} has a negative entry", label()));
            let (_, _, gap) = bi.diagonal_similarity(&sqrt_k).max_asymmetry();
            suite.measure("diag(√k) symmetrizes B_i", gap, tol.residual_tol * bi.max_abs().max(1.0), label);
            match krein_matrix(&ed, i, tol) {
                Ok(bs) => {
                    let ktol = Tolerance { zero_tol: tol.zero_tol.max(tol.residual_tol * ed.krein_scale()), ..*tol };
                    for (m, name) in [(&bi, "B"), (&bs, "B*")] {
                        let g = gamma(m, &ktol, false);
                        let arcs_from_0: Vec<usize> = g.out_neighbors(0).to_vec();
                        let symmetric = g.arcs().all(|(u, v)| g.has_arc(v, u));
                        let want: Vec<usize> = if i == 0 { vec![] } else { vec![i] };
                        suite.check(symmetric && arcs_from_0 == want, || {
                            format!(
                                "{}: Γ({name}_{i}) has arcs from 0 to {arcs_from_0:?}, symmetric {symmetric}",
                                label()
                            )
                        });
                    }
                }
                Err(e) => suite.fail(format!("{}: {e}", label())),
            }
        }
        let p_structs = detect_p_polynomial(&scheme, tol);
        if let BuiltinScheme::Hypercube(n) = b {
            suite.check(p_structs.iter().any(|s| s.generator == 1 && s.last == n), || {
                format!("{}: distance ordering not detected", label())
            });
        }
        for ps in &p_structs {
            let b1 = scheme.intersection_matrix(ps.generator).expect("index in range");
            suite.check(is_irreducible_tridiagonal(&b1.permuted(&ps.ordering), tol), || {
                format!("{}: reordered B_{} not tridiagonal", label(), ps.generator)
            });
        }
        for bi in 1..=d {
            for c in 1..=d {
                match kn_p_check(&scheme, &ed, bi, c, tol) {
                    Ok(r) => {
                        suite.check(r.agree() && r.path_check_consistent(), || {
                            format!("{}: P-check ({bi},{c}) sides {} vs {}", label(), r.side_i, r.side_ii)
                        });
                        if r.side_i {
                            suite.bump("P-polynomial structures confirmed");
                        }
                    }
                    Err(e) => suite.fail(format!("{}: {e}", label())),
                }
                match kn_q_check(&ed, bi, c, tol) {
                    Ok(r) => {
                        suite.check(r.agree() && r.path_check_consistent(), || {
                            format!("{}: Q-check ({bi},{c}) sides {} vs {}", label(), r.side_i, r.side_ii)
                        });
                        if r.side_i {
                            suite.bump("Q-polynomial structures confirmed");
                        }
                    }
                    Err(e) => suite.fail(format!("{}: {e}", label())),
                }
            }
        }
        match detect_q_polynomial(&ed, tol) {
            Ok(q) => suite.check(d == 0 || !q.is_empty(), || format!("{}: no Q-polynomial structure", label())),
            Err(e) => suite.fail(format!("{}: {e}", label())),
        }
        if scheme.x_size() <= 64 {
            let a: Vec<Matrix> = (0..=d).map(|i| scheme.adjacency_matrix(i).unwrap().unwrap()).collect();
            for i in 0..=d {
                for j in 0..=d {
                    let lhs = a[i].matmul(&a[j]);
                    let rhs = (0..=d).fold(Matrix::zeros(a[0].order()), |acc, h| {
                        acc.add(&a[h].scale(scheme.p(h, i, j) as f64)).expect("same order")
                    });
                    suite.check(lhs == rhs, || format!("{}: A_{i} A_{j} ≠ Σ p^h_ij A_h", label()));
                }
                let e = crate::scheme::eigen::full_idempotent(&scheme, &ed, i).unwrap().unwrap();
                let rank = matrix_rank(&e, tol.residual_tol * x) as f64;
                suite.measure("m_i = rank E_i", (rank - ed.m[i]).abs(), tol.residual_tol, label);
            }
        }
    }
    suite
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestConfig {
    pub d_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    /// Deliberately corrupts one verdict so the harness can be seen to fail.
    pub force_bug: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub config: SelftestConfig,
    pub suites: Vec<SuiteReport>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

/// Runs every suite; instance sizes cycle through `0..=d_max`.
pub fn run_selftest(config: &SelftestConfig) -> SelftestReport {
    let tol = &config.tolerance;
    let cases = cycling_cases(config.d_max, config.trials, config.seed);
    let mut spectra = SuiteReport::new("spectral identities");
    let mut suites = vec![
        path_form_suite(&cases, tol, &mut spectra, config.force_bug),
        distance_form_suite(&cases, 0.4, tol, &mut spectra),
        hessenberg_suite(&cases, tol, &mut spectra),
        symmetrizer_suite(&cases, 10, tol, &mut spectra),
        scheme_suite(config.d_max.min(6), config.seed, tol),
    ];
    suites.push(spectra);
    SelftestReport { config: config.clone(), suites }
}
