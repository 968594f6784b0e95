//! Subcommand implementations. Each builds a serializable result, a verdict
//! whose status fixes the exit code, and a text rendering.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use spectralpath::digraph::{bidirected_path_endpoints, gamma};
use spectralpath::io::parse_matrix;
use spectralpath::scheme::format::parse_scheme;
use spectralpath::scheme::poly::Duality;
use spectralpath::scheme::{
    builtin_scheme, detect_p_polynomial, detect_q_polynomial, eigendata, kn_p_check, kn_q_check, validate_scheme,
    AssociationScheme, BuiltinScheme, KnReport, PolyStructure, SchemeEigendata, SchemeError, ValidatedScheme,
};
use spectralpath::selftest::{run_selftest, SelftestConfig, SelftestReport};
use spectralpath::spectra::{classify, Profile, ScaledIdempotents, SpectralDiagnostics, SpectrumResiduals};
use spectralpath::symmetrize::{detailed_balance_residual, NotSymmetrizable};
use spectralpath::theorems::{MatrixAnalysis, Theorem, TheoremError, TheoremReport};
use spectralpath::{Matrix, Tolerance};

use crate::render::{ints, matrix, sig, vector};
use crate::{Context, SchemeAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    True,
    False,
    Disagreement,
    Fail,
    InputError,
    NumericalError,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Pass | Status::True => 0,
            Status::False => 1,
            Status::InputError => 2,
            Status::Disagreement | Status::Fail | Status::NumericalError => 3,
        }
    }
}

#[derive(Serialize)]
struct Verdict {
    status: Status,
    summary: String,
    exit_code: u8,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a [String],
    tolerance: Tolerance,
    seed: Option<u64>,
    result: Option<T>,
    verdict: Verdict,
}

/// A residual next to the bound it was compared with.
#[derive(Debug, Clone, Copy, Serialize)]
struct Bound {
    residual: f64,
    tolerance: f64,
}

impl Bound {
    fn text(self) -> String {
        format!("{} (tolerance {})", sig(self.residual), sig(self.tolerance))
    }
}

fn emit<T: Serialize>(
    ctx: &Context,
    seed: Option<u64>,
    result: Option<T>,
    status: Status,
    summary: String,
    human: String,
) -> u8 {
    let code = status.exit_code();
    if ctx.json {
        let env = Envelope {
            command: &ctx.command,
            tolerance: ctx.tol,
            seed,
            result,
            verdict: Verdict { status, summary, exit_code: code },
        };
        let json = serde_json::to_string_pretty(&env).expect("reports serialize");
        write_stdout(&format!("{json}\n"));
    } else {
        write_stdout(&format!("{human}verdict: {summary}\n"));
    }
    code
}

/// A closed pipe (for example `| head`) is not an error worth a panic.
fn write_stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn error(ctx: &Context, status: Status, message: String) -> u8 {
    if ctx.json {
        emit::<()>(ctx, None, None, status, message, String::new())
    } else {
        eprintln!("error: {message}");
        status.exit_code()
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_matrix(path: &Path) -> Result<Matrix, String> {
    parse_matrix(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

#[derive(Serialize)]
struct SpectralCheck {
    residuals: SpectrumResiduals,
    /// Bound for the resolution and orthogonality residuals.
    identity_tolerance: f64,
    /// Bound for the reconstruction residual.
    reconstruction_tolerance: f64,
}

#[derive(Serialize)]
struct AnalyzeResult {
    order: usize,
    d: usize,
    arcs: Vec<(usize, usize)>,
    /// Vertex sequence when Γ(A) is a bidirected path.
    path: Option<Vec<usize>>,
    class: &'static str,
    diagnostics: SpectralDiagnostics,
    symmetrizer: Result<Vec<f64>, NotSymmetrizable>,
    /// ‖KA − AᵗK‖ for the symmetrizer found.
    detailed_balance: Option<Bound>,
    theta: Option<Vec<f64>>,
    spectral_check: Option<SpectralCheck>,
    profiles: Vec<Profile>,
}

pub fn analyze(ctx: &Context, path: &Path, pair: Option<(usize, usize)>) -> u8 {
    let a = match load_matrix(path) {
        Ok(a) => a,
        Err(msg) => return error(ctx, Status::InputError, msg),
    };
    let n = a.order();
    if let Some((s, t)) = pair {
        if s >= n || t >= n {
            return error(ctx, Status::InputError, format!("index pair ({s},{t}) out of range for order {n}"));
        }
    }
    let tol = &ctx.tol;
    let class = match classify(&a, tol) {
        Ok(c) => c,
        Err(e) => return error(ctx, Status::NumericalError, e.to_string()),
    };
    let g = gamma(&a, tol, false);
    let path_seq = bidirected_path_endpoints(&g);
    let norm = a.max_abs().max(1.0);
    let detailed_balance = class
        .symmetrizer
        .as_ref()
        .ok()
        .map(|s| Bound { residual: detailed_balance_residual(&a, &s.kappa), tolerance: tol.residual_tol * norm });
    let spectrum = class.spectrum();
    let spectral_check = spectrum.map(|sp| {
        let r = sp.residuals();
        let identity_tolerance = tol.residual_tol * r.idempotent_scale.max(1.0);
        SpectralCheck { residuals: r, identity_tolerance, reconstruction_tolerance: identity_tolerance * norm }
    });
    let pairs: Vec<(usize, usize)> = match pair {
        Some(p) => vec![p],
        None => (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect(),
    };
    let profiles: Vec<Profile> = spectrum
        .map(|sp| {
            let scaled = ScaledIdempotents::new(&a, sp, tol);
            pairs.iter().map(|&(s, t)| scaled.profile(s, t)).collect()
        })
        .unwrap_or_default();
    let result = AnalyzeResult {
        order: n,
        d: n - 1,
        arcs: g.arcs().collect(),
        path: path_seq,
        class: class.name(),
        diagnostics: class.diagnostics.clone(),
        symmetrizer: class.symmetrizer.clone().map(|s| s.kappa),
        detailed_balance,
        theta: spectrum.map(|sp| sp.theta().to_vec()),
        spectral_check,
        profiles,
    };

    let mut out = String::new();
    let _ = writeln!(out, "matrix of order {n} (d = {})", n - 1);
    let _ = write!(out, "Γ(A): {} arcs", result.arcs.len());
    match &result.path {
        Some(p) if n > 1 => {
            let _ = writeln!(out, "; bidirected path {}, endpoints {{{}, {}}}", ints(p), p[0], p[n - 1]);
        }
        Some(_) => {
            let _ = writeln!(out, "; single vertex");
        }
        None => {
            let _ = writeln!(out, "; not a bidirected path");
        }
    }
    if n <= 12 && !result.arcs.is_empty() {
        let arcs: Vec<String> = result.arcs.iter().map(|(i, j)| format!("{i}->{j}")).collect();
        let _ = writeln!(out, "  arcs: {}", arcs.join(" "));
    }
    let diag = &result.diagnostics;
    let _ = writeln!(
        out,
        "spectral class: {} (route {:?}, min eigenvalue gap {}, gap threshold {})",
        result.class,
        diag.route,
        diag.min_gap.map_or("n/a".into(), sig),
        sig(diag.gap_threshold)
    );
    let values: Vec<String> = diag
        .eigenvalues
        .iter()
        .map(|c| if c.algebraic > 1 { format!("{} (x{})", sig(c.value), c.algebraic) } else { sig(c.value) })
        .collect();
    let _ = writeln!(out, "real eigenvalues: {}", values.join(", "));
    if diag.complex_count > 0 {
        let _ = writeln!(out, "non-real eigenvalues: {}", diag.complex_count);
    }
    match (&result.symmetrizer, result.detailed_balance) {
        (Ok(kappa), Some(b)) => {
            let _ = writeln!(out, "symmetrizer: κ = {}; ‖KA − AᵗK‖ = {}", vector(kappa), b.text());
        }
        (Err(e), _) => {
            let _ = writeln!(out, "symmetrizer: none ({e})");
        }
        _ => {}
    }
    if let Some(check) = &result.spectral_check {
        let r = &check.residuals;
        let _ = writeln!(
            out,
            "idempotent residuals: resolution {}, orthogonality {} (tolerance {}); reconstruction {} (tolerance {})",
            sig(r.resolution),
            sig(r.orthogonality),
            sig(check.identity_tolerance),
            sig(r.reconstruction),
            sig(check.reconstruction_tolerance)
        );
    }
    if !result.profiles.is_empty() {
        let _ = writeln!(out, "entry-product profiles (constancy threshold {}):", sig(result.profiles[0].threshold));
        for p in &result.profiles {
            let verdict = match p.common_value {
                Some(v) => format!("constant {}", sig(v)),
                None if p.constant_zero => "constant zero".to_string(),
                None => "not constant".to_string(),
            };
            let _ =
                writeln!(out, "  ({},{}): {} deviation {}; {verdict}", p.s, p.t, vector(&p.values), sig(p.deviation));
        }
    }
    let summary = format!("analysis complete: {}", result.class);
    emit(ctx, None, Some(result), Status::Pass, summary, out)
}

fn theorem_text(report: &TheoremReport) -> String {
    let mut out = String::new();
    let name = match report.which {
        Theorem::MainSym => "mainsym (bidirected path form)",
        Theorem::Main => "main (directed distance form)",
    };
    let _ = writeln!(out, "theorem {name} at (s,t) = ({},{})", report.s, report.t);
    let i = &report.condition_i;
    let path = i.path.as_ref().map_or("not a bidirected path".to_string(), |p| format!("bidirected path {}", ints(p)));
    let dist = i.distance.map_or("unreachable".to_string(), |d| d.to_string());
    let _ = write!(out, "condition (i): {}; Γ(A) {path}; ∂(s,t) = {dist}", i.holds);
    if let Some(diag) = i.diagonalizable {
        let _ = write!(out, "; diagonalizable {diag}");
    }
    out.push('\n');
    if let Some(ord) = &i.hessenberg_ordering {
        let _ = writeln!(out, "  Hessenberg ordering: {}", ints(ord));
    }
    let ii = &report.condition_ii;
    let sym = match &ii.symmetrizer {
        Ok(k) => format!("symmetrizable, κ = {}", vector(k)),
        Err(e) => format!("not symmetrizable ({e})"),
    };
    let _ = writeln!(out, "condition (ii): {}; class {}; {sym}", ii.holds, ii.class);
    if let Some(theta) = &ii.theta {
        let _ = writeln!(out, "  θ = {}; min gap {}", vector(theta), ii.min_gap.map_or("n/a".into(), sig));
    }
    if let Some(p) = &ii.profile {
        let verdict = match p.common_value {
            Some(v) => format!("constant, common value {}", sig(v)),
            None if p.constant_zero => "constant zero".to_string(),
            None => "not constant".to_string(),
        };
        let _ = writeln!(
            out,
            "  profile {}: deviation {} (threshold {}); {verdict}",
            vector(&p.values),
            sig(p.deviation),
            sig(p.threshold)
        );
    }
    out
}

pub fn check(ctx: &Context, path: &Path, which: Theorem, s: usize, t: usize) -> u8 {
    let a = match load_matrix(path) {
        Ok(a) => a,
        Err(msg) => return error(ctx, Status::InputError, msg),
    };
    let report = MatrixAnalysis::new(&a, &ctx.tol).and_then(|an| an.check(which, s, t));
    let report = match report {
        Ok(r) => r,
        Err(
            e @ (TheoremError::NegativeEntry { .. } | TheoremError::IndexOutOfRange { .. } | TheoremError::Digraph(_)),
        ) => return error(ctx, Status::InputError, e.to_string()),
        Err(e) => return error(ctx, Status::NumericalError, e.to_string()),
    };
    let (status, summary) = match (report.equivalent(), report.condition_i.holds) {
        (true, true) => (Status::True, "both conditions hold".to_string()),
        (true, false) => (Status::False, "both conditions fail".to_string()),
        (false, _) => (Status::Disagreement, report.disagreement().unwrap_or_default()),
    };
    let text = theorem_text(&report);
    emit(ctx, None, Some(report), status, summary, text)
}

fn load_scheme(source: &str) -> Result<AssociationScheme, String> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let which: BuiltinScheme = name.parse().map_err(|e: SchemeError| e.to_string())?;
        return builtin_scheme(which).map_err(|e| e.to_string());
    }
    let path = Path::new(source);
    parse_scheme(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

#[derive(Serialize)]
struct InfoResult {
    x_size: usize,
    d: usize,
    k: Vec<u64>,
    m: Vec<f64>,
    p: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    krein_min: f64,
    krein_max: f64,
    attempts: usize,
    residuals: spectralpath::scheme::eigen::EigenResiduals,
    tolerances: spectralpath::scheme::eigen::EigenResiduals,
}

#[derive(Serialize)]
struct StructuresResult {
    kind: &'static str,
    structures: Vec<PolyStructure>,
    /// For the Q side, entries of B*_i at or below this count as zero.
    zero_tolerance: f64,
}

fn structures_text(kind: &str, found: &[PolyStructure]) -> String {
    let mut out = format!("{kind}-polynomial structures: {}\n", found.len());
    let symbol = if kind == "P" { "A" } else { "E" };
    for s in found {
        let ord: Vec<String> = s.ordering.iter().map(|i| format!("{symbol}_{i}")).collect();
        let _ = writeln!(out, "  generator {} last {}: {}", s.generator, s.last, ord.join(", "));
    }
    out
}

fn kn_text(r: &KnReport) -> String {
    let (kind, gen, last, obs, theta, ratio) = match r.duality {
        Duality::P => ("P", "A", "A", "Q", "θ_i = P_ib", "f_0(θ_0)/f_i(θ_i)"),
        Duality::Q => ("Q", "E", "E", "P", "θ*_i = Q_ie", "f*_0(θ*_0)/f*_i(θ*_i)"),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{kind}-polynomial relative to {gen}_{} with last {last}_{}", r.generator, r.last);
    let found: Vec<String> =
        r.detected.iter().map(|s| format!("(generator {}, last {})", s.generator, s.last)).collect();
    let _ = writeln!(
        out,
        "side (i): {}; detected {}",
        r.side_i,
        if found.is_empty() { "none".into() } else { found.join(" ") }
    );
    let _ = writeln!(out, "side (ii): {}; {theta} = {}, distinct {}", r.side_ii, vector(&r.theta), r.theta_distinct);
    let _ = writeln!(out, "  {obs}_{}i = {}", r.last, vector(&r.observed));
    if let Some(exp) = &r.expected {
        let _ = writeln!(out, "  {ratio} = {}", vector(exp));
    }
    if let Some(dev) = r.max_deviation {
        let _ = writeln!(out, "  max deviation {} (relative tolerance {})", sig(dev), sig(r.tolerance));
    }
    let pc = &r.path_check;
    let _ = writeln!(
        out,
        "path characterization at ({},0): condition (i) {}, condition (ii) {}",
        pc.s, pc.condition_i.holds, pc.condition_ii.holds
    );
    out
}

fn kn_verdict(r: &KnReport) -> (Status, String) {
    if !r.path_check_consistent() {
        return (Status::Disagreement, "path characterization disagrees with the detected structure".into());
    }
    match (r.agree(), r.side_i) {
        (true, true) => (Status::True, "both sides true".into()),
        (true, false) => (Status::False, "both sides false".into()),
        (false, _) => (Status::Disagreement, format!("side (i) = {}, side (ii) = {}", r.side_i, r.side_ii)),
    }
}

fn scheme_error(ctx: &Context, e: SchemeError) -> u8 {
    let status = match e {
        SchemeError::IndexOutOfRange { .. } | SchemeError::TrivialIndex { .. } => Status::InputError,
        _ => Status::NumericalError,
    };
    error(ctx, status, e.to_string())
}

pub fn scheme(ctx: &Context, source: &str, action: &SchemeAction) -> u8 {
    let raw = match load_scheme(source) {
        Ok(r) => r,
        Err(msg) => return error(ctx, Status::InputError, msg),
    };
    let scheme: ValidatedScheme = match validate_scheme(&raw) {
        Ok(s) => s,
        Err(e) => return error(ctx, Status::InputError, e.to_string()),
    };
    let tol = &ctx.tol;
    if let SchemeAction::PPoly = action {
        let found = detect_p_polynomial(&scheme, tol);
        let status = if found.is_empty() { Status::False } else { Status::True };
        let summary = format!("{} P-polynomial structure(s)", found.len());
        let text = structures_text("P", &found);
        let result = StructuresResult { kind: "P", structures: found, zero_tolerance: tol.zero_tol };
        return emit(ctx, None, Some(result), status, summary, text);
    }
    if let SchemeAction::KnP { b, c } = action {
        let d = scheme.d();
        if *b == 0 || *c == 0 || *b > d || *c > d {
            return error(ctx, Status::InputError, format!("indices must lie in 1..={d}, got b = {b}, c = {c}"));
        }
    }
    let ed: SchemeEigendata = match eigendata(&scheme, tol, ctx.seed) {
        Ok(e) => e,
        Err(e) => return scheme_error(ctx, e),
    };
    let seed = Some(ctx.seed);
    match action {
        SchemeAction::Info => {
            let result = InfoResult {
                x_size: ed.x_size,
                d: ed.d,
                k: scheme.valencies().to_vec(),
                m: ed.m.clone(),
                p: ed.p.to_rows(),
                q: ed.q.to_rows(),
                krein_min: ed.krein.min(),
                krein_max: ed.krein.max(),
                attempts: ed.attempts,
                residuals: ed.residuals,
                tolerances: ed.tolerances,
            };
            let mut out = String::new();
            let _ = writeln!(out, "scheme with |X| = {}, d = {}", ed.x_size, ed.d);
            let k: Vec<String> = result.k.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "valencies k = ({})", k.join(", "));
            let _ = writeln!(out, "multiplicities m = {}", vector(&ed.m));
            let _ = write!(out, "P =\n{}", matrix(&ed.p, "  "));
            let _ = write!(out, "Q =\n{}", matrix(&ed.q, "  "));
            let _ = writeln!(out, "Krein parameters: min {}, max {}", sig(result.krein_min), sig(result.krein_max));
            let (r, t) = (&ed.residuals, &ed.tolerances);
            let _ = writeln!(out, "residuals (tolerance):");
            for (name, res, bound) in [
                ("PQ = QP = |X|I", r.pq, t.pq),
                ("first column and valency row", r.first_column, t.first_column),
                ("common left eigenvectors", r.common_eigenvectors, t.common_eigenvectors),
                ("Krein symmetry", r.krein_symmetry, t.krein_symmetry),
                ("q^h_i0 = δ_hi", r.krein_unit, t.krein_unit),
                ("m_h q^h_ij = m_j q^j_ih", r.krein_balance, t.krein_balance),
            ] {
                let _ = writeln!(out, "  {name}: {}", Bound { residual: res, tolerance: bound }.text());
            }
            let _ = writeln!(out, "  smallest Krein parameter {} (lower bound {})", sig(r.krein_min), sig(t.krein_min));
            let _ = writeln!(out, "seed {} ({} attempt(s))", ctx.seed, ed.attempts);
            emit(ctx, seed, Some(result), Status::Pass, "eigendata verified".into(), out)
        }
        SchemeAction::QPoly => match detect_q_polynomial(&ed, tol) {
            Ok(found) => {
                let status = if found.is_empty() { Status::False } else { Status::True };
                let summary = format!("{} Q-polynomial structure(s)", found.len());
                let text = structures_text("Q", &found);
                let zero_tolerance = tol.zero_tol.max(tol.residual_tol * ed.krein_scale());
                let result = StructuresResult { kind: "Q", structures: found, zero_tolerance };
                emit(ctx, seed, Some(result), status, summary, text)
            }
            Err(e) => scheme_error(ctx, e),
        },
        SchemeAction::KnP { b, c } => match kn_p_check(&scheme, &ed, *b, *c, tol) {
            Ok(r) => {
                let (status, summary) = kn_verdict(&r);
                let text = kn_text(&r);
                emit(ctx, seed, Some(r), status, summary, text)
            }
            Err(e) => scheme_error(ctx, e),
        },
        SchemeAction::KnQ { e, f } => match kn_q_check(&ed, *e, *f, tol) {
            Ok(r) => {
                let (status, summary) = kn_verdict(&r);
                let text = kn_text(&r);
                emit(ctx, seed, Some(r), status, summary, text)
            }
            Err(err) => scheme_error(ctx, err),
        },
        SchemeAction::PPoly => unreachable!("handled before eigendata"),
    }
}

pub fn selftest(ctx: &Context, d_max: usize, trials: usize, force_bug: bool) -> u8 {
    if trials == 0 {
        return error(ctx, Status::InputError, "--trials must be at least 1".into());
    }
    let config = SelftestConfig { d_max, trials, seed: ctx.seed, tolerance: ctx.tol, force_bug };
    let report: SelftestReport = run_selftest(&config);
    let mut out = String::new();
    let _ = writeln!(out, "selftest: d_max {d_max}, trials {trials}, seed {}", ctx.seed);
    for s in &report.suites {
        let _ = writeln!(out, "{}: {} instances, {} checks, {} failures", s.name, s.instances, s.checks, s.failures);
        for w in &s.worst {
            let _ = writeln!(
                out,
                "  worst {}: {}",
                w.identity,
                Bound { residual: w.residual, tolerance: w.tolerance }.text()
            );
        }
        for (name, count) in &s.counts {
            let _ = writeln!(out, "  {name}: {count}");
        }
        if let Some(f) = &s.first_failure {
            let _ = writeln!(out, "  first failure: {f}");
        }
    }
    let failures: usize = report.suites.iter().map(|s| s.failures).sum();
    let (status, summary) = if report.passed() {
        (Status::Pass, "all suites passed".to_string())
    } else {
        (Status::Fail, format!("{failures} failed check(s)"))
    };
    emit(ctx, Some(ctx.seed), Some(report), status, summary, out)
}
