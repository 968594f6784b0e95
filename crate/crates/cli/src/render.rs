//! Text rendering for human-readable reports.

use spectralpath::Matrix;

/// Six significant digits, trailing zeros trimmed.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let s = if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mant, exp) = s.split_once('e').expect("scientific format");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{exp}")
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn vector(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|&x| sig(x)).collect();
    format!("({})", cells.join(", "))
}

pub fn ints(v: &[usize]) -> String {
    let cells: Vec<String> = v.iter().map(usize::to_string).collect();
    cells.join(" ")
}

/// Right-aligned columns, one matrix row per line, each line indented.
pub fn matrix(m: &Matrix, indent: &str) -> String {
    let cells: Vec<Vec<String>> = m.rows().map(|r| r.iter().map(|&x| sig(x)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        out.push_str(indent);
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&padded.join("  "));
        out.push('\n');
    }
    out
}
