//! Line-oriented scheme files.
//!
//! ```text
//! # K_3
//! SCHEME X=3 D=1 FORM=RELATIONS
//! REL 0
//! 100
//! 010
//! 001
//! REL 1
//! 011
//! 101
//! 110
//! ```
//!
//! The `PTENSOR` form gives `K k_0 ... k_d`, then for each `h` a line `P h`
//! followed by `d+1` rows of `p^h_{ij}` (row index `i`).

use super::{AssociationScheme, BitMatrix, ValidatedScheme};
use crate::io::{content_lines, ParseError};

fn header_field<'a>(no: usize, tok: Option<&'a str>, key: &str) -> Result<&'a str, ParseError> {
    tok.and_then(|t| t.strip_prefix(key)?.strip_prefix('='))
        .ok_or_else(|| ParseError::new(no, format!("expected {key}=<value> in header")))
}

fn parse_count(no: usize, s: &str, what: &str) -> Result<usize, ParseError> {
    s.parse().map_err(|_| ParseError::new(no, format!("invalid {what} {s:?}")))
}

fn expect_tag(no: usize, line: &str, tag: &str, index: usize) -> Result<(), ParseError> {
    let mut toks = line.split_whitespace();
    let ok = toks.next() == Some(tag) && toks.next().and_then(|t| t.parse::<usize>().ok()) == Some(index);
    if !ok || toks.next().is_some() {
        return Err(ParseError::new(no, format!("expected \"{tag} {index}\", found {line:?}")));
    }
    Ok(())
}

pub fn parse_scheme(text: &str) -> Result<AssociationScheme, ParseError> {
    let mut lines = content_lines(text);
    let (hno, header) = lines.next().ok_or_else(|| ParseError::new(0, "empty input"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("SCHEME") {
        return Err(ParseError::new(hno, format!("expected SCHEME header, found {header:?}")));
    }
    let x_size = parse_count(hno, header_field(hno, toks.next(), "X")?, "point count")?;
    let d = parse_count(hno, header_field(hno, toks.next(), "D")?, "class count")?;
    let form = header_field(hno, toks.next(), "FORM")?;
    if let Some(extra) = toks.next() {
        return Err(ParseError::new(hno, format!("unexpected header field {extra:?}")));
    }
    if x_size == 0 {
        return Err(ParseError::new(hno, "X must be positive"));
    }
    if d >= u16::MAX as usize {
        return Err(ParseError::new(hno, "class count too large"));
    }
    let mut last = hno;
    let mut next = |what: &str| {
        let got = lines.next().ok_or_else(|| ParseError::new(last + 1, format!("input ended, expected {what}")));
        if let Ok((no, _)) = got {
            last = no;
        }
        got
    };

    let scheme = match form {
        "RELATIONS" => {
            let mut relations = Vec::with_capacity(d + 1);
            for i in 0..=d {
                let (no, line) = next("REL line")?;
                expect_tag(no, line, "REL", i)?;
                let mut r = BitMatrix::new(x_size);
                for x in 0..x_size {
                    let (no, row) = next("relation row")?;
                    if row.len() != x_size {
                        return Err(ParseError::new(no, format!("expected {x_size} characters, found {}", row.len())));
                    }
                    for (y, ch) in row.chars().enumerate() {
                        match ch {
                            '0' => {}
                            '1' => r.set(x, y, true),
                            other => return Err(ParseError::new(no, format!("invalid character {other:?}"))),
                        }
                    }
                }
                relations.push(r);
            }
            AssociationScheme::Relations { x_size, relations }
        }
        "PTENSOR" => {
            let int_row = |no: usize, toks: &[&str]| {
                toks.iter()
                    .map(|t| t.parse::<u64>().map_err(|_| ParseError::new(no, format!("invalid integer {t:?}"))))
                    .collect::<Result<Vec<u64>, _>>()
            };
            let (no, line) = next("K line")?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.first() != Some(&"K") || toks.len() != d + 2 {
                return Err(ParseError::new(no, format!("expected \"K\" followed by {} valencies", d + 1)));
            }
            let k = int_row(no, &toks[1..])?;
            let mut p = Vec::with_capacity(d + 1);
            for h in 0..=d {
                let (no, line) = next("P line")?;
                expect_tag(no, line, "P", h)?;
                let mut block = Vec::with_capacity(d + 1);
                for _ in 0..=d {
                    let (no, line) = next("intersection row")?;
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    if toks.len() != d + 1 {
                        return Err(ParseError::new(no, format!("expected {} entries, found {}", d + 1, toks.len())));
                    }
                    block.push(int_row(no, &toks)?);
                }
                p.push(block);
            }
            AssociationScheme::PTensor { x_size, k, p }
        }
        other => return Err(ParseError::new(hno, format!("unknown FORM {other:?}"))),
    };
    if let Some((no, _)) = lines.next() {
        return Err(ParseError::new(no, "trailing content after scheme"));
    }
    Ok(scheme)
}

pub fn format_scheme(scheme: &AssociationScheme) -> String {
    let mut out = String::new();
    match scheme {
        AssociationScheme::Relations { x_size, relations } => {
            out.push_str(&format!("SCHEME X={x_size} D={} FORM=RELATIONS\n", relations.len() - 1));
            for (i, r) in relations.iter().enumerate() {
                out.push_str(&format!("REL {i}\n"));
                for x in 0..*x_size {
                    out.extend((0..*x_size).map(|y| if r.get(x, y) { '1' } else { '0' }));
                    out.push('\n');
                }
            }
        }
        AssociationScheme::PTensor { x_size, k, p } => {
            out.push_str(&format!("SCHEME X={x_size} D={} FORM=PTENSOR\n", k.len() - 1));
            let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            out.push_str(&format!("K {}\n", join(k)));
            for (h, block) in p.iter().enumerate() {
                out.push_str(&format!("P {h}\n"));
                for row in block {
                    out.push_str(&join(row));
                    out.push('\n');
                }
            }
        }
    }
    out
}

/// The intersection-number form of a validated scheme.
pub fn to_ptensor(scheme: &ValidatedScheme) -> AssociationScheme {
    let n = scheme.d() + 1;
    AssociationScheme::PTensor {
        x_size: scheme.x_size(),
        k: scheme.valencies().to_vec(),
        p: (0..n).map(|h| (0..n).map(|i| (0..n).map(|j| scheme.p(h, i, j)).collect()).collect()).collect(),
    }
}
