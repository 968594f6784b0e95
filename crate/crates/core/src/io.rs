//! Plain-text matrix format.
//!
//! ```text
//! # comment lines start with '#'
//! 3
//! 0 1 0
//! 1 0 1
//! 0 1 0
//! ```

use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line number in the input (0 when the input ended early).
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

/// Non-comment, non-blank lines paired with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_matrix(text: &str) -> Result<Matrix, ParseError> {
    let mut lines = content_lines(text);
    let (first_no, first) = lines.next().ok_or_else(|| ParseError::new(0, "empty input"))?;
    let n: usize =
        first.parse().map_err(|_| ParseError::new(first_no, format!("expected matrix order, found {first:?}")))?;
    if n == 0 {
        return Err(ParseError::new(first_no, "matrix order must be positive"));
    }
    let mut rows = Vec::with_capacity(n);
    let mut last_line = first_no;
    for r in 0..n {
        let (no, line) =
            lines.next().ok_or_else(|| ParseError::new(last_line + 1, format!("expected {n} rows, found {r}")))?;
        last_line = no;
        let row = line
            .split_whitespace()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(ParseError::new(no, format!("invalid number {tok:?}"))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if row.len() != n {
            return Err(ParseError::new(no, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if let Some((no, _)) = lines.next() {
        return Err(ParseError::new(no, "trailing content after matrix"));
    }
    Ok(Matrix::from_rows(&rows).expect("rows validated during parsing"))
}

/// Writes the matrix with round-trip precision.
pub fn format_matrix(m: &Matrix) -> String {
    let mut out = format!("{}\n", m.order());
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
