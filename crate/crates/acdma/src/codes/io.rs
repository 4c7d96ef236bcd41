//! Plain-text matrix files.
//!
//! ```text
//! # certificate family=A s=4 method=EXHAUSTIVE seed=0 trials=32
//! 4 4 binary
//! +1 +1 +1 +1
//! ...
//! ```
//!
//! Blank lines and other `#` comments are ignored.

use std::fmt::Write as _;

use super::CodeMatrix;
use crate::error::{Error, Result};
use crate::model::{Certificate, SignatureAlphabet};

/// Contents of a matrix file.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub matrix: CodeMatrix,
    pub alphabet: SignatureAlphabet,
    pub certificate: Option<Certificate>,
}

pub fn write_matrix(matrix: &CodeMatrix, alphabet: SignatureAlphabet, cert: Option<&Certificate>) -> String {
    let mut out = String::new();
    if let Some(c) = cert {
        let _ = writeln!(out, "# certificate {c}");
    }
    let _ = writeln!(out, "{} {} {alphabet}", matrix.rows(), matrix.cols());
    for r in 0..matrix.rows() {
        let row: Vec<String> = (0..matrix.cols())
            .map(|c| match matrix.get(r, c) {
                v if v > 0 => format!("+{v}"),
                v => v.to_string(),
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, message: message.into() })
}

pub fn read_matrix(text: &str) -> Result<MatrixFile> {
    let mut certificate = None;
    let mut header: Option<(usize, usize, SignatureAlphabet)> = None;
    let mut rows: Vec<Vec<i8>> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            if let Some(cert) = c.trim().strip_prefix("certificate") {
                certificate = Some(cert.trim().parse::<Certificate>().map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?);
            }
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        match header {
            None => {
                let [m, n, a] = toks[..] else {
                    return parse_err(line, "header must read `rows cols alphabet`");
                };
                let m = m.parse().map_err(|_| Error::Parse { line, message: format!("bad row count `{m}`") })?;
                let n = n.parse().map_err(|_| Error::Parse { line, message: format!("bad column count `{n}`") })?;
                let a = a.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
                header = Some((m, n, a));
            }
            Some((_, n, alphabet)) => {
                if toks.len() != n {
                    return parse_err(line, format!("expected {n} entries, found {}", toks.len()));
                }
                let row = toks
                    .iter()
                    .map(|s| {
                        s.trim_start_matches('+')
                            .parse::<i8>()
                            .map_err(|_| Error::Parse { line, message: format!("bad entry `{s}`") })
                    })
                    .collect::<Result<Vec<i8>>>()?;
                let lo = if alphabet == SignatureAlphabet::Optical { 0 } else { -1 };
                if let Some(v) = row.iter().find(|v| !(lo..=1).contains(*v)) {
                    return parse_err(line, format!("entry {v} is outside the {alphabet} alphabet"));
                }
                rows.push(row);
            }
        }
    }
    let Some((m, _, alphabet)) = header else {
        return parse_err(last_line.max(1), "missing `rows cols alphabet` header");
    };
    if rows.len() != m {
        return parse_err(last_line.max(1), format!("expected {m} rows, found {}", rows.len()));
    }
    let refs: Vec<&[i8]> = rows.iter().map(|r| r.as_slice()).collect();
    let matrix = CodeMatrix::from_rows(&refs)?;
    Ok(MatrixFile { matrix, alphabet, certificate })
}
