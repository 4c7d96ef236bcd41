//! Matrix codes whose rotations stay injective, and the machinery to build,
//! search for and certify them.
//!
//! A column is rotated *upward*: shifting `(a, b, c)` by one gives
//! `(b, c, a)`.  The signed variant negates every entry that wrapped
//! around to the bottom.

mod construct;
mod io;
mod search;
mod table;
mod verify;
pub mod zerosum;

use std::fmt;

pub use construct::{
    a_tilde_layout, build_a_compose, build_a_compose_with, build_a_tilde_compose, build_d_double, certify,
    construct_full_delay, keep_columns, tile_signatures, FullDelayCode,
};
pub use io::{read_matrix, write_matrix, MatrixFile};
pub use search::{impossibility, search_base, NotFound, SearchConfig, SearchOutcome};
pub use table::{
    build_code_for, build_optical_code_for, chain_a, chain_a_tilde, chain_d, recipe_table_i, BuiltCode,
    CodeLibrary, Layout, Step, TableRow, HALF_STEPS, QUARTER_STEPS, SYNCHRONOUS_BETA,
};
pub use verify::{is_counterexample, verify, Counterexample, Verdict, VerifyConfig, VerifyMode, MAX_EXHAUSTIVE_D_ROWS};

use crate::error::{invalid, Error, Result};
use crate::model::{Certificate, Family, SignatureAlphabet, SignatureMatrix};

/// Where a certified matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Search,
    Theorem12,
    Theorem13,
    Theorem14,
    Literal,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Search => "SEARCH",
            Provenance::Theorem12 => "THEOREM_12",
            Provenance::Theorem13 => "THEOREM_13",
            Provenance::Theorem14 => "THEOREM_14",
            Provenance::Literal => "LITERAL",
        })
    }
}

/// Dense small-integer matrix, column-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeMatrix {
    m: usize,
    n: usize,
    data: Vec<i8>,
}

impl CodeMatrix {
    pub fn from_cols(m: usize, cols: &[Vec<i8>]) -> Result<Self> {
        if m == 0 || cols.is_empty() || cols.iter().any(|c| c.len() != m) {
            return Err(Error::Dimension(format!("columns must all have length {m}")));
        }
        Ok(Self { m, n: cols.len(), data: cols.concat() })
    }

    /// Build from row slices, convenient for literals in tests and examples.
    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if m == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows must be nonempty and equally long".into()));
        }
        let mut data = vec![0; m * n];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                data[c * m + r] = v;
            }
        }
        Ok(Self { m, n, data })
    }

    pub fn filled(m: usize, n: usize, v: i8) -> Self {
        Self { m, n, data: vec![v; m * n] }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn col(&self, i: usize) -> &[i8] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.data[c * self.m + r]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[i8]> {
        self.data.chunks(self.m)
    }

    /// `[self other]`.
    pub fn hstack(&self, other: &CodeMatrix) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::Dimension(format!("row counts differ: {} vs {}", self.m, other.m)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { m: self.m, n: self.n + other.n, data })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &CodeMatrix) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("column counts differ: {} vs {}", self.n, other.n)));
        }
        let m = self.m + other.m;
        let mut data = Vec::with_capacity(m * self.n);
        for c in 0..self.n {
            data.extend_from_slice(self.col(c));
            data.extend_from_slice(other.col(c));
        }
        Ok(Self { m, n: self.n, data })
    }

    pub fn map(&self, f: impl Fn(i8) -> i8) -> Self {
        Self { m: self.m, n: self.n, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &CodeMatrix, f: impl Fn(i8, i8) -> i8) -> Result<Self> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        Ok(Self {
            m: self.m,
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() || cols.iter().any(|&c| c >= self.n) {
            return invalid("column selection out of range");
        }
        Ok(Self {
            m: self.m,
            n: cols.len(),
            data: cols.iter().flat_map(|&c| self.col(c).iter().copied()).collect(),
        })
    }

    pub fn all_in(&self, allowed: &[i8]) -> bool {
        self.data.iter().all(|v| allowed.contains(v))
    }

    /// Wrap as a signature matrix over the given alphabet.
    pub fn to_signature(&self, alphabet: SignatureAlphabet) -> Result<SignatureMatrix> {
        SignatureMatrix::from_chips(self.m, self.n, alphabet, &self.data)
    }
}

impl fmt::Display for CodeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.m {
            let row: Vec<String> = (0..self.n).map(|c| format!("{:+}", self.get(r, c))).collect();
            let row: Vec<String> = row.into_iter().map(|s| if s == "+0" { " 0".into() } else { s }).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Per-column shifts together with the budget they must respect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpec {
    pub shifts: Vec<usize>,
    pub budget: usize,
    pub signed: bool,
}

impl ShiftSpec {
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.shifts.len() != n {
            return Err(Error::Dimension(format!("{} shifts for {n} columns", self.shifts.len())));
        }
        let hi = max_shift(m, self.budget);
        if let Some(&t) = self.shifts.iter().find(|&&t| t > hi) {
            return invalid(format!("shift {t} exceeds the budget (largest allowed {hi})"));
        }
        Ok(())
    }
}

/// Largest shift permitted by budget `s` on length-`m` columns; a budget of
/// `m` or more means the full cycle `[0, m−1]`.
pub fn max_shift(m: usize, s: usize) -> usize {
    s.min(m - 1)
}

/// Rotate `col` upward by `t` into `out`; with `signed`, wrapped entries flip sign.
pub fn rotate_into(col: &[i8], t: usize, signed: bool, out: &mut [i8]) {
    let m = col.len();
    let t = t % m;
    for r in 0..m {
        let src = r + t;
        out[r] = if src < m {
            col[src]
        } else if signed {
            -col[src - m]
        } else {
            col[src - m]
        };
    }
}

pub fn rotate(col: &[i8], t: usize, signed: bool) -> Vec<i8> {
    let mut out = vec![0; col.len()];
    rotate_into(col, t, signed, &mut out);
    out
}

/// Apply a per-column rotation to a whole matrix.
pub fn apply_rotation(mat: &CodeMatrix, spec: &ShiftSpec) -> Result<CodeMatrix> {
    spec.validate(mat.rows(), mat.cols())?;
    let cols: Vec<Vec<i8>> = mat
        .columns()
        .zip(&spec.shifts)
        .map(|(c, &t)| rotate(c, t, spec.signed))
        .collect();
    CodeMatrix::from_cols(mat.rows(), &cols)
}

/// A matrix together with the family and budget it is certified for.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedMatrix {
    pub matrix: CodeMatrix,
    pub family: Family,
    pub s: usize,
    pub cert: Certificate,
    pub provenance: Provenance,
}

impl CertifiedMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Whether every shift allowed by `s` is covered by the certificate.
    pub fn covers(&self, s: usize) -> bool {
        max_shift(self.rows(), s) <= max_shift(self.rows(), self.s)
    }

    /// `(family, m, n, s)` label such as `A(16,20,16)`.
    pub fn label(&self) -> String {
        let fam = match self.family {
            Family::ATilde => "Ã".to_string(),
            f => f.to_string(),
        };
        format!("{fam}({},{},{})", self.rows(), self.cols(), self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_examples() {
        assert_eq!(rotate(&[1, 2, 3], 2, false), vec![3, 1, 2]);
        assert_eq!(rotate(&[1, 2, 3], 2, true), vec![3, -1, -2]);
        assert_eq!(rotate(&[1, 2, 3], 0, true), vec![1, 2, 3]);
    }

    #[test]
    fn stacking() {
        let a = CodeMatrix::from_rows(&[&[1, -1], &[1, 1]]).unwrap();
        let v = a.vstack(&a).unwrap();
        assert_eq!(v.col(1), &[-1, 1, -1, 1]);
        let h = a.hstack(&a).unwrap();
        assert_eq!(h.cols(), 4);
    }
}
