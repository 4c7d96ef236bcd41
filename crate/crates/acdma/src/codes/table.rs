use std::collections::HashMap;

use super::construct::{
    build_a_compose, build_a_tilde_compose, build_d_double, certify, construct_full_delay, keep_columns,
    tile_signatures,
};
use super::search::{search_base, NotFound, SearchConfig, SearchOutcome};
use super::verify::VerifyConfig;
use super::{CertifiedMatrix, CodeMatrix, Provenance};
use crate::error::{invalid, Error, Result};
use crate::model::{Certificate, Family, SignatureMatrix};

/// Seeds tried in turn when searching for a base matrix.
const SEARCH_ATTEMPTS: u64 = 8;

/// Base matrices and chain outputs, built on demand and cached.
#[derive(Debug, Clone)]
pub struct CodeLibrary {
    pub search: SearchConfig,
    pub verify: VerifyConfig,
    cache: HashMap<(Family, usize, usize, usize), CertifiedMatrix>,
    stages: HashMap<(Family, usize), CertifiedMatrix>,
}

impl Default for CodeLibrary {
    fn default() -> Self {
        Self::new(SearchConfig::default(), VerifyConfig::default())
    }
}

impl CodeLibrary {
    pub fn new(search: SearchConfig, verify: VerifyConfig) -> Self {
        Self { search, verify, cache: HashMap::new(), stages: HashMap::new() }
    }

    fn literal(family: Family, m: usize, n: usize, s: usize) -> Option<CodeMatrix> {
        let rows: &[&[i8]] = match (family, m, n, s) {
            (Family::A, 2, 2, 2) => &[&[1, 1], &[1, -1]],
            (Family::ATilde, 2, 2, 2) => &[&[1, 1], &[0, 1]],
            (Family::D, 2, 1, 2) => &[&[1], &[0]],
            (Family::D, 3, 1, 3) => &[&[1], &[0], &[0]],
            _ => return None,
        };
        CodeMatrix::from_rows(rows).ok()
    }

    /// A base matrix of the given shape: a stored literal when one is known,
    /// otherwise the result of a seeded search.  Always exhaustively verified.
    pub fn base(&mut self, family: Family, m: usize, n: usize, s: usize) -> Result<CertifiedMatrix> {
        let key = (family, m, n, s);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let strict = VerifyConfig { budget: u64::MAX, ..self.verify };
        let found = if let Some(lit) = Self::literal(family, m, n, s) {
            certify(lit, family, s, Provenance::Literal, &strict)?
        } else {
            self.searched(family, m, n, s)?
        };
        if found.cert.method != crate::model::Method::Exhaustive {
            return Err(Error::Precondition(format!("base {} could not be verified exhaustively", found.label())));
        }
        self.cache.insert(key, found.clone());
        Ok(found)
    }

    fn searched(&self, family: Family, m: usize, n: usize, s: usize) -> Result<CertifiedMatrix> {
        let mut last = None;
        for attempt in 0..SEARCH_ATTEMPTS {
            let cfg = SearchConfig { seed: self.search.seed + attempt, ..self.search };
            match search_base(family, m, n, s, &cfg)? {
                SearchOutcome::Found(c) => return Ok(c),
                SearchOutcome::NotFound(NotFound::Impossible(why)) => return Err(Error::Precondition(why)),
                SearchOutcome::NotFound(nf) => last = Some(nf),
            }
        }
        Err(Error::Budget {
            work: self.search.budget * SEARCH_ATTEMPTS,
            context: format!("search for {family}({m},{n},{s}) found nothing ({last:?})"),
        })
    }

    fn certified(&self, w: CertifiedMatrix) -> Result<CertifiedMatrix> {
        let (family, s, prov) = (w.family, w.s, w.provenance);
        certify(w.matrix, family, s, prov, &self.verify)
    }

    /// The A chain at window `p`, for `p` of the form `2^j` or `3·2^j` up to 48.
    pub fn a_matrix(&mut self, p: usize) -> Result<CertifiedMatrix> {
        if let Some(hit) = self.stages.get(&(Family::A, p)) {
            return Ok(hit.clone());
        }
        let stages = match p {
            2 => return self.base(Family::A, 2, 2, 2),
            3 => return self.base(Family::A, 3, 2, 3),
            4 | 8 | 16 | 32 => chain_a(self, HALF_STEPS)?,
            6 | 12 | 24 | 48 => chain_a(self, QUARTER_STEPS)?,
            _ => return invalid(format!("no canned A construction with {p} rows")),
        };
        self.remember(stages, p)
    }

    /// The Ã chain at window `p ∈ {2, 4, 8, 16, 32}`.
    pub fn a_tilde_matrix(&mut self, p: usize) -> Result<CertifiedMatrix> {
        if let Some(hit) = self.stages.get(&(Family::ATilde, p)) {
            return Ok(hit.clone());
        }
        if p == 2 {
            return self.base(Family::ATilde, 2, 2, 2);
        }
        if !matches!(p, 4 | 8 | 16 | 32) {
            return invalid(format!("no canned Ã construction with {p} rows"));
        }
        let stages = chain_a_tilde(self, HALF_STEPS)?;
        self.remember(stages, p)
    }

    fn remember(&mut self, stages: Vec<CertifiedMatrix>, p: usize) -> Result<CertifiedMatrix> {
        let mut wanted = None;
        for w in stages {
            if w.rows() == p {
                wanted = Some(w.clone());
            }
            self.stages.insert((w.family, w.rows()), w);
        }
        wanted.ok_or_else(|| Error::InvalidParameter(format!("no canned construction with {p} rows")))
    }
}

/// One doubling step: the B block `(rows, cols, budget)` it consumes.
pub type Step = (usize, usize, usize);

/// A(2,2,2) → A(4,4,4) → A(8,9,8) → A(16,20,16) → A(32,41,32).
pub const HALF_STEPS: &[Step] = &[(2, 1, 2), (4, 2, 4), (8, 4, 8), (16, 6, 16)];
/// A(3,2,3) → A(6,5,6) → A(12,12,12) → A(24,24,24) → A(48,48,16).
pub const QUARTER_STEPS: &[Step] = &[(3, 2, 3), (6, 4, 6), (12, 5, 12), (24, 9, 16)];

/// Repeated doubling of the D base `D(m,1,m)`: `D(m,1,m), D(2m,3,2m), …`, `steps` doublings.
pub fn chain_d(lib: &mut CodeLibrary, m: usize, steps: usize) -> Result<Vec<CertifiedMatrix>> {
    let mut out = vec![lib.base(Family::D, m, 1, m)?];
    for _ in 0..steps {
        let next = build_d_double(out.last().unwrap_or_else(|| unreachable!()))?;
        out.push(lib.certified(next)?);
    }
    Ok(out)
}

fn double_chain(
    lib: &mut CodeLibrary,
    steps: &[Step],
    start: CertifiedMatrix,
    compose: fn(&CertifiedMatrix, &CertifiedMatrix, &CertifiedMatrix) -> Result<CertifiedMatrix>,
) -> Result<Vec<CertifiedMatrix>> {
    let Some(&(m0, _, _)) = steps.first() else {
        return invalid("a chain needs at least one step");
    };
    let ds = chain_d(lib, m0, steps.len() - 1)?;
    let mut out = vec![start];
    for (&(m, k, s), d) in steps.iter().zip(&ds) {
        let cur = out.last().unwrap_or_else(|| unreachable!());
        if cur.rows() != m {
            return Err(Error::Dimension(format!("step expects {m} rows, chain is at {}", cur.label())));
        }
        let b = lib.base(Family::B, m, k, s)?;
        let next = compose(cur, &b, d)?;
        let label = format!("{}+{}+{}", cur.label(), b.label(), d.label());
        out.push(lib.certified(next).map_err(|e| Error::Precondition(format!("stage {label}: {e}")))?);
    }
    Ok(out)
}

/// The A chain starting from the base at the first step's size.
pub fn chain_a(lib: &mut CodeLibrary, steps: &[Step]) -> Result<Vec<CertifiedMatrix>> {
    let Some(&(m0, _, _)) = steps.first() else {
        return invalid("a chain needs at least one step");
    };
    let n0 = if m0 == 2 { 2 } else { m0 - 1 };
    let start = lib.base(Family::A, m0, n0, m0)?;
    double_chain(lib, steps, start, build_a_compose)
}

/// The Ã chain from `Ã(2,2,2)`.
pub fn chain_a_tilde(lib: &mut CodeLibrary, steps: &[Step]) -> Result<Vec<CertifiedMatrix>> {
    let Some(&(m0, _, _)) = steps.first() else {
        return invalid("a chain needs at least one step");
    };
    let start = lib.base(Family::ATilde, m0, 2, m0)?;
    double_chain(lib, steps, start, build_a_tilde_compose)
}

/// One row of the overloading table at 64 chips.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub lambda: f64,
    pub tau_max: usize,
    /// Users served; `None` for the stored literal.
    pub users: Option<usize>,
    pub beta: f64,
    /// The λ = 0 entry is a published value, not a construction.
    pub literal: bool,
    pub code: String,
    /// Certificate of the constructed matrix.
    pub cert: Option<Certificate>,
}

/// Published overloading factor for chip-synchronous codes at λ = 0.
pub const SYNCHRONOUS_BETA: f64 = 3.01;

/// Build every code in the overloading table for 64 chips.
pub fn recipe_table_i(lib: &mut CodeLibrary) -> Result<Vec<TableRow>> {
    let m = 64;
    let mut rows = vec![TableRow {
        lambda: 0.0,
        tau_max: 0,
        users: None,
        beta: SYNCHRONOUS_BETA,
        literal: true,
        code: "published chip-synchronous value".into(),
        cert: None,
    }];
    for lambda in [0.25, 0.5, 0.75, 1.0] {
        let tau = (lambda * m as f64).round() as usize;
        let built = build_code_for(lib, m, tau, None)?;
        let n = built.signatures.users();
        rows.push(TableRow {
            lambda,
            tau_max: tau,
            users: Some(n),
            beta: n as f64 / m as f64,
            literal: false,
            code: built.describe(),
            cert: Some(built.code.cert.clone()),
        });
    }
    Ok(rows)
}

/// How signatures relate to the code matrix behind them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Periodic with the given period; decoded on the interference-free window.
    Windowed { period: usize },
    /// `n + i` stacked copies of a `k`-row full-cycle code.
    FullDelay { k: usize, i: usize },
}

/// Signatures built for a given chip count and delay spread.
#[derive(Debug, Clone)]
pub struct BuiltCode {
    pub signatures: SignatureMatrix,
    pub code: CertifiedMatrix,
    pub layout: Layout,
}

impl BuiltCode {
    pub fn describe(&self) -> String {
        match self.layout {
            Layout::Windowed { .. } => format!("{} tiled", self.code.label()),
            Layout::FullDelay { k, i } => {
                format!("{} stacked {} times ({} chips)", self.code.label(), self.code.cols() + i, k * (self.code.cols() + i))
            }
        }
    }
}

/// Errorless signatures for `m` chips and delays up to `tau`, with as many
/// users as the canned constructions allow (or exactly `users`).
pub fn build_code_for(lib: &mut CodeLibrary, m: usize, tau: usize, users: Option<usize>) -> Result<BuiltCode> {
    build_code(lib, m, tau, users, Family::A)
}

/// As [`build_code_for`] with 0/1 (optical) signatures.
pub fn build_optical_code_for(lib: &mut CodeLibrary, m: usize, tau: usize, users: Option<usize>) -> Result<BuiltCode> {
    build_code(lib, m, tau, users, Family::ATilde)
}

fn trim(lib: &CodeLibrary, code: CertifiedMatrix, users: Option<usize>, cap: usize) -> Result<CertifiedMatrix> {
    let want = users.unwrap_or(cap);
    if want == 0 || want > cap {
        return invalid(format!("{} supports at most {cap} users here, {want} requested", code.label()));
    }
    if want == code.cols() {
        return Ok(code);
    }
    let cols: Vec<usize> = (0..want).collect();
    keep_columns(&code, &cols, &lib.verify)
}

fn build_code(lib: &mut CodeLibrary, m: usize, tau: usize, users: Option<usize>, family: Family) -> Result<BuiltCode> {
    if tau > m {
        return invalid(format!("delay spread {tau} exceeds the {m}-chip symbol"));
    }
    let pick = |lib: &mut CodeLibrary, p: usize| match family {
        Family::ATilde => lib.a_tilde_matrix(p),
        _ => lib.a_matrix(p),
    };
    if tau < m {
        let p = m - tau;
        let base = pick(lib, p)?;
        if !base.covers(tau) {
            return Err(Error::Precondition(format!("{} does not cover delays up to {tau}", base.label())));
        }
        let cap = base.cols();
        let code = trim(lib, base, users, cap)?;
        let signatures = tile_signatures(&code, m)?;
        return Ok(BuiltCode { signatures, code, layout: Layout::Windowed { period: p } });
    }
    // Delays spanning the whole symbol: stack n + i copies of a k-row code.
    let mut best: Option<(usize, usize)> = None;
    for k in [2, 4, 8, 16, 32] {
        if m % k != 0 || m / k < 2 {
            continue;
        }
        let Ok(base) = pick(lib, k) else { continue };
        let cap = base.cols().min(m / k - 1);
        let fits = users.is_none_or(|u| u <= cap);
        if fits && best.is_none_or(|(_, c)| cap > c) {
            best = Some((k, cap));
        }
    }
    let Some((k, cap)) = best else {
        return invalid(format!("no stacked construction for {m} chips with delays up to {m}"));
    };
    let base = pick(lib, k)?;
    let code = trim(lib, base, users, cap)?;
    let i = m / k - code.cols();
    let full = construct_full_delay(&code, i)?;
    Ok(BuiltCode { signatures: full.signatures, code, layout: Layout::FullDelay { k, i } })
}
