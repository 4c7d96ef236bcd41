use rand::seq::SliceRandom;
use rand::Rng;

use super::construct::certify;
use super::verify::{rotation_problem, verify, VerifyConfig, VerifyMode};
use super::zerosum::{ZsOutcome, ZsSolver};
use super::{max_shift, CertifiedMatrix, CodeMatrix, Provenance};
use crate::error::{invalid, Error, Result};
use crate::model::{derive_rng, Family, SimRng};

/// Knobs for [`search_base`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of candidate columns tried.
    pub budget: u64,
    pub seed: u64,
    /// Candidates drawn per depth when the column space is too big to list.
    pub candidates_per_level: usize,
    /// Work budget for each partial-matrix check.
    pub check_budget: u64,
    /// Verification of the final hit.
    pub verify: VerifyConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 200_000,
            seed: 0,
            candidates_per_level: 512,
            check_budget: 50_000_000,
            verify: VerifyConfig::default(),
        }
    }
}

/// Why a search came back empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotFound {
    /// The requested shape cannot exist.
    Impossible(String),
    /// The candidate budget ran out; this proves nothing.
    BudgetExhausted { tried: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(CertifiedMatrix),
    NotFound(NotFound),
}

impl SearchOutcome {
    pub fn found(self) -> Option<CertifiedMatrix> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

/// Shapes that are known not to exist.
pub fn impossibility(family: Family, m: usize, n: usize, s: usize) -> Option<String> {
    if family == Family::D && n >= m && max_shift(m, s) == m - 1 {
        return Some(format!(
            "no D({m},{n},{s}) exists: with every cyclic shift allowed, {n} ≥ {m} columns always reach the zero or all-one word"
        ));
    }
    None
}

/// Randomized backtracking over columns.  Each new column is accepted only
/// if no zero sum uses it together with the columns already chosen, so the
/// finished matrix satisfies the family property by construction; it is
/// still verified exhaustively before being returned.
pub fn search_base(family: Family, m: usize, n: usize, s: usize, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if m == 0 || n == 0 {
        return invalid("search needs m ≥ 1 and n ≥ 1");
    }
    if m > 62 {
        return invalid("search supports at most 62 rows");
    }
    if let Some(reason) = impossibility(family, m, n, s) {
        return Ok(SearchOutcome::NotFound(NotFound::Impossible(reason)));
    }
    let mut rng = derive_rng(cfg.seed, 0x5ea2c4);
    let mut tried = 0u64;
    let mut chosen: Vec<Vec<i8>> = Vec::with_capacity(n);
    let mut levels: Vec<Vec<Vec<i8>>> = vec![candidates(family, m, cfg.candidates_per_level, &mut rng)];
    while tried < cfg.budget {
        let Some(level) = levels.last_mut() else { unreachable!() };
        let Some(cand) = level.pop() else {
            if chosen.pop().is_none() {
                // Root exhausted: start over with fresh candidates.
                levels[0] = candidates(family, m, cfg.candidates_per_level, &mut rng);
            } else {
                levels.pop();
            }
            continue;
        };
        tried += 1;
        chosen.push(cand);
        if extends(&chosen, family, m, s, cfg)? {
            if chosen.len() == n {
                let matrix = CodeMatrix::from_cols(m, &chosen)?;
                let exhaustive = verify(&matrix, family, s, VerifyMode::Exhaustive, &cfg.verify)?;
                if !exhaustive.holds {
                    return Err(Error::Numerical("search accepted a matrix that fails verification".into()));
                }
                let mut found = certify(matrix, family, s, Provenance::Search, &cfg.verify)?;
                found.cert.seed = cfg.seed;
                return Ok(SearchOutcome::Found(found));
            }
            levels.push(candidates(family, m, cfg.candidates_per_level, &mut rng));
        } else {
            chosen.pop();
        }
    }
    Ok(SearchOutcome::NotFound(NotFound::BudgetExhausted { tried }))
}

/// Whether the last column of `cols` keeps the property.
fn extends(cols: &[Vec<i8>], family: Family, m: usize, s: usize, cfg: &SearchConfig) -> Result<bool> {
    let mat = CodeMatrix::from_cols(m, cols)?;
    let vcfg = VerifyConfig { budget: cfg.check_budget, ..cfg.verify };
    if family == Family::D {
        return match verify(&mat, family, s, VerifyMode::Exhaustive, &vcfg) {
            Ok(v) => Ok(v.holds),
            Err(Error::Budget { .. }) => Ok(false),
            Err(e) => Err(e),
        };
    }
    let p = rotation_problem(&mat, s, family == Family::B, Some(cols.len() - 1));
    match ZsSolver::new(cfg.check_budget).solve(&p) {
        Ok(ZsOutcome::NoZeroSum) => Ok(true),
        Ok(ZsOutcome::Found(_)) | Err(Error::Budget { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Candidate columns for one depth, most balanced last (they are popped first).
fn candidates(family: Family, m: usize, limit: usize, rng: &mut SimRng) -> Vec<Vec<i8>> {
    let signed = matches!(family, Family::A | Family::B);
    // ±1 columns are normalized to start with +1: negating a column keeps the property.
    let free_bits = if signed { m - 1 } else { m };
    let decode = |bits: u64| -> Vec<i8> {
        (0..m)
            .map(|r| {
                let on = if signed { r == 0 || bits >> (r - 1) & 1 == 1 } else { bits >> r & 1 == 1 };
                match (signed, on) {
                    (true, true) => 1,
                    (true, false) => -1,
                    (false, true) => 1,
                    (false, false) => 0,
                }
            })
            .collect()
    };
    let mut out: Vec<Vec<i8>> = if free_bits < 63 && (1u64 << free_bits) <= limit as u64 {
        let start = u64::from(!signed);
        (start..1u64 << free_bits).map(decode).collect()
    } else {
        (0..limit).map(|_| decode(rng.random::<u64>())).filter(|c| c.iter().any(|&x| x != 0)).collect()
    };
    out.shuffle(rng);
    let imbalance = |c: &Vec<i8>| -> i64 {
        let sum: i64 = c.iter().map(|&x| i64::from(x)).sum();
        if signed {
            -sum.abs()
        } else {
            -(2 * sum - m as i64).abs()
        }
    };
    out.sort_by_key(imbalance);
    out
}
