use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::model::{SignatureAlphabet, SignatureMatrix};

/// Classical low-correlation signature families used for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    PseudoGold,
    Gold,
    Ooc,
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::PseudoGold => "pseudo-gold",
            BaselineKind::Gold => "gold",
            BaselineKind::Ooc => "ooc",
        })
    }
}

impl FromStr for BaselineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "pseudo-gold" | "pseudogold" => Ok(BaselineKind::PseudoGold),
            "gold" => Ok(BaselineKind::Gold),
            "ooc" => Ok(BaselineKind::Ooc),
            _ => invalid(format!("unknown baseline `{s}`")),
        }
    }
}

/// A baseline signature set and the correlation bound it meets.
#[derive(Debug, Clone)]
pub struct BaselineSet {
    pub kind: BaselineKind,
    pub signatures: SignatureMatrix,
    /// Largest periodic off-peak auto- or cross-correlation magnitude.
    pub max_correlation: i64,
}

fn periodic(a: &[i8], b: &[i8], shift: usize) -> i64 {
    let m = a.len();
    (0..m).map(|r| i64::from(a[r]) * i64::from(b[(r + shift) % m])).sum()
}

/// `(max off-peak autocorrelation, max cross-correlation)` over all cyclic shifts.
pub fn max_periodic_correlation(cols: &[Vec<i8>]) -> (i64, i64) {
    let m = cols.first().map_or(0, Vec::len);
    let mut auto = 0;
    let mut cross = 0;
    for (i, a) in cols.iter().enumerate() {
        for t in 1..m {
            auto = auto.max(periodic(a, a, t).abs());
        }
        for b in &cols[i + 1..] {
            for t in 0..m {
                cross = cross.max(periodic(a, b, t).abs());
            }
        }
    }
    (auto, cross)
}

fn to_matrix(m: usize, cols: &[Vec<i8>], alphabet: SignatureAlphabet) -> Result<SignatureMatrix> {
    SignatureMatrix::from_chips(m, cols.len(), alphabet, &cols.concat())
}

/// ±1 sequences whose periodic auto- and cross-correlations stay within the
/// smallest threshold (same parity as `m`) for which `n` of them exist.
pub fn pseudo_gold_signatures(m: usize, n: usize) -> Result<BaselineSet> {
    if m == 0 || n == 0 || m > 20 {
        return invalid("pseudo-Gold search supports 1 ≤ m ≤ 20 chips");
    }
    // First chip fixed to +1: negation does not change correlation magnitudes.
    let pool: Vec<Vec<i8>> = (0..1u32 << (m - 1))
        .map(|bits| (0..m).map(|r| if r == 0 || bits >> (r - 1) & 1 == 0 { 1 } else { -1 }).collect())
        .collect();
    let mut thr = (m % 2) as i64;
    while thr <= m as i64 {
        let usable: Vec<&Vec<i8>> =
            pool.iter().filter(|c| (1..m).all(|t| periodic(c, c, t).abs() <= thr)).collect();
        let mut chosen: Vec<usize> = Vec::new();
        if pick(&usable, n, thr, 0, &mut chosen) {
            let cols: Vec<Vec<i8>> = chosen.iter().map(|&i| usable[i].clone()).collect();
            let (a, c) = max_periodic_correlation(&cols);
            return Ok(BaselineSet {
                kind: BaselineKind::PseudoGold,
                signatures: to_matrix(m, &cols, SignatureAlphabet::Binary)?,
                max_correlation: a.max(c),
            });
        }
        thr += 2;
    }
    invalid(format!("no {n} distinct sequences of {m} chips"))
}

fn pick(pool: &[&Vec<i8>], n: usize, thr: i64, from: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == n {
        return true;
    }
    let m = pool.first().map_or(0, |c| c.len());
    for i in from..pool.len() {
        let ok = chosen
            .iter()
            .all(|&j| (0..m).all(|t| periodic(pool[i], pool[j], t).abs() <= thr));
        if ok {
            chosen.push(i);
            if pick(pool, n, thr, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Feedback taps (exponents below the degree) of preferred m-sequence pairs.
fn preferred_pair(r: u32) -> Option<(&'static [u32], &'static [u32])> {
    match r {
        3 => Some((&[1, 0], &[2, 0])),
        5 => Some((&[2, 0], &[4, 3, 2, 0])),
        7 => Some((&[3, 0], &[3, 2, 1, 0])),
        _ => None,
    }
}

/// m-sequence of the recurrence `a_{k+r} = Σ_{e ∈ taps} a_{k+e}` from state `0…01`.
fn m_sequence(r: u32, taps: &[u32]) -> Vec<u8> {
    let len = (1usize << r) - 1;
    let mut a: Vec<u8> = vec![0; r as usize];
    a[r as usize - 1] = 1;
    while a.len() < len {
        let k = a.len() - r as usize;
        let next = taps.iter().fold(0, |acc, &e| acc ^ a[k + e as usize]);
        a.push(next);
    }
    a
}

/// The full Gold family of length `2^r − 1`: both m-sequences of a preferred
/// pair followed by `u ⊕ Tᵏv` for every shift `k`, as ±1 chips.
pub fn gold_sequences(r: u32) -> Result<Vec<Vec<i8>>> {
    let Some((tu, tv)) = preferred_pair(r) else {
        return invalid(format!("no preferred pair stored for degree {r} (supported: 3, 5, 7)"));
    };
    let u = m_sequence(r, tu);
    let v = m_sequence(r, tv);
    let len = u.len();
    let bip = |bits: &[u8]| -> Vec<i8> { bits.iter().map(|&b| 1 - 2 * b as i8).collect() };
    let mut out = vec![bip(&u), bip(&v)];
    for k in 0..len {
        let w: Vec<u8> = (0..len).map(|i| u[i] ^ v[(i + k) % len]).collect();
        out.push(bip(&w));
    }
    Ok(out)
}

/// Weight-`w` 0/1 code words of length `m` whose periodic auto- and
/// cross-correlations are at most one, chosen greedily in lexicographic order.
pub fn ooc_signatures(m: usize, n: usize, w: usize) -> Result<BaselineSet> {
    if w < 2 || w > m || n == 0 {
        return invalid("OOC needs 2 ≤ w ≤ m and n ≥ 1");
    }
    // Each word is {0} ∪ rest; its internal differences must be new.
    let mut used = vec![false; m];
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut rest: Vec<usize> = (1..w).collect();
    loop {
        let mut word = vec![0];
        word.extend(&rest);
        let mut diffs = Vec::new();
        for &a in &word {
            for &b in &word {
                if a != b {
                    diffs.push((a + m - b) % m);
                }
            }
        }
        let mut sorted = diffs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == diffs.len() && diffs.iter().all(|&d| !used[d]) {
            for &d in &diffs {
                used[d] = true;
            }
            words.push(word);
            if words.len() == n {
                break;
            }
        }
        if !next_subset(&mut rest, m) {
            return invalid(format!("only {} weight-{w} code words fit in {m} chips, {n} requested", words.len()));
        }
    }
    let cols: Vec<Vec<i8>> = words
        .iter()
        .map(|wd| (0..m).map(|r| i8::from(wd.contains(&r))).collect())
        .collect();
    let (a, c) = max_periodic_correlation(&cols);
    Ok(BaselineSet {
        kind: BaselineKind::Ooc,
        signatures: to_matrix(m, &cols, SignatureAlphabet::Optical)?,
        max_correlation: a.max(c),
    })
}

/// Advance a strictly increasing subset of `1..m` in lexicographic order.
fn next_subset(s: &mut [usize], m: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < m - (k - i) {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Baseline signatures by family: pseudo-Gold search, the first `n` Gold
/// sequences for `m = 2^r − 1`, or a weight-2 optical orthogonal code.
pub fn gold_like_signatures(m: usize, n: usize, kind: BaselineKind) -> Result<BaselineSet> {
    match kind {
        BaselineKind::PseudoGold => pseudo_gold_signatures(m, n),
        BaselineKind::Gold => {
            let r = (m + 1).trailing_zeros();
            if (m + 1).count_ones() != 1 {
                return invalid(format!("Gold sequences need m = 2^r − 1, got {m}"));
            }
            let all = gold_sequences(r)?;
            if n > all.len() {
                return invalid(format!("the Gold family of length {m} has only {} members", all.len()));
            }
            let cols = &all[..n];
            let (a, c) = max_periodic_correlation(cols);
            Ok(BaselineSet {
                kind,
                signatures: to_matrix(m, cols, SignatureAlphabet::Binary)?,
                max_correlation: a.max(c),
            })
        }
        BaselineKind::Ooc => ooc_signatures(m, n, 2),
    }
}
