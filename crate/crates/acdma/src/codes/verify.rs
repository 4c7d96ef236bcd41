use rand::Rng;

use super::zerosum::{gf2_reach, ZsColumn, ZsOutcome, ZsProblem, ZsSolver};
use super::{max_shift, rotate, CodeMatrix};
use crate::error::{invalid, Error, Result};
use crate::model::{derive_rng, Certificate, Family, Method};

/// How thoroughly to check a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Complete proof over every rotation and difference vector.
    Exhaustive,
    /// Random (rotation, difference) trials; falsifying only.
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Work budget for exhaustive proofs.
    pub budget: u64,
    /// Number of randomized trials.
    pub trials: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { budget: 2_000_000_000, trials: 1_000_000, seed: 0 }
    }
}

/// A rotation and a nonzero difference (or GF(2) input) that break the property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub shifts: Vec<usize>,
    /// Entries in `{−1, 0, 1}` for A/Ã/B, `{0, 1}` for D.
    pub diff: Vec<i8>,
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub certificate: Option<Certificate>,
    pub counterexample: Option<Counterexample>,
    pub work: u64,
}

fn check_alphabet(mat: &CodeMatrix, family: Family) -> Result<()> {
    let ok = match family {
        Family::A | Family::B => mat.all_in(&[-1, 1]),
        Family::ATilde | Family::D => mat.all_in(&[0, 1]),
    };
    if ok {
        Ok(())
    } else {
        invalid(format!("matrix entries do not match the {family} family alphabet"))
    }
}

/// Whether `cx` really violates the family property (independent of how it was found).
pub fn is_counterexample(mat: &CodeMatrix, family: Family, s: usize, cx: &Counterexample) -> bool {
    let m = mat.rows();
    if cx.shifts.len() != mat.cols() || cx.diff.len() != mat.cols() {
        return false;
    }
    if cx.diff.iter().all(|&d| d == 0) || cx.shifts.iter().any(|&t| t > max_shift(m, s)) {
        return false;
    }
    let signed = family == Family::B;
    match family {
        Family::D => {
            let mut acc = vec![0i8; m];
            for (i, col) in mat.columns().enumerate() {
                if cx.diff[i] == 1 {
                    for (a, x) in acc.iter_mut().zip(rotate(col, cx.shifts[i], false)) {
                        *a ^= x;
                    }
                }
            }
            acc.iter().all(|&x| x == 0) || acc.iter().all(|&x| x == 1)
        }
        _ => {
            let mut acc = vec![0i32; m];
            for (i, col) in mat.columns().enumerate() {
                let d = cx.diff[i] as i32;
                if d != 0 {
                    for (a, x) in acc.iter_mut().zip(rotate(col, cx.shifts[i], signed)) {
                        *a += d * x as i32;
                    }
                }
            }
            acc.iter().all(|&x| x == 0)
        }
    }
}

/// Check the family property of `mat` for every rotation within budget `s`.
pub fn verify(mat: &CodeMatrix, family: Family, s: usize, mode: VerifyMode, cfg: &VerifyConfig) -> Result<Verdict> {
    check_alphabet(mat, family)?;
    let verdict = match mode {
        VerifyMode::Exhaustive => match family {
            Family::D => exhaustive_d(mat, s, cfg)?,
            _ => exhaustive_signed(mat, family, s, cfg)?,
        },
        VerifyMode::Randomized => randomized(mat, family, s, cfg),
    };
    if let Some(cx) = &verdict.counterexample {
        if !is_counterexample(mat, family, s, cx) {
            return Err(Error::Numerical("internal error: reported counterexample does not check out".into()));
        }
    }
    Ok(verdict)
}

fn finish(family: Family, s: usize, method: Method, seed: u64, trials: u64, cx: Option<Counterexample>, work: u64) -> Verdict {
    let holds = cx.is_none();
    Verdict {
        holds,
        certificate: holds.then_some(Certificate { family, s, method, seed, trials }),
        counterexample: cx,
        work,
    }
}

/// Build the zero-sum problem whose options are the (signed) rotations of each column.
pub(crate) fn rotation_problem(mat: &CodeMatrix, s: usize, signed: bool, forced: Option<usize>) -> ZsProblem {
    let m = mat.rows();
    let cols = mat
        .columns()
        .enumerate()
        .map(|(i, col)| {
            let mut c = ZsColumn::new(i, forced == Some(i));
            for t in 0..=max_shift(m, s) {
                c.push(rotate(col, t, signed).into_iter().map(i32::from).collect(), (t, 1));
            }
            c
        })
        .collect();
    ZsProblem { dim: m, cols }
}

fn exhaustive_signed(mat: &CodeMatrix, family: Family, s: usize, cfg: &VerifyConfig) -> Result<Verdict> {
    let p = rotation_problem(mat, s, family == Family::B, None);
    let mut solver = ZsSolver::new(cfg.budget);
    let out = solver.solve(&p)?;
    let cx = match out {
        ZsOutcome::NoZeroSum => None,
        ZsOutcome::Found(w) => {
            let mut shifts = vec![0; mat.cols()];
            let mut diff = vec![0; mat.cols()];
            for (id, t, sign) in w.picks {
                shifts[id] = t;
                diff[id] = sign;
            }
            Some(Counterexample { shifts, diff })
        }
    };
    Ok(finish(family, s, Method::Exhaustive, 0, solver.stats.work, cx, solver.stats.work))
}

/// Largest row count for which the GF(2) reachability proof is attempted.
pub const MAX_EXHAUSTIVE_D_ROWS: usize = 28;

fn exhaustive_d(mat: &CodeMatrix, s: usize, cfg: &VerifyConfig) -> Result<Verdict> {
    let m = mat.rows();
    if m > MAX_EXHAUSTIVE_D_ROWS {
        return Err(Error::Budget {
            work: 0,
            context: format!("GF(2) state space 2^{} too large for exhaustive D verification", m - 1),
        });
    }
    let all_ones = (1u64 << m) - 1;
    let quotient = |x: u64| if x >> (m - 1) & 1 == 1 { x ^ all_ones } else { x };
    let hi = max_shift(m, s);
    let cols: Vec<Vec<u64>> = mat
        .columns()
        .map(|col| (0..=hi).map(|t| quotient(bits_of(&rotate(col, t, false)))).collect())
        .collect();
    let words = (1u64 << (m - 1)).div_ceil(64);
    let work: u64 = cols.iter().map(|c| c.len() as u64 * words).sum();
    if work > cfg.budget {
        return Err(Error::Budget { work, context: "GF(2) reachability".into() });
    }
    let want_witness = words * mat.cols() as u64 <= 1 << 25;
    let reach = gf2_reach(&cols, m - 1, want_witness);
    let cx = if reach.zero_reachable {
        match reach.witness {
            Some(picks) => {
                let shifts = picks.iter().map(|p| p.unwrap_or(0)).collect();
                let diff = picks.iter().map(|p| i8::from(p.is_some())).collect();
                Some(Counterexample { shifts, diff })
            }
            None => {
                return Ok(Verdict { holds: false, certificate: None, counterexample: None, work });
            }
        }
    } else {
        None
    };
    Ok(finish(Family::D, s, Method::Exhaustive, 0, work, cx, work))
}

fn bits_of(col: &[i8]) -> u64 {
    col.iter().enumerate().fold(0u64, |acc, (r, &x)| if x != 0 { acc | 1 << r } else { acc })
}

fn randomized(mat: &CodeMatrix, family: Family, s: usize, cfg: &VerifyConfig) -> Verdict {
    let m = mat.rows();
    let n = mat.cols();
    let hi = max_shift(m, s);
    let signed = family == Family::B;
    let mut rng = derive_rng(cfg.seed, 0x5EED);
    let mut perm: Vec<usize> = (0..n).collect();
    let small = n.min(4);
    let pick = |rng: &mut crate::model::SimRng, perm: &mut Vec<usize>| -> usize {
        let w = if rng.random::<bool>() { rng.random_range(1..=n) } else { rng.random_range(1..=small) };
        for k in 0..w {
            let j = rng.random_range(k..n);
            perm.swap(k, j);
        }
        w
    };
    if family == Family::D {
        if m > 128 {
            return finish(family, s, Method::Randomized, cfg.seed, 0, None, 0);
        }
        let full: u128 = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
        let table: Vec<Vec<u128>> = mat
            .columns()
            .map(|col| {
                (0..=hi)
                    .map(|t| rotate(col, t, false).iter().enumerate().fold(0u128, |a, (r, &x)| if x != 0 { a | 1 << r } else { a }))
                    .collect()
            })
            .collect();
        let mut shift = vec![0usize; n];
        for _ in 0..cfg.trials {
            let w = pick(&mut rng, &mut perm);
            let mut acc = 0u128;
            for &c in &perm[..w] {
                let t = rng.random_range(0..=hi);
                shift[c] = t;
                acc ^= table[c][t];
            }
            if acc == 0 || acc == full {
                let mut shifts = vec![0; n];
                let mut diff = vec![0; n];
                for &c in &perm[..w] {
                    shifts[c] = shift[c];
                    diff[c] = 1;
                }
                return finish(family, s, Method::Randomized, cfg.seed, cfg.trials, Some(Counterexample { shifts, diff }), 0);
            }
        }
        return finish(family, s, Method::Randomized, cfg.seed, cfg.trials, None, cfg.trials);
    }
    let table: Vec<Vec<Vec<i16>>> = mat
        .columns()
        .map(|col| (0..=hi).map(|t| rotate(col, t, signed).into_iter().map(i16::from).collect()).collect())
        .collect();
    let mut acc = vec![0i16; m];
    let mut shift = vec![0usize; n];
    let mut sign = vec![0i8; n];
    for _ in 0..cfg.trials {
        let w = pick(&mut rng, &mut perm);
        acc.iter_mut().for_each(|a| *a = 0);
        for &c in &perm[..w] {
            let t = rng.random_range(0..=hi);
            let positive = rng.random::<bool>();
            shift[c] = t;
            sign[c] = if positive { 1 } else { -1 };
            let v = &table[c][t];
            if positive {
                acc.iter_mut().zip(v).for_each(|(a, &x)| *a += x);
            } else {
                acc.iter_mut().zip(v).for_each(|(a, &x)| *a -= x);
            }
        }
        if acc.iter().all(|&a| a == 0) {
            let mut shifts = vec![0; n];
            let mut diff = vec![0; n];
            for &c in &perm[..w] {
                shifts[c] = shift[c];
                diff[c] = sign[c];
            }
            return finish(family, s, Method::Randomized, cfg.seed, cfg.trials, Some(Counterexample { shifts, diff }), 0);
        }
    }
    finish(family, s, Method::Randomized, cfg.seed, cfg.trials, None, cfg.trials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_is_a222() {
        let h = CodeMatrix::from_rows(&[&[1, 1], &[1, -1]]).unwrap();
        let v = verify(&h, Family::A, 2, VerifyMode::Exhaustive, &VerifyConfig::default()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn d212_and_square_d_fails() {
        let d = CodeMatrix::from_rows(&[&[1], &[0]]).unwrap();
        assert!(verify(&d, Family::D, 2, VerifyMode::Exhaustive, &VerifyConfig::default()).unwrap().holds);
        let sq = CodeMatrix::from_rows(&[&[1, 1], &[0, 1]]).unwrap();
        let v = verify(&sq, Family::D, 2, VerifyMode::Exhaustive, &VerifyConfig::default()).unwrap();
        assert!(!v.holds);
        assert!(v.counterexample.is_some());
    }
}
