//! Exact search for signed zero-sum selections.
//!
//! A *problem* is a list of columns, each offering a set of integer vectors
//! (closed under negation).  A selection picks at most one option per column;
//! the question is whether some nonempty selection sums to the zero vector.
//! Injectivity of every rotation of an `A`, `Ã` or `B` matrix is exactly the
//! absence of such a selection, with the options being the rotated columns.
//!
//! Two engines are combined:
//!
//! * a meet-in-the-middle enumeration over a linear `u128` key (exact
//!   mixed-radix packing when the sums fit, random linear fingerprints
//!   otherwise — every hit is re-checked exactly), and
//! * a *fold* reduction for even dimensions: writing each vector as
//!   `[a; b]`, a zero sum forces both `Σ(a+b)` and `Σ(a−b)` to vanish.  A
//!   GF(2) parity pass over `(a+b)/g` can rule out whole groups of columns,
//!   after which the remaining groups decouple into half-size problems.
//!   The reduction is only applied when it is conclusive; otherwise the
//!   enumeration runs on the original problem.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::error::{Error, Result};

/// One column of a zero-sum problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ZsColumn {
    /// Column identifier reported in witnesses.
    pub id: usize,
    /// Representatives; the available options are these and their negations.
    pub reps: Vec<Vec<i32>>,
    /// `(origin index, sign)` of each representative in the caller's numbering.
    pub origin: Vec<(usize, i8)>,
    /// The column must take part in the selection.
    pub forced: bool,
}

impl ZsColumn {
    pub fn new(id: usize, forced: bool) -> Self {
        Self { id, reps: Vec::new(), origin: Vec::new(), forced }
    }

    /// Add an option unless it (or its negation) is already present.
    pub fn push(&mut self, v: Vec<i32>, origin: (usize, i8)) {
        let neg: Vec<i32> = v.iter().map(|x| -x).collect();
        if self.reps.iter().any(|r| *r == v || *r == neg) {
            return;
        }
        self.reps.push(v);
        self.origin.push(origin);
    }

    fn choices(&self) -> u64 {
        2 * self.reps.len() as u64 + u64::from(!self.forced)
    }
}

/// A complete zero-sum question in a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ZsProblem {
    pub dim: usize,
    pub cols: Vec<ZsColumn>,
}

/// A nonempty selection summing to zero: `(column id, origin index, sign)`,
/// meaning `sign ×` the caller's option `origin index` of that column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZsWitness {
    pub picks: Vec<(usize, usize, i8)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZsOutcome {
    NoZeroSum,
    Found(ZsWitness),
}

/// Counters describing how a problem was settled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZsStats {
    pub work: u64,
    pub folds: u32,
    pub enumerations: u32,
}

/// Recursive solver with a global work budget.
#[derive(Debug, Clone)]
pub struct ZsSolver {
    pub budget: u64,
    pub stats: ZsStats,
    /// Largest stored half of a meet-in-the-middle split.
    pub store_cap: u64,
    /// Estimated enumeration work above which the fold reduction is tried first.
    pub fold_threshold: u64,
}

const DIRECT_THRESHOLD: u64 = 2_000_000;
const MAX_PARITY_BITS: usize = 27;

impl ZsSolver {
    pub fn new(budget: u64) -> Self {
        Self { budget, stats: ZsStats::default(), store_cap: 1 << 22, fold_threshold: DIRECT_THRESHOLD }
    }

    fn charge(&mut self, w: u64, context: &str) -> Result<()> {
        self.stats.work = self.stats.work.saturating_add(w);
        if self.stats.work > self.budget {
            return Err(Error::Budget { work: self.stats.work, context: context.to_string() });
        }
        Ok(())
    }

    pub fn solve(&mut self, p: &ZsProblem) -> Result<ZsOutcome> {
        if p.cols.iter().any(|c| c.forced && c.reps.is_empty()) {
            return Ok(ZsOutcome::NoZeroSum);
        }
        // A zero option is a zero sum on its own.
        for c in &p.cols {
            if let Some(k) = c.reps.iter().position(|r| r.iter().all(|&x| x == 0)) {
                let (o, s) = c.origin[k];
                return Ok(ZsOutcome::Found(ZsWitness { picks: vec![(c.id, o, s)] }));
            }
        }
        let cols: Vec<&ZsColumn> = p.cols.iter().filter(|c| !c.reps.is_empty()).collect();
        if cols.is_empty() {
            return Ok(ZsOutcome::NoZeroSum);
        }
        let p = ZsProblem { dim: p.dim, cols: cols.into_iter().cloned().collect() };
        let (est, _) = mitm_plan(&p, self.store_cap);
        if est > self.fold_threshold && p.dim % 2 == 0 && p.dim >= 2 {
            if let Some(out) = self.fold(&p)? {
                return Ok(out);
            }
        }
        self.enumerate(&p)
    }

    /// Fold reduction; `Ok(None)` when inconclusive.
    fn fold(&mut self, p: &ZsProblem) -> Result<Option<ZsOutcome>> {
        let h = p.dim / 2;
        if h > 64 {
            return Ok(None);
        }
        let plus = |v: &[i32]| -> Vec<i32> { (0..h).map(|r| v[r] + v[r + h]).collect() };
        let minus = |v: &[i32]| -> Vec<i32> { (0..h).map(|r| v[r] - v[r + h]).collect() };

        let mut g = 0i32;
        for c in &p.cols {
            for v in &c.reps {
                for x in plus(v) {
                    g = gcd(g, x.abs());
                }
            }
        }
        let mask_of = |v: &[i32]| -> u64 {
            if g == 0 {
                return 0;
            }
            plus(v)
                .iter()
                .enumerate()
                .fold(0u64, |m, (r, &x)| if (x / g) & 1 != 0 { m | (1 << r) } else { m })
        };
        let masks: Vec<Vec<u64>> = p.cols.iter().map(|c| c.reps.iter().map(|v| mask_of(v)).collect()).collect();
        let constant: Vec<bool> = masks.iter().map(|ms| ms.iter().all(|&m| m == ms[0])).collect();

        // Span of the constant masks; quotient the mixed ones by it.
        let basis = Gf2Basis::from_vectors(
            masks.iter().zip(&constant).filter(|(_, &c)| c).map(|(ms, _)| ms[0]),
            h,
        );
        let mixed: Vec<usize> = (0..p.cols.len()).filter(|&i| !constant[i]).collect();
        if !mixed.is_empty() {
            let free_bits = h - basis.rank();
            if free_bits > MAX_PARITY_BITS {
                return Ok(None);
            }
            let col_masks: Vec<Vec<u64>> = mixed
                .iter()
                .map(|&i| {
                    let mut ms: Vec<u64> = masks[i].iter().map(|&m| basis.compress(m)).collect();
                    ms.sort_unstable();
                    ms.dedup();
                    ms
                })
                .collect();
            let words = (1u64 << free_bits).div_ceil(64);
            let cost: u64 = col_masks.iter().map(|ms| ms.len() as u64 * words).sum();
            if self.stats.work.saturating_add(cost) > self.budget {
                return Ok(None);
            }
            self.charge(cost, "parity pass")?;
            let reach = gf2_reach(&col_masks, free_bits, false);
            if reach.zero_reachable {
                return Ok(None);
            }
            if mixed.iter().any(|&i| p.cols[i].forced) {
                self.stats.folds += 1;
                return Ok(Some(ZsOutcome::NoZeroSum));
            }
        }
        let kept: Vec<&ZsColumn> = p.cols.iter().zip(&constant).filter(|(_, &c)| c).map(|(c, _)| c).collect();
        self.stats.folds += 1;

        let is_zero = |v: &[i32]| v.iter().all(|&x| x == 0);
        // Orientation 1: columns with vanishing (a−b) reduce to the (a+b) problem
        // once the others are shown unable to cancel in (a−b).
        for orient in 0..2 {
            let (null_proj, other_proj): (&dyn Fn(&[i32]) -> Vec<i32>, &dyn Fn(&[i32]) -> Vec<i32>) =
                if orient == 0 { (&minus, &plus) } else { (&plus, &minus) };
            let (nulls, rest): (Vec<&ZsColumn>, Vec<&ZsColumn>) =
                kept.iter().partition(|c| c.reps.iter().all(|v| is_zero(&null_proj(v))));
            if !rest.is_empty() {
                let sub = project(&rest, h, null_proj);
                let mut child = self.child();
                let out = child.solve(&sub);
                self.absorb(&child);
                match out {
                    Ok(ZsOutcome::NoZeroSum) => {}
                    Ok(ZsOutcome::Found(_)) | Err(Error::Budget { .. }) => continue,
                    Err(e) => return Err(e),
                }
                if rest.iter().any(|c| c.forced) {
                    return Ok(Some(ZsOutcome::NoZeroSum));
                }
            }
            if nulls.is_empty() {
                return Ok(Some(ZsOutcome::NoZeroSum));
            }
            let sub = project(&nulls, h, other_proj);
            return self.solve(&sub).map(Some);
        }
        Ok(None)
    }

    fn child(&self) -> ZsSolver {
        ZsSolver {
            budget: self.budget.saturating_sub(self.stats.work),
            stats: ZsStats::default(),
            store_cap: self.store_cap,
            fold_threshold: self.fold_threshold,
        }
    }

    fn absorb(&mut self, child: &ZsSolver) {
        self.stats.work = self.stats.work.saturating_add(child.stats.work);
        self.stats.folds += child.stats.folds;
        self.stats.enumerations += child.stats.enumerations;
    }

    /// Meet-in-the-middle enumeration.
    fn enumerate(&mut self, p: &ZsProblem) -> Result<ZsOutcome> {
        let (est, split) = mitm_plan(p, self.store_cap);
        if self.stats.work.saturating_add(est) > self.budget {
            return Err(Error::Budget {
                work: self.stats.work.saturating_add(est),
                context: format!("enumeration of {} columns in dimension {}", p.cols.len(), p.dim),
            });
        }
        self.stats.enumerations += 1;
        let keys = KeyMap::new(p);
        let opt_keys: Vec<Vec<u128>> = p
            .cols
            .iter()
            .map(|c| {
                let mut ks = Vec::with_capacity(c.choices() as usize);
                if !c.forced {
                    ks.push(0u128);
                }
                let pos: Vec<u128> = c.reps.iter().map(|v| keys.key(v)).collect();
                ks.extend(pos.iter().copied());
                ks.extend(pos.iter().map(|k| k.wrapping_neg()));
                ks
            })
            .collect();
        let left = &p.cols[..split];
        let right = &p.cols[split..];
        let right_can_be_empty = right.iter().all(|c| !c.forced);

        let mut table: HashMap<u128, u64, BuildHasherDefault<KeyHasher>> = HashMap::default();
        let mut stored = 0u64;
        let mut found: Option<ZsWitness> = None;
        let mut collided = false;
        {
            let mut choice = vec![0usize; split];
            let mut sums = vec![0u128; split + 1];
            enumerate_half(&opt_keys[..split], &mut choice, &mut sums, 0, false, &mut |choice, key| {
                stored += 1;
                let code = encode(choice, &opt_keys[..split]);
                let nonempty = choice.iter().zip(left).any(|(&k, c)| !(k == 0 && !c.forced));
                if key == 0 && nonempty && right_can_be_empty && found.is_none() {
                    let w = decode_witness(p, &opt_keys, split, code, &[]);
                    if check_witness(p, &w) {
                        found = Some(w);
                        return false;
                    }
                    collided = true;
                }
                table.entry(key).or_insert(code);
                true
            });
        }
        self.charge(stored, "stored half")?;
        if let Some(w) = found {
            return Ok(ZsOutcome::Found(w));
        }
        let mut streamed = 0u64;
        {
            let n_right = right.len();
            let mut choice = vec![0usize; n_right];
            let mut sums = vec![0u128; n_right + 1];
            enumerate_half(&opt_keys[split..], &mut choice, &mut sums, 0, true, &mut |choice, key| {
                streamed += 1;
                let nonempty = choice.iter().zip(right).any(|(&k, c)| !(k == 0 && !c.forced));
                if !nonempty {
                    return true;
                }
                if let Some(&code) = table.get(&key.wrapping_neg()) {
                    let w = decode_witness(p, &opt_keys, split, code, choice);
                    if check_witness(p, &w) {
                        found = Some(w);
                        return false;
                    }
                    // Two different sums share a fingerprint; the stored one
                    // may have shadowed a genuine match.
                    collided = true;
                }
                true
            });
        }
        self.charge(streamed, "streamed half")?;
        match found {
            Some(w) => Ok(ZsOutcome::Found(w)),
            None if collided => Err(Error::Numerical(
                "fingerprint collision during enumeration; result inconclusive".into(),
            )),
            None => Ok(ZsOutcome::NoZeroSum),
        }
    }
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Map columns through a linear projection, dividing out the common factor.
fn project(cols: &[&ZsColumn], h: usize, f: &dyn Fn(&[i32]) -> Vec<i32>) -> ZsProblem {
    let projected: Vec<Vec<Vec<i32>>> = cols.iter().map(|c| c.reps.iter().map(|v| f(v)).collect()).collect();
    let g = projected.iter().flatten().flatten().fold(0, |g, &x| gcd(g, x.abs())).max(1);
    let cols = cols
        .iter()
        .zip(projected)
        .map(|(c, vs)| {
            let mut col = ZsColumn::new(c.id, c.forced);
            for (v, &o) in vs.into_iter().zip(&c.origin) {
                col.push(v.into_iter().map(|x| x / g).collect(), o);
            }
            col
        })
        .collect();
    ZsProblem { dim: h, cols }
}

/// Choose the split index minimising total work with a capped stored half.
fn mitm_plan(p: &ZsProblem, store_cap: u64) -> (u64, usize) {
    let k: Vec<u64> = p.cols.iter().map(|c| c.choices()).collect();
    let mut best = (u64::MAX, 0);
    let mut left = 1u64;
    for split in 0..=k.len() {
        if split > 0 {
            left = left.saturating_mul(k[split - 1]);
        }
        if left > store_cap {
            break;
        }
        let right = k[split..].iter().fold(1u64, |a, &b| a.saturating_mul(b));
        let cost = left.saturating_add(right / 2 + 1);
        if cost < best.0 {
            best = (cost, split);
        }
    }
    best
}

fn enumerate_half(
    opt_keys: &[Vec<u128>],
    choice: &mut [usize],
    sums: &mut [u128],
    depth: usize,
    canonical: bool,
    visit: &mut dyn FnMut(&[usize], u128) -> bool,
) -> bool {
    if depth == opt_keys.len() {
        return visit(choice, sums[depth]);
    }
    let keys = &opt_keys[depth];
    // Canonical sign: the first selected column of this half uses a
    // positive representative (global negation maps solutions to solutions).
    let first_pick = canonical && choice[..depth].iter().zip(opt_keys).all(|(&c, ks)| is_none_choice(c, ks));
    let reps = rep_count(keys);
    let has_none = keys.len() % 2 == 1;
    for (idx, &k) in keys.iter().enumerate() {
        if first_pick {
            let pos_idx = if has_none { idx.wrapping_sub(1) } else { idx };
            if !(has_none && idx == 0) && pos_idx >= reps {
                continue;
            }
        }
        choice[depth] = idx;
        sums[depth + 1] = sums[depth].wrapping_add(k);
        if !enumerate_half(opt_keys, choice, sums, depth + 1, canonical, visit) {
            return false;
        }
    }
    true
}

fn rep_count(keys: &[u128]) -> usize {
    keys.len() / 2
}

fn is_none_choice(c: usize, keys: &[u128]) -> bool {
    keys.len() % 2 == 1 && c == 0
}

fn encode(choice: &[usize], opt_keys: &[Vec<u128>]) -> u64 {
    choice.iter().zip(opt_keys).rev().fold(0u64, |acc, (&c, ks)| acc * ks.len() as u64 + c as u64)
}

/// Translate a choice index into `(rep index, sign)`; `None` for "unselected".
fn choice_to_pick(c: usize, col: &ZsColumn) -> Option<(usize, i8)> {
    let r = col.reps.len();
    let c = if col.forced { c } else if c == 0 { return None } else { c - 1 };
    Some(if c < r { (c, 1) } else { (c - r, -1) })
}

fn decode_witness(p: &ZsProblem, opt_keys: &[Vec<u128>], split: usize, mut code: u64, right: &[usize]) -> ZsWitness {
    let mut picks = Vec::new();
    for (i, col) in p.cols[..split].iter().enumerate() {
        let base = opt_keys[i].len() as u64;
        let c = (code % base) as usize;
        code /= base;
        if let Some((k, s)) = choice_to_pick(c, col) {
            let (o, s0) = col.origin[k];
            picks.push((col.id, o, s * s0));
        }
    }
    for (&c, col) in right.iter().zip(&p.cols[split..]) {
        if let Some((k, s)) = choice_to_pick(c, col) {
            let (o, s0) = col.origin[k];
            picks.push((col.id, o, s * s0));
        }
    }
    ZsWitness { picks }
}

/// Exact re-check of a witness against the problem's own options.
fn check_witness(p: &ZsProblem, w: &ZsWitness) -> bool {
    if w.picks.is_empty() {
        return false;
    }
    let mut acc = vec![0i64; p.dim];
    for &(id, o, s) in &w.picks {
        let Some(col) = p.cols.iter().find(|c| c.id == id) else { return false };
        let Some(k) = col.origin.iter().position(|&(oo, _)| oo == o) else { return false };
        let s = s * col.origin[k].1;
        for (a, &x) in acc.iter_mut().zip(&col.reps[k]) {
            *a += s as i64 * x as i64;
        }
    }
    acc.iter().all(|&x| x == 0)
}

/// Linear key: exact packing when every partial sum fits, otherwise random
/// odd multipliers (a 128-bit linear fingerprint).
struct KeyMap {
    weights: Vec<u128>,
}

impl KeyMap {
    fn new(p: &ZsProblem) -> Self {
        let mut bound = vec![0i64; p.dim];
        for c in &p.cols {
            for r in 0..p.dim {
                bound[r] += c.reps.iter().map(|v| v[r].abs() as i64).max().unwrap_or(0);
            }
        }
        let bits: Vec<u32> = bound.iter().map(|&b| 64 - ((2 * b + 1) as u64).leading_zeros()).collect();
        let total: u32 = bits.iter().sum();
        let weights = if total <= 128 {
            let mut off = 0u32;
            bits.iter()
                .map(|&b| {
                    let w = if off >= 128 { 0 } else { 1u128 << off };
                    off += b;
                    w
                })
                .collect()
        } else {
            let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (p.dim as u64);
            (0..p.dim)
                .map(|_| {
                    let hi = splitmix(&mut state) as u128;
                    let lo = splitmix(&mut state) as u128;
                    (hi << 64 | lo) | 1
                })
                .collect()
        };
        Self { weights }
    }

    fn key(&self, v: &[i32]) -> u128 {
        v.iter()
            .zip(&self.weights)
            .fold(0u128, |acc, (&x, &w)| acc.wrapping_add((x as i128 as u128).wrapping_mul(w)))
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut b = [0u8; 8];
            b[..chunk.len()].copy_from_slice(chunk);
            self.0 = (self.0.rotate_left(23) ^ u64::from_le_bytes(b)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }
    fn write_u128(&mut self, v: u128) {
        let x = (v as u64) ^ ((v >> 64) as u64).rotate_left(32);
        self.0 = (x ^ (x >> 29)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        self.0 ^= self.0 >> 32;
    }
}

/// Row-reduced GF(2) basis over `bits`-bit vectors, used to quotient masks.
#[derive(Debug, Clone)]
pub struct Gf2Basis {
    bits: usize,
    rows: Vec<u64>,
    pivots: Vec<u32>,
}

impl Gf2Basis {
    pub fn from_vectors(vs: impl IntoIterator<Item = u64>, bits: usize) -> Self {
        let mut b = Gf2Basis { bits, rows: Vec::new(), pivots: Vec::new() };
        for v in vs {
            b.insert(v);
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for (&r, &p) in self.rows.iter().zip(&self.pivots) {
            if v >> p & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    fn insert(&mut self, v: u64) {
        let v = self.reduce(v);
        if v == 0 {
            return;
        }
        let p = 63 - v.leading_zeros();
        for r in self.rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= v;
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
    }

    /// Canonical coset representative with the pivot bits squeezed out.
    pub fn compress(&self, v: u64) -> u64 {
        let v = self.reduce(v);
        let mut out = 0u64;
        let mut j = 0;
        for b in 0..self.bits as u32 {
            if self.pivots.contains(&b) {
                continue;
            }
            if v >> b & 1 == 1 {
                out |= 1 << j;
            }
            j += 1;
        }
        out
    }
}

/// Result of a GF(2) reachability pass.
#[derive(Debug, Clone)]
pub struct Gf2Reach {
    pub zero_reachable: bool,
    /// Per column: `Some(option index)` if selected in a zero-reaching selection.
    pub witness: Option<Vec<Option<usize>>>,
}

const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// `out |= { s ^ m : s ∈ set }` on a bitset indexed by `bits`-bit states.
fn or_xor_permuted(set: &[u64], m: u64, out: &mut [u64]) {
    let hi = (m >> 6) as usize;
    let lo = m & 63;
    for (w, &word) in set.iter().enumerate() {
        if word == 0 {
            continue;
        }
        let mut x = word;
        for (b, &mask) in LOW_MASKS.iter().enumerate() {
            if lo >> b & 1 == 1 {
                let s = 1u32 << b;
                x = ((x & mask) << s) | ((x >> s) & mask);
            }
        }
        out[w ^ hi] |= x;
    }
}

fn test_bit(set: &[u64], s: u64) -> bool {
    set[(s >> 6) as usize] >> (s & 63) & 1 == 1
}

/// Can a nonempty selection (at most one option per column) XOR to zero?
/// States are `bits`-bit words; with `want_witness` the per-column reach
/// sets are kept for backtracking.
pub fn gf2_reach(cols: &[Vec<u64>], bits: usize, want_witness: bool) -> Gf2Reach {
    let n_states = 1u64 << bits;
    let words = n_states.div_ceil(64) as usize;
    let mut reach = vec![0u64; words];
    let mut history: Vec<Vec<u64>> = Vec::new();
    for opts in cols {
        if want_witness {
            history.push(reach.clone());
        }
        let mut next = reach.clone();
        for &m in opts {
            or_xor_permuted(&reach, m, &mut next);
            next[(m >> 6) as usize] |= 1 << (m & 63);
        }
        reach = next;
    }
    let zero_reachable = reach[0] & 1 == 1;
    let witness = (zero_reachable && want_witness).then(|| {
        let mut picks = vec![None; cols.len()];
        let mut s = 0u64;
        for c in (0..cols.len()).rev() {
            let before = &history[c];
            // Reach sets only hold states of nonempty selections, so a state
            // already reachable before column c does not need it.
            if test_bit(before, s) {
                continue;
            }
            let mut done = false;
            for (k, &m) in cols[c].iter().enumerate() {
                if m == s {
                    picks[c] = Some(k);
                    done = true;
                    break;
                }
                if test_bit(before, s ^ m) {
                    picks[c] = Some(k);
                    s ^= m;
                    break;
                }
            }
            if done {
                break;
            }
        }
        picks
    });
    Gf2Reach { zero_reachable, witness }
}
