//! Multiuser receivers for the chip-asynchronous channel, baseline
//! signature families and a bit-error-rate harness.

mod baselines;
mod ber;
pub mod lattice;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

pub use baselines::{
    gold_like_signatures, gold_sequences, max_periodic_correlation, ooc_signatures, pseudo_gold_signatures,
    BaselineKind, BaselineSet,
};
pub use ber::{ber_trial, wilson_interval, BerCount, BerSetup, DelaySampler};

use crate::error::{invalid, Error, Result};
use crate::model::ChannelInstance;
use crate::numerics::LseAcc;
use lattice::{all_distances, candidate, nearest};

/// Which receiver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    PseudoMl,
    Map,
    Gpml,
    Ist,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::PseudoMl => "pml",
            DecoderKind::Map => "map",
            DecoderKind::Gpml => "gpml",
            DecoderKind::Ist => "ist",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "pml" | "pseudoml" => Ok(DecoderKind::PseudoMl),
            "map" => Ok(DecoderKind::Map),
            "gpml" => Ok(DecoderKind::Gpml),
            "ist" => Ok(DecoderKind::Ist),
            _ => invalid(format!("unknown decoder `{s}` (expected pml, map, gpml or ist)")),
        }
    }
}

/// Receiver settings; fields not used by `kind` are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    /// Candidates kept by GPML.
    pub q: usize,
    /// IST relaxation, in `(0, 2)`.
    pub lambda_relax: f64,
    /// IST initial threshold.
    pub eta0: f64,
    /// IST threshold decay rate.
    pub alpha: f64,
    pub iters: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { kind: DecoderKind::PseudoMl, q: 5, lambda_relax: 1.0, eta0: 4.0, alpha: 0.5, iters: 30 }
    }
}

impl DecoderConfig {
    pub fn new(kind: DecoderKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.q == 0 || (n < 64 && self.q as u64 > 1u64 << n) {
            return invalid(format!("q = {} must lie in [1, 2^{n}]", self.q));
        }
        if !(self.lambda_relax > 0.0 && self.lambda_relax < 2.0) {
            return invalid(format!("relaxation {} must lie in (0, 2)", self.lambda_relax));
        }
        if !(self.eta0 > 0.0) || !(self.alpha > 0.0) {
            return invalid("threshold schedule needs eta0 > 0 and alpha > 0");
        }
        if self.iters == 0 {
            return invalid("iters must be at least 1");
        }
        Ok(())
    }
}

/// Decisions for one symbol period.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub x_hat: Vec<i8>,
    /// Negative squared residual, or posterior mass for MAP.
    pub score: f64,
    pub candidates_examined: u64,
}

fn check_y(y: &DVector<f64>, ch: &ChannelInstance) -> Result<()> {
    if y.len() != ch.rows() {
        return Err(Error::Dimension(format!("received {} samples, channel has {} rows", y.len(), ch.rows())));
    }
    Ok(())
}

fn rows_of(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |r, c| m[(rows[r], c)])
}

fn entries_of(y: &DVector<f64>, rows: &[usize]) -> DVector<f64> {
    DVector::from_iterator(rows.len(), rows.iter().map(|&r| y[r]))
}

fn to_f64(x: &[i8]) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.iter().map(|&v| f64::from(v)))
}

/// Nearest codeword on the rows no previous symbol reaches (`r mod m ≥ τ_max`).
pub fn pseudo_ml(y: &DVector<f64>, ch: &ChannelInstance, tau_max: usize, sym: [i8; 2]) -> Result<DecodeOutcome> {
    check_y(y, ch)?;
    let rows = ch.window_rows(tau_max);
    if rows.is_empty() {
        return Err(Error::Precondition(
            "the interference-free window is empty; use interval decoding for full-delay codes".into(),
        ));
    }
    let best = nearest(&rows_of(&ch.c_p, &rows), &entries_of(y, &rows), sym)?;
    Ok(DecodeOutcome { x_hat: best.x, score: -best.dist, candidates_examined: best.examined })
}

/// Symbols recovered from one block of a full-delay code.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDecision {
    pub outcome: DecodeOutcome,
    /// Per user: `true` if the decision is this period's symbol, `false` if
    /// it is the previous one.
    pub current: Vec<bool>,
    /// Index `u` of the block `[u·k, (u+1)·k)` used.
    pub block: usize,
}

/// First block `[u·k, (u+1)·k)` in which no user's symbol boundary falls.
pub fn clean_block(delays: &[usize], k: usize, chips: usize) -> Option<usize> {
    (0..chips / k).find(|&u| delays.iter().all(|&t| !(t > u * k && t < (u + 1) * k)))
}

/// Decoder for stacked full-delay codes: inside a block free of symbol
/// boundaries every user contributes one symbol through a cyclic shift of
/// its `k`-chip code word, so nearest-codeword search there recovers it.
pub fn interval_decode(
    y: &DVector<f64>,
    ch: &ChannelInstance,
    delays: &[usize],
    k: usize,
    sym: [i8; 2],
) -> Result<IntervalDecision> {
    check_y(y, ch)?;
    if k == 0 || ch.chips % k != 0 {
        return invalid(format!("block length {k} does not divide {} chips", ch.chips));
    }
    if delays.len() != ch.users() {
        return Err(Error::Dimension("one delay per user required".into()));
    }
    let Some(u) = clean_block(delays, k, ch.chips) else {
        return Err(Error::Precondition("every block contains a symbol boundary".into()));
    };
    let rows: Vec<usize> = (0..ch.rows()).filter(|r| r % ch.chips / k == u).collect();
    let current: Vec<bool> = delays.iter().map(|&t| t <= u * k).collect();
    let eff = DMatrix::from_fn(rows.len(), ch.users(), |r, c| {
        let src = if current[c] { &ch.c_p } else { &ch.c_i };
        src[(rows[r], c)]
    });
    let best = nearest(&eff, &entries_of(y, &rows), sym)?;
    Ok(IntervalDecision {
        outcome: DecodeOutcome { x_hat: best.x, score: -best.dist, candidates_examined: best.examined },
        current,
        block: u,
    })
}

/// Enumeration limit for MAP (`4ⁿ` likelihood terms).
pub const MAP_MAX_TERMS: u64 = 100_000_000;

/// The part of `C_I` that can change a residual: users with a nonzero
/// delay and the rows they reach.  Every other previous symbol leaves the
/// residual untouched and only multiplies the number of equal terms.
struct Interference {
    rows: Vec<usize>,
    sub: DMatrix<f64>,
    /// Users whose previous symbol never matters.
    free: usize,
}

impl Interference {
    fn new(ch: &ChannelInstance) -> Self {
        let cols: Vec<usize> = (0..ch.users()).filter(|&j| ch.c_i.column(j).iter().any(|&v| v != 0.0)).collect();
        let rows: Vec<usize> = (0..ch.rows()).filter(|&r| cols.iter().any(|&j| ch.c_i[(r, j)] != 0.0)).collect();
        let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| ch.c_i[(rows[r], cols[c])]);
        Interference { free: ch.users() - cols.len(), rows, sub }
    }

    /// `(c, d)` with `‖v − C_I x_I‖² = c + d[k]` over the distinct images.
    fn distances(&self, v: &DVector<f64>, sym: [i8; 2]) -> (f64, Vec<f64>) {
        let touched: f64 = self.rows.iter().map(|&r| v[r] * v[r]).sum();
        let c = v.norm_squared() - touched;
        if self.sub.ncols() == 0 {
            return (c + touched, vec![0.0]);
        }
        let part = DVector::from_iterator(self.rows.len(), self.rows.iter().map(|&r| v[r]));
        (c, all_distances(&self.sub, &part, sym))
    }
}

/// Most probable current input vector, marginalising the previous symbols
/// under uniform priors.  With `σ = 0` the joint nearest pair decides.
pub fn map_decode(y: &DVector<f64>, ch: &ChannelInstance, sym: [i8; 2]) -> Result<DecodeOutcome> {
    check_y(y, ch)?;
    let n = ch.users();
    if n >= 32 || (1u64 << (2 * n)) > MAP_MAX_TERMS {
        return Err(Error::Budget {
            work: if n < 32 { 1u64 << (2 * n) } else { u64::MAX },
            context: format!("MAP enumeration over 4^{n} input pairs"),
        });
    }
    let interference = Interference::new(ch);
    let scale = if ch.sigma > 0.0 { -0.5 / (ch.sigma * ch.sigma) } else { 0.0 };
    let multiplicity = interference.free as f64 * std::f64::consts::LN_2;
    let mut per_x = Vec::with_capacity(1 << n);
    let mut nearest_d = Vec::with_capacity(1 << n);
    for i in 0..1usize << n {
        let v = y - &ch.c_p * to_f64(&candidate(i, n, sym));
        let (c, ds) = interference.distances(&v, sym);
        let mut acc = LseAcc::new();
        let mut dmin = f64::INFINITY;
        for d in ds {
            dmin = dmin.min(c + d);
            acc.push(scale * (c + d));
        }
        per_x.push(acc.value() + multiplicity);
        nearest_d.push(dmin);
    }
    let examined = 1u64 << (2 * n);
    if ch.sigma <= 0.0 {
        let (best, _) = nearest_d
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &d)| if d < acc.1 { (i, d) } else { acc });
        return Ok(DecodeOutcome { x_hat: candidate(best, n, sym), score: 1.0, candidates_examined: examined });
    }
    let (best, top) = per_x
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
    let total = crate::numerics::log_sum_exp(&per_x);
    Ok(DecodeOutcome { x_hat: candidate(best, n, sym), score: (top - total).exp(), candidates_examined: examined })
}

/// Keep the `q` best windowed candidates, then resolve interference jointly.
pub fn gpml(y: &DVector<f64>, ch: &ChannelInstance, tau_max: usize, q: usize, sym: [i8; 2]) -> Result<DecodeOutcome> {
    check_y(y, ch)?;
    let n = ch.users();
    if n > 24 {
        return Err(Error::Budget { work: 1 << n, context: format!("GPML ranks all 2^{n} candidates") });
    }
    if q == 0 || q > 1 << n {
        return invalid(format!("q = {q} must lie in [1, 2^{n}]"));
    }
    let rows = ch.window_rows(tau_max);
    if rows.is_empty() {
        return Err(Error::Precondition("the interference-free window is empty".into()));
    }
    let d = all_distances(&rows_of(&ch.c_p, &rows), &entries_of(y, &rows), sym);
    let mut ranked: Vec<usize> = (0..d.len()).collect();
    // Equal residuals keep lexicographic order.
    let by_residual = |a: &usize, b: &usize| d[*a].total_cmp(&d[*b]).then(a.cmp(b));
    if q < ranked.len() {
        ranked.select_nth_unstable_by(q - 1, by_residual);
        ranked.truncate(q);
    }
    ranked.sort_by(by_residual);
    let interference = Interference::new(ch);
    let mut best = (f64::INFINITY, 0usize);
    for &idx in &ranked {
        let v = y - &ch.c_p * to_f64(&candidate(idx, n, sym));
        let (c, ds) = interference.distances(&v, sym);
        let dmin = c + ds.into_iter().fold(f64::INFINITY, f64::min);
        if dmin < best.0 || (dmin == best.0 && idx < best.1) {
            best = (dmin, idx);
        }
    }
    Ok(DecodeOutcome {
        x_hat: candidate(best.1, n, sym),
        score: -best.0,
        candidates_examined: (q as u64) << n,
    })
}

/// `η_k = η₀·e^{−αk}`.
pub fn threshold_at(eta0: f64, alpha: f64, k: usize) -> f64 {
    eta0 * (-alpha * k as f64).exp()
}

/// Snap entries beyond `±η` to `±1`, leave the rest unchanged.
pub fn soft_threshold(v: f64, eta: f64) -> f64 {
    if v > eta {
        1.0
    } else if v < -eta {
        -1.0
    } else {
        v
    }
}

/// Iterative soft thresholding on the current-symbol matrix, treating the
/// previous symbols' leakage as noise.
///
/// With `C = C_p / gain` and `ỹ = y / gain`, iterates
/// `x ← ψ_{η_k}(λ Cᵀỹ + (I − λ CᵀC) x)` from `x₀ = Cᵀỹ`.
pub fn ist_decode(y: &DVector<f64>, ch: &ChannelInstance, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    check_y(y, ch)?;
    if cfg.kind != DecoderKind::Ist {
        return invalid("ist_decode needs an IST configuration");
    }
    cfg.validate(ch.users().min(63))?;
    if ch.gain <= 0.0 {
        return Err(Error::Precondition("IST needs a positive signal gain".into()));
    }
    let n = ch.users();
    let c = &ch.c_p / ch.gain;
    let yt = y / ch.gain;
    let g = c.transpose() * &c;
    let cty = c.transpose() * &yt;
    let step = DMatrix::identity(n, n) - g * cfg.lambda_relax;
    let limit = 1e3 * (n as f64).sqrt();
    let mut x = cty.clone();
    for k in 0..cfg.iters {
        let eta = threshold_at(cfg.eta0, cfg.alpha, k);
        let v = &cty * cfg.lambda_relax + &step * &x;
        x = v.map(|e| soft_threshold(e, eta));
        let norm = x.norm();
        if !norm.is_finite() || norm > limit {
            return Err(Error::Numerical(format!(
                "IST diverged at iteration {k}: ‖x‖ = {norm:.3e} exceeds {limit:.3e} (try a smaller relaxation)"
            )));
        }
    }
    let x_hat: Vec<i8> = x.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).collect();
    let score = -(y - &ch.c_p * to_f64(&x_hat)).norm_squared();
    Ok(DecodeOutcome { x_hat, score, candidates_examined: cfg.iters as u64 })
}

/// Run the receiver selected by `cfg` on a windowed code.
pub fn decode(
    y: &DVector<f64>,
    ch: &ChannelInstance,
    tau_max: usize,
    sym: [i8; 2],
    cfg: &DecoderConfig,
) -> Result<DecodeOutcome> {
    match cfg.kind {
        DecoderKind::PseudoMl => pseudo_ml(y, ch, tau_max, sym),
        DecoderKind::Map => map_decode(y, ch, sym),
        DecoderKind::Gpml => gpml(y, ch, tau_max, cfg.q, sym),
        DecoderKind::Ist => {
            if sym != [-1, 1] {
                return invalid("IST decodes antipodal (±1) inputs only");
            }
            ist_decode(y, ch, cfg)
        }
    }
}
