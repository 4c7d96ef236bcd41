use rand::Rng;

use super::{decode, interval_decode, DecoderConfig, DecoderKind};
use crate::error::{invalid, Result};
use crate::model::{build_channel_with, random_symbols, snr_to_gain, transmit, DelayProfile, SignatureMatrix, SystemParams};

/// How each frame's delays are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelaySampler {
    /// Independent uniform delays in `[0, max_delay]` every frame.
    Uniform,
    Fixed(DelayProfile),
}

/// Everything a Monte Carlo run needs besides the frame count and RNG.
#[derive(Debug, Clone)]
pub struct BerSetup<'a> {
    pub signatures: &'a SignatureMatrix,
    pub params: SystemParams,
    pub delays: DelaySampler,
    pub decoder: DecoderConfig,
    /// Block length for stacked full-delay codes; selects interval decoding.
    pub interval_block: Option<usize>,
}

/// Error tally of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BerCount {
    pub bit_errors: u64,
    pub bits: u64,
    pub frames: u64,
}

impl BerCount {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 { 0.0 } else { self.bit_errors as f64 / self.bits as f64 }
    }

    /// 95% Wilson score interval.
    pub fn ci95(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.bits, 1.959_963_984_540_054)
    }

    pub fn merge(&mut self, other: BerCount) {
        self.bit_errors += other.bit_errors;
        self.bits += other.bits;
        self.frames += other.frames;
    }
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The limits are exactly 0 and 1 at the edges; don't let rounding move them.
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Simulate `frames` symbol periods and count bit errors against the truth.
pub fn ber_trial<R: Rng + ?Sized>(setup: &BerSetup<'_>, frames: u64, rng: &mut R) -> Result<BerCount> {
    if frames == 0 {
        return invalid("frames must be at least 1");
    }
    let params = &setup.params;
    params.validate()?;
    let sig = setup.signatures;
    if sig.rows() != params.m || sig.users() != params.n {
        return invalid(format!(
            "signatures are {}x{} but the system has m = {}, n = {}",
            sig.rows(),
            sig.users(),
            params.m,
            params.n
        ));
    }
    let Some(sym) = params.input.symbols() else {
        return invalid("bit error rates need a two-symbol input alphabet");
    };
    if setup.interval_block.is_some() && setup.decoder.kind != DecoderKind::PseudoMl {
        return invalid("full-delay codes are decoded with the interval pseudo-ML receiver only");
    }
    setup.decoder.validate(params.n.min(63))?;
    let gain = snr_to_gain(params, sig)?;
    let mut count = BerCount::default();
    for _ in 0..frames {
        let d = match &setup.delays {
            DelaySampler::Uniform => DelayProfile::random(params, rng),
            DelaySampler::Fixed(d) => d.clone(),
        };
        d.validate(params)?;
        let ch = build_channel_with(sig, &d, gain, 1.0)?;
        let x_prev = random_symbols(params.input, params.n, rng);
        let x_cur = random_symbols(params.input, params.n, rng);
        let y = transmit(&ch, &x_prev, &x_cur, rng)?;
        let errors = match setup.interval_block {
            Some(k) => {
                let dec = interval_decode(&y, &ch, &d.delays, k, sym)?;
                dec.outcome
                    .x_hat
                    .iter()
                    .zip(&dec.current)
                    .enumerate()
                    .filter(|&(i, (&x, &cur))| x != if cur { x_cur[i] } else { x_prev[i] })
                    .count()
            }
            None => {
                let dec = decode(&y, &ch, params.tau_max, sym, &setup.decoder)?;
                dec.x_hat.iter().zip(&x_cur).filter(|(a, b)| a != b).count()
            }
        };
        count.bit_errors += errors as u64;
        count.bits += params.n as u64;
        count.frames += 1;
    }
    Ok(count)
}
