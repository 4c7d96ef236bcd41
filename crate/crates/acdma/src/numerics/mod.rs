//! Small numerical toolkit: log-domain combinatorics, 1-D optimisation and
//! quadrature rules used by the capacity bounds.

pub mod optimize;
pub mod quadrature;

pub use optimize::{golden_max, maximize_log_grid, Maximum};

/// `log2(e)`.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Table of `ln k!` for `k = 0..=n`, built by cumulative summation.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn ln_fact(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)`; `-inf` when `k > n`.
    #[inline]
    pub fn ln_binom(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// Numerically stable `ln(sum(exp(x_i)))`. Returns `-inf` for an empty input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// Streaming log-sum-exp accumulator (rescales on the fly).
#[derive(Debug, Clone, Copy)]
pub struct LseAcc {
    max: f64,
    sum: f64,
}

impl Default for LseAcc {
    fn default() -> Self {
        Self::new()
    }
}

impl LseAcc {
    pub fn new() -> Self {
        Self { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Log-domain linear convolution: `out[k] = ln sum_{i+j=k} exp(a[i] + b[j])`,
/// truncated to `len` entries.
pub fn log_convolve(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut buf = Vec::new();
    for k in 0..len {
        buf.clear();
        let lo = k.saturating_sub(b.len().saturating_sub(1));
        let hi = k.min(a.len().saturating_sub(1));
        if lo <= hi {
            for i in lo..=hi {
                buf.push(a[i] + b[k - i]);
            }
        }
        out.push(log_sum_exp(&buf));
    }
    out
}
