//! Finite and asymptotic sum-capacity bounds for chip-asynchronous CDMA.
//!
//! Every quantity is in bits.  The finite lower bounds all follow the same
//! pattern: the `τ_max` chips that may carry interference are discarded and
//! the remaining `m − τ_max` chips are treated as a synchronous system.

mod asymptotic;
mod finite;
mod upper;

use std::fmt;
use std::str::FromStr;

pub use asymptotic::{
    lb_asym_binary_noiseless, lb_asym_gaussian, lb_asym_gaussian_at, lb_asym_general_noise,
    lb_asym_real_real, real_real_rate_function, real_real_rate_function_closed, ub_asym_noiseless,
};
pub use finite::{
    lb_binary_awgn, lb_binary_awgn_at, lb_binary_noiseless, lb_binary_quaternary_noiseless,
    lb_binary_real_awgn, lb_binary_real_awgn_at, lb_real_real_awgn, lb_real_real_awgn_at,
    lb_ternary_ain, real_real_expectation,
};
pub use upper::{binomial_entropy_bits, ub_conjectured_noiseless, ub_conjectured_noisy};

use crate::error::{Error, Result};

/// Lower end of the searched `γ` range; `γ = 0` itself is handled as a
/// declared boundary point with value zero.
pub const GAMMA_LO: f64 = 1e-6;
/// Upper end of the searched `γ` range.
pub const GAMMA_HI: f64 = 1e6;

/// Identity of an implemented bound formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    LbBinaryNoiseless,
    LbAsymBinaryNoiseless,
    LbBinaryQuaternaryNoiseless,
    LbBinaryAwgn,
    LbTernaryAin,
    LbBinaryRealAwgn,
    LbRealRealAwgn,
    LbAsymGeneralNoise,
    LbAsymGaussian,
    LbAsymRealReal,
    UbConjecturedNoiseless,
    UbConjecturedNoisy,
    UbAsymNoiseless,
}

impl BoundId {
    pub const ALL: [BoundId; 13] = [
        BoundId::LbBinaryNoiseless,
        BoundId::LbAsymBinaryNoiseless,
        BoundId::LbBinaryQuaternaryNoiseless,
        BoundId::LbBinaryAwgn,
        BoundId::LbTernaryAin,
        BoundId::LbBinaryRealAwgn,
        BoundId::LbRealRealAwgn,
        BoundId::LbAsymGeneralNoise,
        BoundId::LbAsymGaussian,
        BoundId::LbAsymRealReal,
        BoundId::UbConjecturedNoiseless,
        BoundId::UbConjecturedNoisy,
        BoundId::UbAsymNoiseless,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::LbBinaryNoiseless => "lb_binary_noiseless",
            BoundId::LbAsymBinaryNoiseless => "lb_asym_binary_noiseless",
            BoundId::LbBinaryQuaternaryNoiseless => "lb_binary_quaternary_noiseless",
            BoundId::LbBinaryAwgn => "lb_binary_awgn",
            BoundId::LbTernaryAin => "lb_ternary_ain",
            BoundId::LbBinaryRealAwgn => "lb_binary_real_awgn",
            BoundId::LbRealRealAwgn => "lb_real_real_awgn",
            BoundId::LbAsymGeneralNoise => "lb_asym_general_noise",
            BoundId::LbAsymGaussian => "lb_asym_gaussian",
            BoundId::LbAsymRealReal => "lb_asym_real_real",
            BoundId::UbConjecturedNoiseless => "ub_conjectured_noiseless",
            BoundId::UbConjecturedNoisy => "ub_conjectured_noisy",
            BoundId::UbAsymNoiseless => "ub_asym_noiseless",
        }
    }

    /// Whether the bound is a finite `(m, n, τ_max)` formula.
    pub fn is_finite(self) -> bool {
        matches!(
            self,
            BoundId::LbBinaryNoiseless
                | BoundId::LbBinaryQuaternaryNoiseless
                | BoundId::LbBinaryAwgn
                | BoundId::LbTernaryAin
                | BoundId::LbBinaryRealAwgn
                | BoundId::LbRealRealAwgn
                | BoundId::UbConjecturedNoiseless
                | BoundId::UbConjecturedNoisy
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bound `{s}`")))
    }
}

/// Optimiser arguments at which a bound was attained.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Witnesses {
    pub gamma: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub x: Option<f64>,
}

/// Numerical bookkeeping attached to each evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub evaluations: usize,
    pub quadrature_error: Option<f64>,
    /// An optimiser stopped on the edge of its search interval.
    pub boundary_hit: bool,
    pub notes: Vec<String>,
}

/// Value of a bound with its witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub bound_id: BoundId,
    /// Total bits per symbol period; `None` for asymptotic (per-user) formulas.
    pub total_bits: Option<f64>,
    pub per_user_bits: f64,
    pub witnesses: Witnesses,
    pub diagnostics: Diagnostics,
}

impl BoundResult {
    pub(crate) fn finite(bound_id: BoundId, n: usize, total: f64) -> Self {
        BoundResult {
            bound_id,
            total_bits: Some(total),
            per_user_bits: total / n as f64,
            witnesses: Witnesses::default(),
            diagnostics: Diagnostics::default(),
        }
    }

    pub(crate) fn asymptotic(bound_id: BoundId, per_user: f64) -> Self {
        BoundResult {
            bound_id,
            total_bits: None,
            per_user_bits: per_user,
            witnesses: Witnesses::default(),
            diagnostics: Diagnostics::default(),
        }
    }

    /// Total bits, or the per-user value times `n` for asymptotic formulas.
    pub fn total_for(&self, n: usize) -> f64 {
        self.total_bits.unwrap_or(self.per_user_bits * n as f64)
    }
}

pub(crate) fn check_finite_params(m: usize, n: usize, tau_max: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("m and n must be positive (m={m}, n={n})")));
    }
    if tau_max > m {
        return Err(Error::InvalidParameter(format!("tau_max={tau_max} exceeds m={m}")));
    }
    Ok(())
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta must be finite and nonnegative, got {eta}")));
    }
    Ok(())
}
