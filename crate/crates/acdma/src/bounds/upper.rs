use std::f64::consts::LN_2;

use super::{check_eta, check_finite_params, BoundId, BoundResult};
use crate::error::Result;
use crate::model::InputAlphabet;
use crate::numerics::LnFactorial;

/// Shannon entropy (bits) of the Binomial(n, 1/2) distribution.
pub fn binomial_entropy_bits(n: usize) -> f64 {
    let lf = LnFactorial::new(n);
    let mut h = 0.0;
    for k in 0..=n {
        let lp = lf.ln_binom(n, k) - n as f64 * LN_2;
        h -= lp.exp() * lp;
    }
    h / LN_2
}

/// Conjectured noiseless upper bound `min(n, m·H(Binomial(n, 1/2)))`,
/// independent of the delay spread.
pub fn ub_conjectured_noiseless(m: usize, n: usize) -> Result<BoundResult> {
    check_finite_params(m, n, 0)?;
    let total = (n as f64).min(m as f64 * binomial_entropy_bits(n));
    Ok(BoundResult::finite(BoundId::UbConjecturedNoiseless, n, total))
}

/// Conjectured noisy upper bound with unit-modulus signatures and unit noise:
/// `min(n·H(input), (m/2)·log2(1 + r²·n/m))`, `r = √(2η)`.  The second term
/// is the Gaussian maximum-entropy relaxation of the per-chip output entropy.
pub fn ub_conjectured_noisy(m: usize, n: usize, eta: f64, input: InputAlphabet) -> Result<BoundResult> {
    check_finite_params(m, n, 0)?;
    check_eta(eta)?;
    let r2 = 2.0 * eta;
    let gaussian = (m as f64 / 2.0) * (r2 * n as f64 / m as f64).ln_1p() / LN_2;
    let total = match input {
        InputAlphabet::Binary | InputAlphabet::OnOff => gaussian.min(n as f64),
        InputAlphabet::Real => gaussian,
    };
    Ok(BoundResult::finite(BoundId::UbConjecturedNoisy, n, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_entropies() {
        assert!((binomial_entropy_bits(1) - 1.0).abs() < 1e-12);
        assert!((binomial_entropy_bits(2) - 1.5).abs() < 1e-12);
        assert_eq!(ub_conjectured_noiseless(5, 2).unwrap().total_bits, Some(2.0));
    }
}
