use std::f64::consts::{LN_2, PI};

use super::{BoundId, BoundResult, GAMMA_HI, GAMMA_LO};
use crate::error::{Error, Result};
use crate::numerics::optimize::maximize_grid;
use crate::numerics::quadrature::gauss_hermite;
use crate::numerics::{binary_entropy, maximize_log_grid, LseAcc, LOG2_E};

fn check_zeta_lambda(zeta: f64, lambda: f64) -> Result<()> {
    if !(zeta >= 0.0) || !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "need zeta >= 0 and lambda in [0,1], got zeta={zeta}, lambda={lambda}"
        )));
    }
    if zeta == 0.0 && lambda == 1.0 {
        return Err(Error::InvalidParameter(
            "1 - lambda and zeta must not both be zero".into(),
        ));
    }
    Ok(())
}

fn check_beta_lambda(beta: f64, lambda: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "need beta > 0 and lambda in [0,1], got beta={beta}, lambda={lambda}"
        )));
    }
    Ok(())
}

/// Per-user noiseless limit in the `n = ζ·m·log n` regime: `min{1, (1−λ)/(2ζ)}`.
pub fn lb_asym_binary_noiseless(zeta: f64, lambda: f64) -> Result<BoundResult> {
    check_zeta_lambda(zeta, lambda)?;
    let v = if zeta == 0.0 { 1.0 } else { (1.0 - lambda) / (2.0 * zeta) };
    Ok(BoundResult::asymptotic(BoundId::LbAsymBinaryNoiseless, v.min(1.0)))
}

/// Conjectured per-user noiseless upper limit: `min{1, 1/(2ζ)}`, independent of λ.
pub fn ub_asym_noiseless(zeta: f64, lambda: f64) -> Result<BoundResult> {
    check_zeta_lambda(zeta, lambda)?;
    let v = if zeta == 0.0 { 1.0 } else { 1.0 / (2.0 * zeta) };
    Ok(BoundResult::asymptotic(BoundId::UbAsymNoiseless, v.min(1.0)))
}

fn gaussian_bracket(beta: f64, lambda: f64, sigma2: f64, gamma: f64, s: f64) -> f64 {
    let k = (1.0 - lambda) / (2.0 * beta);
    binary_entropy(s) + k * (gamma * LOG2_E - (gamma / sigma2 * (sigma2 + 4.0 * s * beta)).ln_1p() * LOG2_E)
}

fn sup_over_s(beta: f64, lambda: f64, sigma2: f64, gamma: f64) -> (f64, f64, bool) {
    let best = maximize_grid(|s| gaussian_bracket(beta, lambda, sigma2, gamma, s), 0.0, 1.0, 64, false);
    (best.value, best.x, best.at_boundary)
}

/// Inner supremum of the Gaussian-noise limit at a fixed `γ`:
/// `1 − sup_s [H(s) + ((1−λ)/(2β))(γ log e − log(1 + γ(σ² + 4sβ)/σ²))]`.
pub fn lb_asym_gaussian_at(beta: f64, lambda: f64, sigma: f64, gamma: f64) -> Result<BoundResult> {
    check_beta_lambda(beta, lambda)?;
    if !(sigma > 0.0) || !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("need sigma > 0 and gamma >= 0 (sigma={sigma}, gamma={gamma})")));
    }
    let (v, s, edge) = sup_over_s(beta, lambda, sigma * sigma, gamma);
    let mut r = BoundResult::asymptotic(BoundId::LbAsymGaussian, 1.0 - v);
    r.witnesses.gamma = Some(gamma);
    r.witnesses.s = Some(s);
    r.diagnostics.boundary_hit = edge;
    Ok(r)
}

/// Per-user limit for binary inputs/signatures in Gaussian noise of
/// standard deviation `sigma`, at loading `β` and delay ratio `λ`
/// (inf over `γ`, sup over `s`).
pub fn lb_asym_gaussian(beta: f64, lambda: f64, sigma: f64) -> Result<BoundResult> {
    check_beta_lambda(beta, lambda)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let sigma2 = sigma * sigma;
    let mut evals = 0usize;
    let best = maximize_log_grid(
        |g| {
            let (v, _, _) = sup_over_s(beta, lambda, sigma2, g);
            evals += 1;
            -v
        },
        GAMMA_LO,
        GAMMA_HI,
    );
    // γ → 0 drives the bracket to sup H = 1, i.e. a zero bound.
    let inf = (-best.value).min(1.0);
    let (_, s_star, _) = sup_over_s(beta, lambda, sigma2, best.x);
    let mut r = BoundResult::asymptotic(BoundId::LbAsymGaussian, 1.0 - inf);
    r.witnesses.gamma = Some(best.x);
    r.witnesses.s = Some(s_star);
    r.diagnostics.boundary_hit = best.at_boundary;
    r.diagnostics.evaluations = best.evals * 80;
    Ok(r)
}

/// `(E q(N₁), log2 E 2^{−q(N₁ − 2√(tβ)Z)})` by tensorised Gauss–Hermite of the given order.
fn general_noise_terms(q: &dyn Fn(f64) -> f64, sigma: f64, beta: f64, t: f64, nodes: &(Vec<f64>, Vec<f64>)) -> (f64, f64) {
    let (x, w) = nodes;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mean_q: f64 = x.iter().zip(w).map(|(&xi, &wi)| wi * q(sqrt2 * sigma * xi)).sum::<f64>() / PI.sqrt();
    let shift = 2.0 * (t * beta).sqrt();
    let mut acc = LseAcc::new();
    for (&xi, &wi) in x.iter().zip(w) {
        let n1 = sqrt2 * sigma * xi;
        for (&zj, &wj) in x.iter().zip(w) {
            let arg = n1 - shift * sqrt2 * zj;
            acc.push(wi.ln() + wj.ln() - q(arg) * LN_2);
        }
    }
    let log2_mean = (acc.value() - PI.ln()) / LN_2;
    (mean_q, log2_mean)
}

/// Per-user limit for an arbitrary test function `q` and Gaussian noise
/// `N₁ ~ N(0, noise_std²)`:
/// `1 − sup_t [H(t) + ((1−λ)/β)(E q(N₁) + log E 2^{−q(N₁ − 2√(tβ)Z)})]`.
///
/// Expectations use a 64-node Gauss–Hermite rule in each variable; the
/// result is recomputed at order 128 and the difference is reported as the
/// quadrature error.
pub fn lb_asym_general_noise(
    beta: f64,
    lambda: f64,
    q: &dyn Fn(f64) -> f64,
    noise_std: f64,
) -> Result<BoundResult> {
    check_beta_lambda(beta, lambda)?;
    if !(noise_std > 0.0) {
        return Err(Error::InvalidParameter(format!("noise_std must be positive, got {noise_std}")));
    }
    let k = (1.0 - lambda) / beta;
    let solve = |order: usize| {
        let nodes = gauss_hermite(order);
        maximize_grid(
            |t| {
                let (a, b) = general_noise_terms(q, noise_std, beta, t, &nodes);
                binary_entropy(t) + k * (a + b)
            },
            0.0,
            1.0,
            64,
            false,
        )
    };
    let coarse = solve(64);
    if !coarse.value.is_finite() {
        return Err(Error::Numerical("quadrature overflow for the supplied q".into()));
    }
    let fine = solve(128);
    let mut r = BoundResult::asymptotic(BoundId::LbAsymGeneralNoise, 1.0 - fine.value);
    r.witnesses.t = Some(fine.x);
    r.diagnostics.quadrature_error = Some((fine.value - coarse.value).abs());
    r.diagnostics.boundary_hit = fine.at_boundary;
    r.diagnostics.evaluations = coarse.evals + fine.evals;
    Ok(r)
}

/// `I(x) = sup_{t < 1/4} { x t + ln √(1 − 4t) }` by numerical maximisation
/// (substituting `u = 1 − 4t`).
pub fn real_real_rate_function(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let best = maximize_grid(|u| x * (1.0 - u) / 4.0 + 0.5 * u.ln(), 1e-12, 1e12, 96, true);
    best.value
}

/// Stationary-point form of [`real_real_rate_function`]:
/// `I(x) = x/4 − 1/2 − ln(x/2)/2`, minimised (zero) at `x = 2`.
pub fn real_real_rate_function_closed(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    x / 4.0 - 0.5 - 0.5 * (x / 2.0).ln()
}

/// Per-user real-input/real-signature limit at a caller-supplied `γ ≥ 0`:
/// `log e · sup_{x ≥ 0} { F(x) − I(x) }` with `F(x) = −ln(1 + γ + 2γηβx)/(2β)`.
///
/// `lambda` is accepted for interface symmetry but does not enter the
/// formula; a diagnostic note records this.
pub fn lb_asym_real_real(beta: f64, lambda: f64, eta: f64, gamma: f64) -> Result<BoundResult> {
    check_beta_lambda(beta, lambda)?;
    if !(eta >= 0.0) || !(gamma >= 0.0) || !eta.is_finite() || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("need eta >= 0 and gamma >= 0 (eta={eta}, gamma={gamma})")));
    }
    let f = |x: f64| -(gamma + 2.0 * gamma * eta * beta * x).ln_1p() / (2.0 * beta);
    let best = maximize_grid(|x| f(x) - real_real_rate_function(x), 1e-6, 1e6, 96, true);
    let closed = f(best.x) - real_real_rate_function_closed(best.x);
    let mut r = BoundResult::asymptotic(BoundId::LbAsymRealReal, LOG2_E * best.value);
    r.witnesses.gamma = Some(gamma);
    r.witnesses.x = Some(best.x);
    r.diagnostics.boundary_hit = best.at_boundary;
    r.diagnostics.evaluations = best.evals;
    r.diagnostics.quadrature_error = Some((closed - best.value).abs());
    r.diagnostics.notes.push("lambda does not enter this formula; gamma is caller-supplied".into());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(lb_asym_binary_noiseless(0.25, 0.5).unwrap().per_user_bits, 1.0);
        assert_eq!(lb_asym_binary_noiseless(1.0, 0.0).unwrap().per_user_bits, 0.5);
        assert_eq!(ub_asym_noiseless(1.0, 0.3).unwrap().per_user_bits, 0.5);
        assert!(lb_asym_binary_noiseless(0.0, 1.0).is_err());
    }

    #[test]
    fn full_delay_gaussian_is_zero() {
        let r = lb_asym_gaussian(1.0, 1.0, 1.0).unwrap();
        assert!(r.per_user_bits.abs() < 1e-9);
    }

    #[test]
    fn rate_function_minimum() {
        assert!(real_real_rate_function_closed(2.0).abs() < 1e-15);
        assert!((real_real_rate_function(3.0) - real_real_rate_function_closed(3.0)).abs() < 1e-9);
    }
}
