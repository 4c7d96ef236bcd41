use std::cell::RefCell;
use std::f64::consts::LN_2;

use statrs::function::gamma::ln_gamma;

use super::{check_eta, check_finite_params, BoundId, BoundResult, GAMMA_HI, GAMMA_LO};
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::{log_convolve, maximize_log_grid, LnFactorial, LseAcc, LOG2_E};

/// Shared core of the binary-signature noiseless bounds:
/// `n − log2 Σ_j C(n,2j) (C(2j,j)/4^j)^e`.
fn binary_noiseless_core(n: usize, exponent: f64) -> f64 {
    let lf = LnFactorial::new(n);
    let mut acc = LseAcc::new();
    for j in 0..=n / 2 {
        let central = lf.ln_binom(2 * j, j) - 2.0 * j as f64 * LN_2;
        let term = if exponent == 0.0 { 0.0 } else { exponent * central };
        acc.push(lf.ln_binom(n, 2 * j) + term);
    }
    n as f64 - acc.value() / LN_2
}

/// Binary inputs and binary signatures, no noise.
pub fn lb_binary_noiseless(m: usize, n: usize, tau_max: usize) -> Result<BoundResult> {
    check_finite_params(m, n, tau_max)?;
    let total = binary_noiseless_core(n, (m - tau_max) as f64);
    let mut r = BoundResult::finite(BoundId::LbBinaryNoiseless, n, total);
    r.diagnostics.evaluations = n / 2 + 1;
    Ok(r)
}

/// Binary inputs and quaternary (`±1, ±j`) signatures, no noise.
///
/// Real and imaginary parts act as two independent chip streams, which
/// doubles the exponent of the binary-signature sum.
pub fn lb_binary_quaternary_noiseless(m: usize, n: usize, tau_max: usize) -> Result<BoundResult> {
    check_finite_params(m, n, tau_max)?;
    let total = binary_noiseless_core(n, 2.0 * (m - tau_max) as f64);
    let mut r = BoundResult::finite(BoundId::LbBinaryQuaternaryNoiseless, n, total);
    r.diagnostics.evaluations = n / 2 + 1;
    Ok(r)
}

/// Binary inputs and ternary signatures built from algebraically
/// independent numbers, no noise.
pub fn lb_ternary_ain(m: usize, n: usize, tau_max: usize) -> Result<BoundResult> {
    check_finite_params(m, n, tau_max)?;
    let p = (m - tau_max) as f64;
    let kmax = n / 2;
    let lf = LnFactorial::new(n);
    // ln Σ_{a+b+c=k} 1/(a! b! c!)² by two log-domain convolutions.
    let b: Vec<f64> = (0..=kmax).map(|j| -2.0 * lf.ln_fact(j)).collect();
    let bb = log_convolve(&b, &b, kmax + 1);
    let bbb = log_convolve(&bb, &b, kmax + 1);
    let ln3 = 3f64.ln();
    let mut acc = LseAcc::new();
    for k in 0..=kmax {
        let ln_multi = lf.ln_fact(n) - 2.0 * lf.ln_fact(k) - lf.ln_fact(n - 2 * k);
        let inner = 2.0 * lf.ln_fact(k) + bbb[k] - 2.0 * k as f64 * ln3;
        let term = if p == 0.0 { 0.0 } else { p * inner };
        acc.push(ln_multi - (n + 2 * k) as f64 * LN_2 + term);
    }
    let total = -acc.value() / LN_2;
    let mut r = BoundResult::finite(BoundId::LbTernaryAin, n, total);
    r.diagnostics.evaluations = kmax + 1;
    Ok(r)
}

/// Penalty term `(γ log e − log(1+γ))`, nonnegative for `γ ≥ 0`.
fn chernoff_penalty(gamma: f64) -> f64 {
    gamma * LOG2_E - gamma.ln_1p() * LOG2_E
}

/// Binary-input, binary-signature AWGN bound at a fixed `γ`.
///
/// The window keeps `p = m − τ_max` chips and the gain is `r = √(2η)`:
/// `−(p/2)(γ log e − log(1+γ)) − log Σ_k C(n,k)/2ⁿ (Σ_j C(k,j)/2ᵏ e^{−2γr²(2j−k)²/((1+γ)m)})^p`.
pub fn lb_binary_awgn_at(m: usize, n: usize, tau_max: usize, eta: f64, gamma: f64) -> Result<f64> {
    check_finite_params(m, n, tau_max)?;
    check_eta(eta)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let lf = LnFactorial::new(n);
    Ok(awgn_objective(&lf, m, n, tau_max, eta, gamma))
}

fn awgn_objective(lf: &LnFactorial, m: usize, n: usize, tau_max: usize, eta: f64, gamma: f64) -> f64 {
    let p = (m - tau_max) as f64;
    let r2 = 2.0 * eta;
    let a = 2.0 * gamma * r2 / ((1.0 + gamma) * m as f64);
    let mut outer = LseAcc::new();
    for k in 0..=n {
        let mut inner = LseAcc::new();
        let kf = k as f64;
        for j in 0..=k {
            let d = 2.0 * j as f64 - kf;
            inner.push(lf.ln_binom(k, j) - kf * LN_2 - a * d * d);
        }
        let lk = if p == 0.0 { 0.0 } else { p * inner.value() };
        outer.push(lf.ln_binom(n, k) - n as f64 * LN_2 + lk);
    }
    -(p / 2.0) * chernoff_penalty(gamma) - outer.value() / LN_2
}

/// Maximise `objective(γ)` over `γ ∈ [GAMMA_LO, GAMMA_HI]`, with `γ = 0`
/// (value 0) as a declared boundary alternative.
fn sup_over_gamma(
    id: BoundId,
    n: usize,
    objective: impl Fn(f64) -> f64,
) -> Result<BoundResult> {
    let failure: RefCell<Option<f64>> = RefCell::new(None);
    let best = maximize_log_grid(
        |g| {
            let v = objective(g);
            if !v.is_finite() && failure.borrow().is_none() {
                *failure.borrow_mut() = Some(g);
            }
            v
        },
        GAMMA_LO,
        GAMMA_HI,
    );
    if let Some(g) = *failure.borrow() {
        return Err(Error::Numerical(format!("{id} produced a non-finite value at gamma={g:e}")));
    }
    let mut r;
    if best.value > 0.0 {
        r = BoundResult::finite(id, n, best.value);
        r.witnesses.gamma = Some(best.x);
        r.diagnostics.boundary_hit = best.at_boundary;
    } else {
        r = BoundResult::finite(id, n, 0.0);
        r.witnesses.gamma = Some(0.0);
        r.diagnostics.boundary_hit = true;
        r.diagnostics.notes.push("supremum attained at the gamma = 0 boundary".into());
    }
    r.diagnostics.evaluations = best.evals;
    Ok(r)
}

/// Binary-input, binary-signature AWGN bound, optimised over `γ`
/// (or evaluated at `gamma` when supplied).
pub fn lb_binary_awgn(m: usize, n: usize, tau_max: usize, eta: f64, gamma: Option<f64>) -> Result<BoundResult> {
    check_finite_params(m, n, tau_max)?;
    check_eta(eta)?;
    if let Some(g) = gamma {
        let v = lb_binary_awgn_at(m, n, tau_max, eta, g)?;
        let mut r = BoundResult::finite(BoundId::LbBinaryAwgn, n, v);
        r.witnesses.gamma = Some(g);
        return Ok(r);
    }
    let lf = LnFactorial::new(n);
    sup_over_gamma(BoundId::LbBinaryAwgn, n, |g| awgn_objective(&lf, m, n, tau_max, eta, g))
}

fn binary_real_objective(lf: &LnFactorial, m: usize, n: usize, tau_max: usize, eta: f64, gamma: f64) -> f64 {
    let p = (m - tau_max) as f64;
    let mut acc = LseAcc::new();
    for k in 0..=n {
        let base = 1.0 + 8.0 * k as f64 * gamma * eta / m as f64;
        acc.push(lf.ln_binom(n, k) - n as f64 * LN_2 - (p / 2.0) * base.ln());
    }
    -p * chernoff_penalty(gamma) - acc.value() / LN_2
}

/// Binary inputs with real (Gaussian) signatures at a fixed `γ`.
pub fn lb_binary_real_awgn_at(m: usize, n: usize, tau_max: usize, eta: f64, gamma: f64) -> Result<f64> {
    check_finite_params(m, n, tau_max)?;
    check_eta(eta)?;
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be nonnegative, got {gamma}")));
    }
    Ok(binary_real_objective(&LnFactorial::new(n), m, n, tau_max, eta, gamma))
}

/// Binary inputs with real (Gaussian) signatures, optimised over `γ`.
pub fn lb_binary_real_awgn(m: usize, n: usize, tau_max: usize, eta: f64) -> Result<BoundResult> {
    check_finite_params(m, n, tau_max)?;
    check_eta(eta)?;
    let lf = LnFactorial::new(n);
    sup_over_gamma(BoundId::LbBinaryRealAwgn, n, |g| binary_real_objective(&lf, m, n, tau_max, eta, g))
}

/// `E[(1 + c·Y)^{−e}]` for `Y ~ χ²(n)`, by adaptive Gauss–Kronrod after the
/// substitutions `y = v²`, `v = u/(1−u)`.  Returns `(value, error estimate)`.
pub fn real_real_expectation(n: usize, c: f64, e: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("chi-square degrees of freedom must be positive".into()));
    }
    if e == 0.0 || c == 0.0 {
        return Ok((1.0, 0.0));
    }
    let nf = n as f64;
    let ln_norm = LN_2 - (nf / 2.0) * LN_2 - ln_gamma(nf / 2.0);
    let integrand = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let v = u / (1.0 - u);
        let ln_jac = -2.0 * (1.0 - u).ln();
        let ln_f = -e * (c * v * v).ln_1p() + (nf - 1.0) * v.ln() - v * v / 2.0 + ln_norm + ln_jac;
        ln_f.exp()
    };
    // Split at the density's bulk so the adaptive rule sees the peak.
    let mode = (nf - 1.0).max(0.5).sqrt();
    let u_mode = mode / (1.0 + mode);
    let lo = integrate(integrand, 0.0, u_mode, 1e-11, 1e-300)?;
    let hi = integrate(integrand, u_mode, 1.0, 1e-11, 1e-300)?;
    Ok((lo.value + hi.value, lo.abs_error + hi.abs_error))
}

fn real_real_objective(m: usize, n: usize, tau_max: usize, eta: f64, gamma: f64) -> Result<(f64, f64)> {
    let p = (m - tau_max) as f64;
    let c = 4.0 * gamma * eta / ((1.0 + gamma) * m as f64);
    let (ex, err) = real_real_expectation(n, c, p / 2.0)?;
    Ok((-(p / 2.0) * chernoff_penalty(gamma) - ex.log2(), err / ex))
}

/// Real inputs and real signatures at a fixed `γ`.
pub fn lb_real_real_awgn_at(m: usize, n: usize, tau_max: usize, eta: f64, gamma: f64) -> Result<f64> {
    check_finite_params(m, n, tau_max)?;
    check_eta(eta)?;
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be nonnegative, got {gamma}")));
    }
    Ok(real_real_objective(m, n, tau_max, eta, gamma)?.0)
}

/// Real inputs and real signatures, optimised over `γ`.  The mixing density
/// of the received signal norm is chi-square with `n` degrees of freedom.
pub fn lb_real_real_awgn(m: usize, n: usize, tau_max: usize, eta: f64) -> Result<BoundResult> {
    check_finite_params(m, n, tau_max)?;
    check_eta(eta)?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_err = RefCell::new(0.0f64);
    let mut r = sup_over_gamma(BoundId::LbRealRealAwgn, n, |g| {
        match real_real_objective(m, n, tau_max, eta, g) {
            Ok((v, e)) => {
                let mut w = worst_err.borrow_mut();
                *w = w.max(e);
                v
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if let Ok(res) = r.as_mut() {
        res.diagnostics.quadrature_error = Some(worst_err.into_inner());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_is_one_bit() {
        for m in [1, 4, 9] {
            assert!((lb_binary_noiseless(m, 1, 0).unwrap().total_bits.unwrap() - 1.0).abs() < 1e-12);
            assert!((lb_ternary_ain(m, 1, 0).unwrap().total_bits.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn awgn_zero_snr_is_zero() {
        let r = lb_binary_awgn(8, 4, 2, 0.0, None).unwrap();
        assert_eq!(r.total_bits, Some(0.0));
    }

    #[test]
    fn chi_square_normalisation() {
        for n in [1, 2, 5, 40] {
            // c → tiny: expectation → 1
            let (v, _) = real_real_expectation(n, 1e-12, 3.0).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "n={n} v={v}");
        }
    }
}
