//! Reproducible experiment recipes: configuration, execution and CSV output.

mod config;
mod plotdata;
mod recipes;

pub use config::{validate_config, CodeChoice, ExperimentSpec, Grid, Overrides, Recipe, Task};
pub use plotdata::{emit_plotdata, MISSING};
pub use recipes::{
    fig1_users, run_recipe, sigma_for_eta, users_for_zeta, RunManifest, RunOutput, TaskSeed, BER_HEADER,
    BOUNDS_HEADER, DEFAULT_FRAMES, FRAME_CAP, TABLE_HEADER,
};

use crate::bounds::{
    lb_binary_awgn, lb_binary_noiseless, lb_binary_quaternary_noiseless, lb_binary_real_awgn, lb_real_real_awgn,
    lb_ternary_ain, ub_conjectured_noiseless, ub_conjectured_noisy, BoundId, BoundResult,
};
use crate::error::{invalid, Result};
use crate::model::InputAlphabet;

/// Evaluate a finite bound at `(m, n, τ_max, η)`; `eta` is ignored by the
/// noiseless formulas. Asymptotic formulas take different arguments and are
/// rejected here.
pub fn evaluate_bound(id: BoundId, m: usize, n: usize, tau_max: usize, eta: f64) -> Result<BoundResult> {
    match id {
        BoundId::LbBinaryNoiseless => lb_binary_noiseless(m, n, tau_max),
        BoundId::LbBinaryQuaternaryNoiseless => lb_binary_quaternary_noiseless(m, n, tau_max),
        BoundId::LbTernaryAin => lb_ternary_ain(m, n, tau_max),
        BoundId::LbBinaryAwgn => lb_binary_awgn(m, n, tau_max, eta, None),
        BoundId::LbBinaryRealAwgn => lb_binary_real_awgn(m, n, tau_max, eta),
        BoundId::LbRealRealAwgn => lb_real_real_awgn(m, n, tau_max, eta),
        BoundId::UbConjecturedNoiseless => ub_conjectured_noiseless(m, n),
        BoundId::UbConjecturedNoisy => ub_conjectured_noisy(m, n, eta, InputAlphabet::Binary),
        other => invalid(format!("{other} is an asymptotic formula; it takes (zeta | beta, lambda, noise) instead of (m, n, tau_max)")),
    }
}
