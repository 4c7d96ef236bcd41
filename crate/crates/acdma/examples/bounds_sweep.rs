//! Lower and upper sum-capacity bounds for 64 chips as the delay spread grows.

use acdma::bounds::{lb_binary_awgn, lb_binary_noiseless, ub_conjectured_noiseless, ub_conjectured_noisy};
use acdma::model::{ebn0_db_to_eta, InputAlphabet};

fn main() -> acdma::Result<()> {
    let (m, n) = (64, 64);
    let eta = ebn0_db_to_eta(12.0);
    println!("noiseless upper bound: {:.3} bits", ub_conjectured_noiseless(m, n)?.total_bits.unwrap_or(f64::NAN));
    println!("noisy upper bound at 12 dB: {:.3} bits", ub_conjectured_noisy(m, n, eta, InputAlphabet::Binary)?.total_bits.unwrap_or(f64::NAN));
    println!("{:>8} {:>12} {:>12} {:>10}", "tau_max", "noiseless", "awgn 12dB", "gamma*");
    for tau in [0, 16, 32, 38, 48, 56, 64] {
        let clean = lb_binary_noiseless(m, n, tau)?;
        let noisy = lb_binary_awgn(m, n, tau, eta, None)?;
        println!(
            "{tau:>8} {:>12.4} {:>12.4} {:>10.3e}",
            clean.total_bits.unwrap_or(f64::NAN),
            noisy.total_bits.unwrap_or(f64::NAN),
            noisy.witnesses.gamma.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
