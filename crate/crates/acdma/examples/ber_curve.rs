//! A short bit-error-rate curve: proposed code against pseudo-Gold sequences.

use acdma::codes::{build_code_for, CodeLibrary};
use acdma::decoders::{ber_trial, pseudo_gold_signatures, BerSetup, DecoderConfig, DecoderKind, DelaySampler};
use acdma::model::{derive_rng, ebn0_db_to_eta, SystemParams};

fn main() -> acdma::Result<()> {
    let mut lib = CodeLibrary::default();
    let proposed = build_code_for(&mut lib, 7, 3, Some(4))?.signatures;
    let baseline = pseudo_gold_signatures(7, 4)?.signatures;
    let frames = 5_000;

    println!("snr_db  proposed     pseudo-gold");
    for (i, db) in [0.0, 4.0, 8.0, 12.0, 16.0].into_iter().enumerate() {
        let params = SystemParams::new(7, 4, 3, ebn0_db_to_eta(db))?;
        let mut row = Vec::new();
        for (j, sig) in [&proposed, &baseline].into_iter().enumerate() {
            let setup = BerSetup {
                signatures: sig,
                params,
                delays: DelaySampler::Uniform,
                decoder: DecoderConfig::new(DecoderKind::PseudoMl),
                interval_block: None,
            };
            let count = ber_trial(&setup, frames, &mut derive_rng(2024, (2 * i + j) as u64))?;
            row.push(format!("{:.3e}", count.ber()));
        }
        println!("{db:>6}  {}", row.join("    "));
    }
    Ok(())
}
