//! Build errorless signatures for a delay spread, then check the underlying
//! matrix two ways and save it in the plain-text matrix format.

use acdma::codes::{build_code_for, verify, write_matrix, CodeLibrary, VerifyConfig, VerifyMode};
use acdma::model::SignatureAlphabet;

fn main() -> acdma::Result<()> {
    let mut lib = CodeLibrary::default();
    let built = build_code_for(&mut lib, 32, 16, None)?;
    println!("{}", built.describe());

    let w = &built.code;
    let exact = verify(&w.matrix, w.family, w.s, VerifyMode::Exhaustive, &VerifyConfig::default())?;
    println!("exhaustive: holds={} work={}", exact.holds, exact.work);

    let cfg = VerifyConfig { trials: 200_000, seed: 3, ..VerifyConfig::default() };
    let sampled = verify(&w.matrix, w.family, w.s, VerifyMode::Randomized, &cfg)?;
    println!("randomized: holds={} ({} trials)", sampled.holds, cfg.trials);

    print!("{}", write_matrix(&w.matrix, SignatureAlphabet::Binary, Some(&w.cert)));
    Ok(())
}
