//! One noisy symbol period through every receiver.

use acdma::codes::{build_code_for, CodeLibrary};
use acdma::decoders::{decode, DecoderConfig, DecoderKind};
use acdma::model::{build_channel, derive_rng, random_symbols, transmit, DelayProfile, InputAlphabet, SystemParams};

fn main() -> acdma::Result<()> {
    let mut lib = CodeLibrary::default();
    let code = build_code_for(&mut lib, 7, 3, Some(4))?;
    let params = SystemParams::new(7, 4, 3, 10.0)?;
    let mut rng = derive_rng(1, 0);

    let delays = DelayProfile::random(&params, &mut rng);
    let ch = build_channel(&code.signatures, &delays, &params)?;
    let x_prev = random_symbols(InputAlphabet::Binary, 4, &mut rng);
    let x_cur = random_symbols(InputAlphabet::Binary, 4, &mut rng);
    let y = transmit(&ch, &x_prev, &x_cur, &mut rng)?;

    println!("delays {:?}, sent {x_cur:?}", delays.delays);
    for kind in [DecoderKind::PseudoMl, DecoderKind::Gpml, DecoderKind::Map, DecoderKind::Ist] {
        let out = decode(&y, &ch, params.tau_max, [-1, 1], &DecoderConfig::new(kind))?;
        println!("{kind:>4}: {:?} (score {:.3}, {} candidates)", out.x_hat, out.score, out.candidates_examined);
    }
    Ok(())
}
