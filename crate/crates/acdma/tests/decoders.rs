use acdma::codes::{build_code_for, CodeLibrary};
use acdma::decoders::lattice::{exhaustive, sphere};
use acdma::decoders::{
    ber_trial, gold_like_signatures, gold_sequences, ist_decode, map_decode, ooc_signatures, pseudo_gold_signatures,
    wilson_interval, BaselineKind, BerSetup, DecoderConfig, DecoderKind, DelaySampler,
};
use acdma::model::{build_channel_with, derive_rng, DelayProfile, SystemParams};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

fn periodic(a: &[i8], b: &[i8], t: usize) -> i64 {
    let m = a.len();
    (0..m).map(|r| i64::from(a[r]) * i64::from(b[(r + t) % m])).sum()
}

#[test]
fn gold_family_is_three_valued() {
    for r in [3u32, 5, 7] {
        let seqs = gold_sequences(r).unwrap();
        let m = (1usize << r) - 1;
        assert_eq!(seqs.len(), m + 2);
        let t = 1 + (1i64 << ((r + 2) / 2));
        let allowed = [-1, -t, t - 2];
        for (i, a) in seqs.iter().enumerate() {
            assert_eq!(a.len(), m);
            for (j, b) in seqs.iter().enumerate() {
                for s in 0..m {
                    if i == j && s == 0 {
                        continue;
                    }
                    let c = periodic(a, b, s);
                    assert!(allowed.contains(&c), "r={r}: correlation {c} of ({i},{j}) at shift {s}");
                }
            }
        }
    }
}

#[test]
fn ooc_correlations_are_at_most_one() {
    let set = ooc_signatures(32, 13, 2).unwrap();
    let sig = &set.signatures;
    let cols: Vec<Vec<i8>> = (0..sig.users()).map(|c| sig.column_re(c).iter().map(|&v| v as i8).collect()).collect();
    for (i, a) in cols.iter().enumerate() {
        assert_eq!(a.iter().filter(|&&v| v == 1).count(), 2);
        for (j, b) in cols.iter().enumerate() {
            for s in 0..32 {
                if i == j && s == 0 {
                    continue;
                }
                assert!(periodic(a, b, s) <= 1, "words {i},{j} overlap twice at shift {s}");
            }
        }
    }
    assert!(ooc_signatures(8, 10, 2).is_err());
}

#[test]
fn pseudo_gold_meets_its_reported_threshold() {
    let set = pseudo_gold_signatures(7, 4).unwrap();
    let sig = &set.signatures;
    let cols: Vec<Vec<i8>> = (0..4).map(|c| sig.column_re(c).iter().map(|&v| v.signum() as i8).collect()).collect();
    let mut worst = 0;
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            for s in 0..7 {
                if i != j || s != 0 {
                    worst = worst.max(periodic(a, b, s).abs());
                }
            }
        }
    }
    assert_eq!(worst, set.max_correlation);
    assert!(gold_like_signatures(30, 4, BaselineKind::Gold).is_err());
}

#[test]
fn sphere_search_matches_enumeration() {
    let mut rng = derive_rng(11, 0);
    for trial in 0..300 {
        let n = rng.random_range(2..=12);
        let rows = rng.random_range(1..=2 * n);
        let sym = if trial % 2 == 0 { [-1, 1] } else { [0, 1] };
        let a = DMatrix::from_fn(rows, n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
        let y = DVector::from_fn(rows, |_, _| 3.0 * rng.sample::<f64, _>(StandardNormal));
        let e = exhaustive(&a, &y, sym);
        let s = sphere(&a, &y, sym).unwrap();
        assert!((e.dist - s.dist).abs() < 1e-9 * (1.0 + e.dist), "trial {trial}: {} vs {}", e.dist, s.dist);
    }
}

fn fig5_setup(lib: &mut CodeLibrary, db: f64, kind: DecoderKind) -> (acdma::codes::BuiltCode, SystemParams, DecoderConfig) {
    let code = build_code_for(lib, 7, 3, Some(4)).unwrap();
    let params = SystemParams::new(7, 4, 3, acdma::model::ebn0_db_to_eta(db)).unwrap();
    (code, params, DecoderConfig::new(kind))
}

#[test]
fn zero_snr_is_a_coin_flip() {
    let mut lib = CodeLibrary::default();
    let (code, mut params, decoder) = fig5_setup(&mut lib, 0.0, DecoderKind::PseudoMl);
    params.eta = 0.0;
    let setup = BerSetup { signatures: &code.signatures, params, delays: DelaySampler::Uniform, decoder, interval_block: None };
    let c = ber_trial(&setup, 20_000, &mut derive_rng(1, 1)).unwrap();
    let (lo, hi) = c.ci95();
    assert!(lo < 0.5 && 0.5 < hi, "BER {} with CI ({lo}, {hi})", c.ber());
}

#[test]
fn high_snr_is_errorless_for_every_decoder() {
    let mut lib = CodeLibrary::default();
    for kind in [DecoderKind::PseudoMl, DecoderKind::Gpml, DecoderKind::Map, DecoderKind::Ist] {
        let (code, params, decoder) = fig5_setup(&mut lib, 40.0, kind);
        let setup =
            BerSetup { signatures: &code.signatures, params, delays: DelaySampler::Uniform, decoder, interval_block: None };
        let c = ber_trial(&setup, 2_000, &mut derive_rng(2, 2)).unwrap();
        if kind == DecoderKind::Ist {
            // IST ignores the interference it cannot see; it need not be errorless.
            assert!(c.ber() < 0.05, "ist BER {}", c.ber());
        } else {
            assert_eq!(c.bit_errors, 0, "{kind} made errors at 40 dB");
        }
    }
}

#[test]
fn ber_trial_is_reproducible() {
    let mut lib = CodeLibrary::default();
    let (code, params, decoder) = fig5_setup(&mut lib, 4.0, DecoderKind::Gpml);
    let setup = BerSetup { signatures: &code.signatures, params, delays: DelaySampler::Uniform, decoder, interval_block: None };
    let a = ber_trial(&setup, 500, &mut derive_rng(9, 4)).unwrap();
    let b = ber_trial(&setup, 500, &mut derive_rng(9, 4)).unwrap();
    assert_eq!(a, b);
    assert!(ber_trial(&setup, 0, &mut derive_rng(9, 4)).is_err());
}

#[test]
fn wilson_interval_reference_values() {
    // k = 0: upper limit z²/(n + z²).
    let z = 1.959_963_984_540_054;
    let (lo, hi) = wilson_interval(0, 100, z);
    assert_eq!(lo, 0.0);
    assert!((hi - z * z / (100.0 + z * z)).abs() < 1e-12);
    let (lo, hi) = wilson_interval(50, 100, z);
    assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
}

#[test]
fn map_prefers_the_true_input_without_noise() {
    let mut lib = CodeLibrary::default();
    let code = build_code_for(&mut lib, 7, 3, Some(4)).unwrap();
    let d = DelayProfile::new(vec![3, 0, 2, 1]);
    let ch = build_channel_with(&code.signatures, &d, 1.0, 0.0).unwrap();
    let xp = [1, -1, -1, 1];
    let xc = [-1, -1, 1, 1];
    let out = map_decode(&ch.mean(&xp, &xc), &ch, [-1, 1]).unwrap();
    assert_eq!(out.x_hat, xc);
}

#[test]
fn ist_recovers_orthogonal_signatures() {
    // Synchronous Walsh codes: CᵀC = 4I, IST with relaxation 1/4 is exact.
    let chips: Vec<i8> = vec![1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1];
    let sig =
        acdma::model::SignatureMatrix::from_chips(4, 4, acdma::model::SignatureAlphabet::Real, &chips).unwrap();
    let ch = build_channel_with(&sig, &DelayProfile::zeros(4), 2.0, 0.0).unwrap();
    let x = [1, -1, -1, 1];
    let y = ch.mean(&[1, 1, 1, 1], &x);
    let g = (ch.c_p.transpose() * &ch.c_p) / (ch.gain * ch.gain);
    let relax = 1.0 / g[(0, 0)];
    let cfg = DecoderConfig { lambda_relax: relax, ..DecoderConfig::new(DecoderKind::Ist) };
    assert_eq!(ist_decode(&y, &ch, &cfg).unwrap().x_hat, x);
}
