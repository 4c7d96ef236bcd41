use acdma::experiment::{
    emit_plotdata, fig1_users, run_recipe, users_for_zeta, validate_config, ExperimentSpec, Grid, Recipe, BER_HEADER,
    BOUNDS_HEADER,
};
use acdma::Error;
use proptest::prelude::*;

fn issues(text: &str) -> Vec<String> {
    match validate_config(text) {
        Err(Error::Config(v)) => v.into_iter().map(|i| i.to_string()).collect(),
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn empty_file_names_the_missing_recipe() {
    let v = issues("");
    assert_eq!(v.len(), 1);
    assert!(v[0].contains("no recipe"), "{v:?}");
}

#[test]
fn delay_spread_beyond_the_symbol_is_rejected_with_its_line() {
    let v = issues("recipe = fig1\nseed = 3\n# comment\ntau_max = 0, 65\n");
    assert_eq!(v.len(), 1, "{v:?}");
    assert!(v[0].contains("line 4"), "{v:?}");
    assert!(v[0].contains("tau_max <= m"), "{v:?}");
}

#[test]
fn every_problem_is_reported_at_once() {
    let v = issues("recipe = fig5\nfrobnicate = 1\nframes = 0\nframes = 10\nm_values = 64\n");
    assert!(v.len() >= 4, "{v:?}");
    assert!(v.iter().any(|s| s.contains("frobnicate")));
    assert!(v.iter().any(|s| s.contains("first set on line 3")));
    assert!(v.iter().any(|s| s.contains("m_values")));
}

#[test]
fn custom_ber_with_zero_frames_fails_validation() {
    let v = issues("recipe = custom\ntask = ber\nm = 7\ntau_max = 3\nframes = 0\n");
    assert!(v.iter().any(|s| s.contains("frames")), "{v:?}");
}

#[test]
fn manifest_is_a_valid_configuration() {
    let mut spec = ExperimentSpec::new(Recipe::Fig3);
    spec.seed = 42;
    spec.overrides.n = Some(Grid::Range { start: 1.0, step: 1.0, end: 8.0 });
    spec.overrides.tau_max = Some(Grid::List(vec![0.0, 32.0]));
    let out = run_recipe(&spec).unwrap();
    let again = validate_config(&out.manifest.render()).unwrap();
    assert_eq!(again, spec);
    // Bound sweeps draw no random numbers, so there are no task streams to record.
    assert!(out.manifest.tasks.is_empty());
    assert!(!out.files.is_empty());
}

#[test]
fn recipes_are_deterministic() {
    let mut spec = ExperimentSpec::new(Recipe::Fig5);
    spec.seed = 77;
    spec.overrides.frames = Some(300);
    spec.overrides.snr_db = Some(Grid::List(vec![0.0, 6.0]));
    let a = run_recipe(&spec).unwrap();
    let b = run_recipe(&spec).unwrap();
    assert_eq!(a.files, b.files);
    assert!(a.files[0].1.starts_with(BER_HEADER));
    spec.seed = 78;
    let c = run_recipe(&spec).unwrap();
    assert_ne!(a.files, c.files);
}

#[test]
fn fig1_plot_data_has_one_column_per_series() {
    let out = run_recipe(&ExperimentSpec::new(Recipe::Fig1)).unwrap();
    let (name, csv) = &out.files[0];
    assert_eq!(name, "fig1.csv");
    assert!(csv.starts_with(BOUNDS_HEADER));
    let dat = emit_plotdata(csv, Recipe::Fig1, 0).unwrap();
    assert_eq!(dat, emit_plotdata(csv, Recipe::Fig1, 0).unwrap());
    let columns = dat.lines().find(|l| l.starts_with("# columns")).unwrap();
    let series = columns.matches('[').count();
    // Five delay spreads plus the upper bound.
    assert_eq!(series, 6, "{columns}");
    let rows: Vec<&str> = dat.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect();
    assert_eq!(rows.len(), fig1_users().len());
    for r in rows {
        let fields: Vec<&str> = r.split_whitespace().collect();
        assert_eq!(fields.len(), 1 + series, "{r}");
        for f in fields {
            assert!(f == "?" || f.parse::<f64>().is_ok_and(f64::is_finite), "bad field {f}");
        }
    }
}

#[test]
fn plot_data_rejects_malformed_csv() {
    let bad = format!("{BOUNDS_HEADER}\nlb_binary_noiseless,64,1,0,,,,,,NaN,NaN,,\n");
    assert!(emit_plotdata(&bad, Recipe::Fig1, 0).is_err());
}

#[test]
fn table_recipe_lists_the_literal_row() {
    let out = run_recipe(&ExperimentSpec::new(Recipe::Table1)).unwrap();
    let csv = &out.files[0].1;
    assert_eq!(csv.lines().count(), 6, "{csv}");
    assert!(csv.lines().nth(1).unwrap().starts_with("0,0,"), "{csv}");
    assert!(out.manifest.certificates.iter().any(|c| c.contains("EXHAUSTIVE")));
}

#[test]
fn zeta_fixed_point_is_consistent() {
    for m in [64, 256, 1024] {
        for z in [0.25, 1.0, 2.0] {
            let n = users_for_zeta(z, m);
            let back = (z * m as f64 * (n as f64).log2()).ceil() as usize;
            assert_eq!(back, n, "ζ={z}, m={m}");
        }
    }
}

fn arb_grid(lo: u32, hi: u32) -> impl Strategy<Value = Grid> {
    prop_oneof![
        prop::collection::vec(lo..=hi, 1..5).prop_map(|v| Grid::List(v.into_iter().map(f64::from).collect())),
        (lo..=hi, 1u32..4, 0u32..5).prop_map(|(a, s, k)| Grid::Range {
            start: f64::from(a),
            step: f64::from(s),
            end: f64::from(a + s * k)
        }),
    ]
}

proptest! {
    #[test]
    fn serialized_specs_parse_back(seed in any::<u64>(), m in 8usize..200, n in arb_grid(1, 300), snr in arb_grid(0, 30)) {
        let mut spec = ExperimentSpec::new(Recipe::Fig3);
        spec.seed = seed;
        spec.overrides.m = Some(m);
        spec.overrides.n = Some(n);
        spec.overrides.tau_max = Some(Grid::List(vec![0.0, (m / 2) as f64]));
        spec.overrides.snr_db = Some(snr);
        let text = spec.serialize();
        let back = validate_config(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn unknown_keys_never_validate(key in "[a-z]{3,8}") {
        prop_assume!(!["recipe", "seed", "out", "task", "bounds", "codes", "decoders", "users", "optical", "frames", "zeta", "lambda", "beta", "full"].contains(&key.as_str()));
        let text = format!("recipe = fig1\n{key} = 1\n");
        prop_assert!(validate_config(&text).is_err());
    }
}
