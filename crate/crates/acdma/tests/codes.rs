use std::collections::HashSet;

use acdma::codes::zerosum::{ZsColumn, ZsOutcome, ZsProblem, ZsSolver};
use acdma::codes::{
    build_a_compose, build_d_double, chain_a, chain_a_tilde, impossibility, is_counterexample, read_matrix, rotate,
    search_base, verify, write_matrix, CertifiedMatrix, CodeLibrary, CodeMatrix, SearchConfig, SearchOutcome,
    VerifyConfig, VerifyMode, HALF_STEPS, QUARTER_STEPS,
};
use acdma::model::{derive_rng, Family, Method, SignatureAlphabet};
use acdma::Error;
use rand::Rng;

/// Every shift tuple with entries in `0..=hi`.
fn shift_tuples(n: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=hi).map(move |t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    out
}

/// Direct check of the family property: apply every rotation and compare
/// all images pairwise (through a hash set).
fn injective_by_enumeration(w: &CertifiedMatrix) -> bool {
    let (m, n) = (w.rows(), w.cols());
    let hi = w.s.min(m - 1);
    let signed = w.family == Family::B;
    let inputs: Vec<Vec<i8>> = (0..1usize << n)
        .map(|i| {
            (0..n)
                .map(|b| match w.family {
                    Family::ATilde | Family::D => (i >> b & 1) as i8,
                    _ => 2 * (i >> b & 1) as i8 - 1,
                })
                .collect()
        })
        .collect();
    for shifts in shift_tuples(n, hi) {
        let cols: Vec<Vec<i8>> = (0..n).map(|c| rotate(w.matrix.col(c), shifts[c], signed)).collect();
        let mut seen = HashSet::new();
        for x in &inputs {
            let img: Vec<i32> = (0..m)
                .map(|r| (0..n).map(|c| i32::from(cols[c][r]) * i32::from(x[c])).sum::<i32>())
                .collect();
            if w.family == Family::D {
                // Over GF(2): no nonzero input may reach all-zero or all-one.
                let bits: Vec<i32> = img.iter().map(|v| v.rem_euclid(2)).collect();
                let nonzero = x.iter().any(|&v| v != 0);
                if nonzero && (bits.iter().all(|&b| b == 0) || bits.iter().all(|&b| b == 1)) {
                    return false;
                }
            } else if !seen.insert(img) {
                return false;
            }
        }
    }
    true
}

#[test]
fn small_chain_outputs_are_injective_by_enumeration() {
    let mut lib = CodeLibrary::default();
    let mut checked = Vec::new();
    let mut candidates: Vec<CertifiedMatrix> = Vec::new();
    candidates.extend(chain_a(&mut lib, HALF_STEPS).unwrap());
    candidates.extend(chain_a(&mut lib, QUARTER_STEPS).unwrap());
    candidates.extend(chain_a_tilde(&mut lib, HALF_STEPS).unwrap());
    for (m, k, s) in [(2, 1, 2), (4, 2, 4), (3, 2, 3), (6, 4, 6), (8, 4, 8)] {
        candidates.push(lib.base(Family::B, m, k, s).unwrap());
    }
    candidates.push(lib.base(Family::D, 2, 1, 2).unwrap());
    let d4 = build_d_double(&lib.base(Family::D, 2, 1, 2).unwrap()).unwrap();
    candidates.push(build_d_double(&d4).unwrap());
    candidates.push(d4);
    for w in candidates {
        let hi = w.s.min(w.rows() - 1) as u64;
        if w.cols() > 8 || (hi + 1).pow(w.cols() as u32) > 10_000 {
            continue;
        }
        assert!(injective_by_enumeration(&w), "{} fails the direct check", w.label());
        checked.push(w.label());
    }
    assert!(checked.len() >= 10, "only checked {checked:?}");
}

#[test]
fn enumeration_oracle_rejects_a_broken_matrix() {
    // Two equal columns collide at equal shifts.
    let m = CodeMatrix::from_rows(&[&[1, 1], &[1, 1], &[-1, -1]]).unwrap();
    let cert = acdma::model::Certificate { family: Family::A, s: 2, method: Method::Exhaustive, seed: 0, trials: 0 };
    let w = CertifiedMatrix { matrix: m.clone(), family: Family::A, s: 2, cert, provenance: acdma::codes::Provenance::Literal };
    assert!(!injective_by_enumeration(&w));
    let v = verify(&m, Family::A, 2, VerifyMode::Exhaustive, &VerifyConfig::default()).unwrap();
    assert!(!v.holds);
    assert!(is_counterexample(&m, Family::A, 2, v.counterexample.as_ref().unwrap()));
}

fn brute_zero_sum(p: &ZsProblem) -> bool {
    // Each column: skip (if not forced) or pick ± one representative.
    fn go(p: &ZsProblem, i: usize, acc: &mut Vec<i32>, used: bool) -> bool {
        if i == p.cols.len() {
            return used && acc.iter().all(|&v| v == 0);
        }
        let c = &p.cols[i];
        if !c.forced && go(p, i + 1, acc, used) {
            return true;
        }
        for r in &c.reps {
            for sign in [1, -1] {
                acc.iter_mut().zip(r).for_each(|(a, &x)| *a += sign * x);
                let hit = go(p, i + 1, acc, true);
                acc.iter_mut().zip(r).for_each(|(a, &x)| *a -= sign * x);
                if hit {
                    return true;
                }
            }
        }
        false
    }
    go(p, 0, &mut vec![0; p.dim], false)
}

#[test]
fn fold_reduction_agrees_with_brute_force() {
    let mut rng = derive_rng(31, 0);
    let (mut found, mut none) = (0, 0);
    for trial in 0..600 {
        let dim = [4, 6, 8][trial % 3];
        let ncols = rng.random_range(2..=6);
        let nreps = rng.random_range(1..=3);
        let alphabet: &[i32] = if trial % 2 == 0 { &[-1, 1] } else { &[-1, 0, 1] };
        let cols = (0..ncols)
            .map(|id| {
                let mut c = ZsColumn::new(id, trial % 7 == 0 && id == 0);
                let base: Vec<i32> = (0..dim).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect();
                for k in 0..nreps {
                    let rotated: Vec<i32> = (0..dim).map(|r| base[(r + k) % dim]).collect();
                    c.push(rotated, (k, 1));
                }
                c
            })
            .collect();
        let p = ZsProblem { dim, cols };
        let expect = brute_zero_sum(&p);
        let mut solver = ZsSolver::new(u64::MAX);
        solver.fold_threshold = 0;
        let got = solver.solve(&p).unwrap();
        match got {
            ZsOutcome::Found(w) => {
                assert!(expect, "trial {trial}: solver found a zero sum the oracle denies");
                let mut acc = vec![0i32; dim];
                let mut ids = HashSet::new();
                for (id, o, s) in &w.picks {
                    assert!(ids.insert(*id), "column used twice");
                    let c = p.cols.iter().find(|c| c.id == *id).unwrap();
                    let k = c.origin.iter().position(|&(oo, _)| oo == *o).unwrap();
                    let sign = i32::from(*s) * i32::from(c.origin[k].1);
                    acc.iter_mut().zip(&c.reps[k]).for_each(|(a, &x)| *a += sign * x);
                }
                assert!(!w.picks.is_empty() && acc.iter().all(|&v| v == 0), "trial {trial}: bad witness");
                found += 1;
            }
            ZsOutcome::NoZeroSum => {
                assert!(!expect, "trial {trial}: solver missed a zero sum");
                none += 1;
            }
        }
    }
    assert!(found > 50 && none > 50, "unbalanced sample: {found} found, {none} none");
}

#[test]
fn doubling_needs_certified_inputs() {
    let mut lib = CodeLibrary::default();
    let a = lib.base(Family::A, 2, 2, 2).unwrap();
    let d = lib.base(Family::D, 2, 1, 2).unwrap();
    // W2 must be a B matrix.
    assert!(matches!(build_a_compose(&a, &a, &d), Err(Error::Precondition(_))));
    assert!(matches!(build_d_double(&a), Err(Error::Precondition(_))));
}

#[test]
fn chain_sizes_follow_the_doubling_counts() {
    let mut lib = CodeLibrary::default();
    let half: Vec<(usize, usize)> = chain_a(&mut lib, HALF_STEPS).unwrap().iter().map(|w| (w.rows(), w.cols())).collect();
    assert_eq!(half, vec![(2, 2), (4, 4), (8, 9), (16, 20), (32, 41)]);
    let quarter: Vec<(usize, usize)> =
        chain_a(&mut lib, QUARTER_STEPS).unwrap().iter().map(|w| (w.rows(), w.cols())).collect();
    assert_eq!(quarter, vec![(3, 2), (6, 5), (12, 12), (24, 24), (48, 48)]);
    for w in chain_a_tilde(&mut lib, HALF_STEPS).unwrap() {
        assert!(w.matrix.all_in(&[0, 1]));
        assert_eq!(w.family, Family::ATilde);
    }
}

#[test]
fn search_finds_a_b_matrix_and_reports_impossible_shapes() {
    let cfg = SearchConfig { seed: 7, ..SearchConfig::default() };
    let found = search_base(Family::B, 6, 4, 6, &cfg).unwrap().found().expect("B(6,4,6)");
    assert_eq!(found.cert.method, Method::Exhaustive);
    let v = verify(&found.matrix, Family::B, 6, VerifyMode::Exhaustive, &VerifyConfig::default()).unwrap();
    assert!(v.holds);
    assert!(impossibility(Family::D, 4, 4, 4).is_some());
    assert!(matches!(
        search_base(Family::D, 4, 4, 4, &cfg).unwrap(),
        SearchOutcome::NotFound(acdma::codes::NotFound::Impossible(_))
    ));
}

#[test]
fn randomized_verification_finds_planted_collisions() {
    let mut lib = CodeLibrary::default();
    let a = lib.a_matrix(8).unwrap();
    // Flip one entry of a copy until the property breaks.
    let mut rng = derive_rng(3, 0);
    let strict = VerifyConfig::default();
    loop {
        let (r, c) = (rng.random_range(0..8), rng.random_range(0..a.cols()));
        let mut rows: Vec<Vec<i8>> = (0..8).map(|i| (0..a.cols()).map(|j| a.matrix.get(i, j)).collect()).collect();
        rows[r][c] = -rows[r][c];
        let refs: Vec<&[i8]> = rows.iter().map(Vec::as_slice).collect();
        let m = CodeMatrix::from_rows(&refs).unwrap();
        let ex = verify(&m, Family::A, 8, VerifyMode::Exhaustive, &strict).unwrap();
        if ex.holds {
            continue;
        }
        let cfg = VerifyConfig { trials: 2_000_000, seed: 1, ..strict };
        let rnd = verify(&m, Family::A, 8, VerifyMode::Randomized, &cfg).unwrap();
        if let Some(cx) = &rnd.counterexample {
            assert!(is_counterexample(&m, Family::A, 8, cx));
        }
        assert!(is_counterexample(&m, Family::A, 8, ex.counterexample.as_ref().unwrap()));
        break;
    }
}

#[test]
fn matrix_files_round_trip() {
    let mut lib = CodeLibrary::default();
    let w = lib.a_tilde_matrix(8).unwrap();
    let text = write_matrix(&w.matrix, SignatureAlphabet::Optical, Some(&w.cert));
    let back = read_matrix(&text).unwrap();
    assert_eq!(back.matrix, w.matrix);
    assert_eq!(back.alphabet, SignatureAlphabet::Optical);
    assert_eq!(back.certificate, Some(w.cert.clone()));

    // Corrupt one entry of the last matrix row.
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.last_mut().unwrap();
    *last = last.replacen('0', "7", 1);
    let bad = lines.join("\n");
    let e = read_matrix(&bad).unwrap_err();
    assert!(matches!(e, Error::Parse { .. }), "{e:?}");
}
