use std::path::PathBuf;
use std::process::{Command, Output};

fn acdma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acdma")).args(args).output().expect("run acdma")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("acdma-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bounds_prints_csv() {
    let out = acdma(&["bounds", "--bound", "lb_binary_noiseless", "--m", "64", "--n", "64", "--tau", "38"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let total: f64 = row.split(',').nth(9).unwrap().parse().unwrap();
    assert!(total >= 63.0, "{text}");
}

#[test]
fn invalid_parameters_exit_with_two() {
    let out = acdma(&["bounds", "--bound", "lb_binary_noiseless", "--m", "64", "--n", "4", "--tau", "65"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_config_writes_nothing() {
    let dir = scratch("zero-frames");
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, "recipe = custom\ntask = ber\nm = 7\ntau_max = 3\nframes = 0\n").unwrap();
    let target = dir.join("out");
    let out = acdma(&["reproduce", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 5"), "{stderr}");
    assert!(!target.exists() || std::fs::read_dir(&target).unwrap().next().is_none());
}

#[test]
fn reproduce_writes_csv_plot_data_and_manifest() {
    let dir = scratch("fig2");
    let out = acdma(&["reproduce", "fig2", "--seed", "5", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> =
        std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert!(names.contains(&"fig2.csv".to_string()), "{names:?}");
    assert!(names.contains(&"fig2.dat".to_string()), "{names:?}");
    let manifest = names.iter().find(|n| n.contains("manifest")).expect("manifest file");
    // The manifest replays the same run.
    let again = scratch("fig2-again");
    let out = acdma(&[
        "reproduce",
        "--config",
        dir.join(manifest).to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(dir.join("fig2.csv")).unwrap(), std::fs::read(again.join("fig2.csv")).unwrap());
}

#[test]
fn codes_verify_flags_a_broken_matrix() {
    let dir = scratch("verify");
    let good = dir.join("a4.txt");
    let out = acdma(&["codes", "build", "--m", "7", "--tau", "3", "--out", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let ok = acdma(&["codes", "verify", "--family", "A", "--s", "4", "--mode", "exhaustive", "--in", good.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // Make two columns equal.
    let text = std::fs::read_to_string(&good).unwrap();
    let broken: String = text
        .lines()
        .map(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() >= 2 && !l.starts_with('#') && t.iter().all(|v| v.parse::<i8>().is_ok()) && t.len() == 4 {
                let mut t = t.clone();
                t[1] = t[0];
                t.join(" ")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, broken).unwrap();
    let no = acdma(&["codes", "verify", "--family", "A", "--s", "4", "--mode", "exhaustive", "--in", bad.to_str().unwrap()]);
    assert_eq!(no.status.code(), Some(1), "{}", String::from_utf8_lossy(&no.stdout));
}

#[test]
fn impossible_search_is_a_precondition_failure() {
    let out = acdma(&["codes", "search", "--family", "D", "--m", "4", "--n", "4", "--s", "4", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_search_budget_exits_with_three() {
    let out = acdma(&["codes", "search", "--family", "A", "--m", "8", "--n", "14", "--s", "8", "--seed", "1", "--budget", "50"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
