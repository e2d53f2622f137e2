use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use frac_ch::config::{parse_config, InitialProfile, RunConfig};

fn frac_ch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frac-ch"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) {
    fs::write(dir.join("cfg.txt"), text).unwrap();
}

#[test]
fn emitted_config_parses_back_identically() {
    let mut cfg = RunConfig::default();
    cfg.scheme.tau = 0.25;
    cfg.scheme.lambda = 0.0375;
    cfg.y0 = InitialProfile::Coefficients {
        values: vec![0.1, -0.2, 1e-3],
    };
    cfg.m0_bound = Some(7.5);
    cfg.contdep.eps = vec![1e-3, -2.5e-4];
    let text = cfg.emit();
    assert_eq!(parse_config(&text).unwrap(), cfg);
    assert_eq!(parse_config(&text).unwrap().emit(), text);
}

#[test]
fn zero_problem_gives_zero_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "steps = 8\noperator_a.n_modes = 8\noperator_b.n_modes = 8\n");
    let out = frac_ch(&["run", "--config", "cfg.txt", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    for line in csv.lines().skip(1) {
        // n and t excepted
        for field in line.split(',').skip(2) {
            assert_eq!(field.parse::<f64>().unwrap(), 0.0, "{line}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        "steps = 16\ny0 = bump:0.4:0.1\nforcing = ramp-mode:2:0.5\npotential.kind = logarithmic\nsnapshot_stride = 4\n",
    );
    for out in ["a", "b"] {
        for cmd in ["run", "sweep-lambda", "contdep"] {
            let o = frac_ch(&[cmd, "--config", "cfg.txt", "--out", out, "--levels", "1"], dir.path());
            assert!(o.status.code().is_some_and(|c| c <= 1), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert!(a == b, "{name:?} differs");
    }
}

#[test]
fn check_is_reproducible_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let first = frac_ch(&["check", "--out", "a", "--seed", "7"], dir.path());
    let second = frac_ch(&["check", "--out", "b", "--seed", "7"], dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(second.status.code(), Some(0));
    let a = fs::read(dir.path().join("a/check_summary.json")).unwrap();
    let b = fs::read(dir.path().join("b/check_summary.json")).unwrap();
    assert!(a == b);
    let summary: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["seed"], 7);
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "steps = 4\nbogus = 1\n");
    let out = frac_ch(&["run", "--config", "cfg.txt", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "config");
    assert_eq!(record["line"], 2);
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unreachable_mean_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "potential.kind = double_obstacle\ny0 = constant:1.5\n");
    let out = frac_ch(&["run", "--config", "cfg.txt", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
