//! End-to-end checks of the `hadamard` binary: exit codes, determinism,
//! cycle dumps, and the wire formats.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hadamard"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hadamard-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const GEOMETRIC_EVAL: &str = r#"{
  "functions": {
    "f1": { "expr": "1/(1-z/2)", "singular": "preset:point(2.0, 0.0)", "vanishes_at_inf": true },
    "f2": { "expr": "1/(1-z/3)", "singular": "preset:point(3.0, 0.0)", "vanishes_at_inf": true }
  },
  "eval": {
    "pair": ["f1", "f2"],
    "points": [[1.0, 0.0]],
    "grid": { "center": [0.0, 0.0], "radii": [0.5], "count": 6 },
    "tol": 1e-10
  }
}"#;

#[test]
fn eval_writes_values_and_is_deterministic() {
    let dir = tmpdir("eval");
    let config = dir.join("cfg.json");
    write(&config, GEOMETRIC_EVAL);
    let out1 = dir.join("a.csv");
    let out2 = dir.join("b.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["eval", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(["--seed", "7"])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "identical config + seed must give identical CSV bytes");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("re_z,im_z,re_val,im_val,err_est\n"));
    // value at z = 1 is 1.2
    let row = text
        .lines()
        .find(|l| l.starts_with("1,0,"))
        .expect("row for z = 1");
    let val: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((val - 1.2).abs() < 1e-9, "value at z=1 was {val}");
    // manifest records tolerances and the config hash
    let manifest = std::fs::read_to_string(dir.join("a.csv.manifest.json")).unwrap();
    assert!(manifest.contains("quad_tol") && manifest.contains("config_sha256"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_dumps_cycles_that_parse() {
    let dir = tmpdir("dump");
    let config = dir.join("cfg.json");
    write(&config, GEOMETRIC_EVAL);
    let out = dir.join("vals.csv");
    let cyc = dir.join("cycle.json");
    let status = bin()
        .args(["eval", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--dump-cycle")
        .arg(&cyc)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&cyc).unwrap();
    let record: hadamard_kit::cycles::CycleRecord = serde_json::from_str(&text).unwrap();
    let cycle = record.into_cycle().unwrap();
    assert!(!cycle.terms.is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn domain_errors_exit_two() {
    let dir = tmpdir("domain");
    let config = dir.join("cfg.json");
    write(
        &config,
        r#"{
        "functions": {
            "f1": { "expr": "1/(1-z/2)", "singular": "preset:point(2.0, 0.0)", "vanishes_at_inf": true },
            "f2": { "expr": "1/(1-z/3)", "singular": "preset:point(3.0, 0.0)", "vanishes_at_inf": true }
        },
        "eval": { "pair": ["f1", "f2"], "points": [[6.0, 0.0]] }
    }"#,
    );
    let output = bin()
        .args(["eval", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("product"), "stderr: {stderr}");
    // machine-readable trailer
    assert!(stderr.contains("\"exit\":2"), "stderr: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_sixty_four() {
    let status = bin().arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(64));
    let status = bin().args(["verify", "no-such-suite"]).status().unwrap();
    assert_eq!(status.code(), Some(64));
}

#[test]
fn star_command_reports_the_dilog_product() {
    let dir = tmpdir("star");
    let config = dir.join("cfg.json");
    write(
        &config,
        r#"{
        "sets": {
            "a": "preset:ray(3.141592653589793, 1.0)",
            "b": "preset:ray(3.141592653589793, 1.0)"
        },
        "star": { "pair": ["a", "b"] }
    }"#,
    );
    let output = bin().args(["star", "--config"]).arg(&config).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("\"strongly_convolvable\": true"));
    assert!(text.contains("\"+inf\""));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unrepresentable_sets_exit_two_with_guidance() {
    let dir = tmpdir("facto");
    let config = dir.join("cfg.json");
    write(
        &config,
        r#"{ "sets": { "s": "preset:factorial(2)" }, "star": { "pair": ["s", "s"] } }"#,
    );
    let output = bin().args(["star", "--config"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unrepresentable"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cycle_command_certifies() {
    let dir = tmpdir("cycle");
    let config = dir.join("cfg.json");
    write(
        &config,
        r#"{
        "sets": {
            "a": "preset:ray(3.141592653589793, 1.0)",
            "b": "preset:ray(3.141592653589793, 1.0)"
        },
        "cycle": { "s1": "a", "s2": "b", "z": [0.5, 0.0] }
    }"#,
    );
    let out = dir.join("cycle.json");
    let output = bin()
        .args(["cycle", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("\"certified\": true"));
    assert!(out.exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_command_prints_termwise_coefficients() {
    let dir = tmpdir("oracle");
    let config = dir.join("cfg.json");
    write(
        &config,
        r#"{
        "functions": {
            "f1": { "expr": "1/(1-z/2)", "singular": "preset:point(2.0, 0.0)", "vanishes_at_inf": true },
            "f2": { "expr": "1/(1-z/3)", "singular": "preset:point(3.0, 0.0)", "vanishes_at_inf": true }
        },
        "oracle": { "function": "f1", "r": 1.0, "n": 4, "series_with": "f2" }
    }"#,
    );
    let output = bin().args(["oracle", "--config"]).arg(&config).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.starts_with("n,re,im\n"));
    // a_2 b_2 = 1/36
    assert!(text.contains("2,0.0277777777777"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_suite_runs_green() {
    let output = bin().args(["verify", "quadrature"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("\"pass\": true"));
}
