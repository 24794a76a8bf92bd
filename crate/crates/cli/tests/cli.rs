use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equidist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn field_and_snf() {
    let out = run(&["field", "--p", "7", "--n", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["q"], 49);
    assert_eq!(v["modulus_poly"].as_array().unwrap().len(), 3);

    let out = run(&["snf", "--matrix", "[[2,4,4],[-6,6,12],[10,-4,-16]]"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["diagonal"], serde_json::json!(["2", "6", "12"]));
}

#[test]
fn sums_csv() {
    let out = run(&["sums", "--family", "hyper_kloosterman", "--r", "2", "--p", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,re,im");
    // Kl_2(1; F_3) = -1/√3
    let re: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((re + 1.0 / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn wass_line_and_bounds() {
    let out = run(&["wass", "--family", "hyper_kloosterman", "--r", "2", "--q", "101", "--reference", "sato_tate", "--method", "line"]);
    assert!(out.status.success());
    let w = json(&out)["w1"].as_f64().unwrap();
    assert!(w > 0.0 && w <= 101f64.powf(-1.0 / 3.0));

    let v = json(&run(&["bound", "rate", "--z-size", "3", "--degree", "2"]));
    assert!((v["constant"].as_f64().unwrap() - 48.0).abs() < 1e-12);
    let v = json(&run(&["bound", "su2", "--p", "101", "--t", "4"]));
    assert_eq!(v["label"], "diagnostic, constant not certified");
    let v = json(&run(&["bound", "fourier", "--q", "31", "--d", "3", "--t-max", "4"]));
    assert!(v["bound"].as_f64().unwrap() >= v["head_term"].as_f64().unwrap());
}

#[test]
fn sample_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("st.csv");
    let out = run(&["--seed", "4", "--out", path.to_str().unwrap(), "sample", "--reference", "sato_tate", "--m", "50"]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 51);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("st.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["type"], "Empirical1D");
    assert_eq!(meta["seed"], 4);
}

#[test]
fn exit_codes() {
    // unknown flag and bad config: 2
    assert_eq!(run(&["field", "--p", "7", "--bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"schema_version": 1, "surprise": true}"#).unwrap();
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    // math guards: 3
    assert_eq!(run(&["field", "--p", "8"]).status.code(), Some(3));
    assert_eq!(run(&["sums", "--family", "gaussian_period", "--d", "4", "--p", "7"]).status.code(), Some(3));
}

const GRID: &str = r#"{"schema_version": 1, "family": {"kind": "circle_grid"},
    "primes": {"list": [10, 100, 1000]},
    "reference": {"kind": "lebesgue_circle"}, "method": "circle",
    "rate": {"constant": RATE, "exponent": 1.0},
    "check": {"max_slope": -0.999, "rate_bound": true}}"#;

#[test]
fn sweep_check_mode() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    fs::write(&good, GRID.replace("RATE", "0.26")).unwrap();
    fs::write(&bad, GRID.replace("RATE", "0.2")).unwrap();
    let out = run(&["--check", "--format", "csv", "sweep", "--config", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
    assert_eq!(run(&["--check", "sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(run(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn sweep_output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gp.json");
    fs::write(
        &cfg,
        r#"{"schema_version": 1, "family": {"kind": "gaussian_period", "d": 3},
            "primes": {"range": [7, 60], "congruent_one_mod": 3},
            "reference": {"kind": "haar_prime", "d": 3}, "method": "exact2d",
            "sample_factor": 3, "bootstrap": 2}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let a = run(&["--seed", "3", "--format", "csv", "sweep", "--config", c]);
    let b = run(&["--seed", "3", "--threads", "3", "--format", "csv", "sweep", "--config", c]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let d = run(&["--seed", "4", "--format", "csv", "sweep", "--config", c]);
    assert_ne!(a.stdout, d.stdout);
}
