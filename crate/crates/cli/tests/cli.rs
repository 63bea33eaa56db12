use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_heavytail-ineq"));
    c.env_remove("HEAVYTAIL_QUAD_RTOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().skip(2).collect()
}

#[test]
fn chernoff_rho_sweep_has_35_rows() {
    let out = run(&["constants", "--chernoff-rho", "--beta", "0.6:4:0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# heavytail-ineq schema=1\ntable,beta,value,branch,valid_range\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 35);
    // rho(1.5) = 1 on both branches
    let at_three_halves: Vec<&str> = rows[9].split(',').collect();
    assert_eq!(at_three_halves[1].parse::<f64>().unwrap(), 1.5);
    assert_eq!(at_three_halves[2].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("r{i}.csv"))).collect();
    for p in &paths {
        let out = run(&["report", "--corpus", "default", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
}

#[test]
fn invalid_parameters_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("never.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["constants", "--chernoff-rho", "--beta", "0.3:1:0.1"],
        vec!["constants", "--lsi-cauchy", "--beta", "2"],
        vec!["verify", "--catalog", "NOT_AN_ENTRY"],
        vec!["verify", "--catalog", "CHERNOFF_CAUCHY", "--beta", "0.5"],
        vec!["verify", "--catalog", "CHERNOFF_CAUCHY", "--beta", "2", "--m", "1"],
        vec!["verify", "--catalog", "BRASCAMP_LIEB", "--potential", "0,0,-1"],
        vec!["evolve", "--model", "invgamma", "--alpha", "1.5", "--beta", "1"],
        vec!["spectral", "--beta", "2", "--n", "10"],
    ];
    for args in cases {
        let mut full = args.clone();
        full.extend(["--out", out_path.to_str().unwrap()]);
        let out = run(&full);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!Path::new(&out_path).exists(), "{args:?} wrote output");
    }
}

#[test]
fn malformed_tolerance_override_exits_2() {
    let out = bin()
        .args(["constants", "--chernoff-gamma", "--kappa", "1"])
        .env("HEAVYTAIL_QUAD_RTOL", "tight")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_chernoff_cauchy_passes() {
    let out = run(&[
        "verify",
        "--catalog",
        "CHERNOFF_CAUCHY",
        "--beta",
        "2.5",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r["spec_id"], "CHERNOFF_CAUCHY[beta=2.5]");
        assert_eq!(r["verdict"], "PASS");
    }
    // equality case
    let x = rows.iter().find(|r| r["fn_id"] == "x").unwrap();
    assert!(x["slack"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn spectral_gap_reaches_rho() {
    let out = run(&["spectral", "--beta", "2.5", "--n", "512"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = data_rows(&text)[0].split(',').collect();
    let (lambda1, rho): (f64, f64) = (row[5].parse().unwrap(), row[6].parse().unwrap());
    assert_eq!(rho, 3.0);
    assert!((lambda1 - rho).abs() / rho < 0.01, "{lambda1}");
}

#[test]
fn evolve_writes_trace_manifest_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run.json");
    let snaps = dir.path().join("snap.csv");
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "evolve",
        "--model",
        "invgamma",
        "--alpha",
        "1.25",
        "--beta",
        "2",
        "--n-cells",
        "256",
        "--manifest",
        manifest.to_str().unwrap(),
        "--snapshots",
        snaps.to_str().unwrap(),
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["checks"]["entropy_monotone"], true);
    assert_eq!(m["checks"]["rate_at_least_bound"], true);
    let rate = m["fit"]["rate"].as_f64().unwrap();
    assert!(rate >= 0.95 * m["rate_bound"].as_f64().unwrap());
    let trace = std::fs::read_to_string(&trace).unwrap();
    assert!(trace.lines().nth(1) == Some("t,H"));
    let snaps = std::fs::read_to_string(&snaps).unwrap();
    // initial and final states on 256 cells
    assert_eq!(data_rows(&snaps).len(), 2 * 256);
}
