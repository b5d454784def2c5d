use std::path::PathBuf;
use std::process::{Command, Output};

use corr_ldpc::formats::{graph_from_json, read_alist};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corr-ldpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corr-ldpc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn analyze_presets_match_known_thresholds() {
    let cases: [(&[&str], f64, f64); 3] = [
        (&["--preset", "shokrollahi-storn"], 0.49553, 5e-4),
        (
            &["--preset", "two-degree", "--q", "0.37", "--pi", "2,1"],
            0.3066,
            1e-3,
        ),
        (&["--preset", "bazzi"], 0.3916, 5e-4),
    ];
    for (extra, want, tol) in cases {
        let mut args = vec!["analyze"];
        args.extend_from_slice(extra);
        let v = json(&args);
        let star = v["delta_star"].as_f64().unwrap();
        assert!((star - want).abs() <= tol, "{extra:?}: {star} vs {want}");
        let bracket = v["bracket"].as_array().unwrap();
        assert!(bracket[0].as_f64().unwrap() <= bracket[1].as_f64().unwrap());
        assert_eq!(v["anomaly"], Value::Bool(false));
    }
}

#[test]
fn analyze_free_cells_at_product_point_matches_independent() {
    let base = json(&["analyze", "--preset", "two-degree"]);
    let opt = json(&["optimize", "--preset", "two-degree", "--budget", "4"]);
    let free: Vec<&str> = opt["free_cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(free, vec!["0.25"]);
    let at = json(&["analyze", "--preset", "two-degree", "--free", "0.25"]);
    assert_eq!(at["delta_star"], base["delta_star"]);
    let moved = json(&["analyze", "--preset", "two-degree", "--free", "0.2"]);
    assert_ne!(moved["delta_star"], base["delta_star"]);
    let out = run(&["analyze", "--preset", "two-degree", "--free", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_erasure_free_at_zero() {
    let args = [
        "simulate",
        "--preset",
        "two-degree",
        "--n",
        "300",
        "--deltas",
        "0:0.3:0.1",
        "--trials",
        "1",
        "--seed",
        "7",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(
        lines.next().unwrap(),
        "delta,trials,gamma_mean,gamma_std,gamma_deg_3,gamma_deg_6"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(first[2].parse::<f64>().unwrap(), 1.0);

    let other = stdout(&[
        "simulate",
        "--preset",
        "two-degree",
        "--n",
        "300",
        "--deltas",
        "0.3",
        "--trials",
        "1",
        "--seed",
        "8",
    ]);
    assert_eq!(other.lines().count(), 2);
}

#[test]
fn sweep_csv_starts_at_independent_threshold() {
    let out = stdout(&["sweep", "--preset", "two-degree", "--q-step", "0.5"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q,delta_star,lower_bound,upper_bound"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 0.2741).abs() < 1e-3);
    assert_eq!(rows[2][0], 1.0);
}

#[test]
fn optimize_reports_required_fields() {
    let v = json(&[
        "optimize",
        "--preset",
        "shokrollahi-storn",
        "--budget",
        "30",
    ]);
    for key in [
        "best_joint",
        "delta_star",
        "baseline_independent",
        "evaluations",
        "free_cells",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["evaluations"].as_u64().unwrap() <= 30);
    assert!(
        v["delta_star"].as_f64().unwrap() >= v["baseline_independent"].as_f64().unwrap() - 1e-12
    );
    let total: f64 = v["best_joint"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c[2].as_str().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn trajectory_header_and_initial_state() {
    let out = stdout(&["trajectory", "--preset", "two-degree", "--delta", "0.2"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iter,alpha_3,alpha_6,beta_9,beta_18,gamma"
    );
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(first, vec![0.0, 0.2, 0.2, 1.0, 1.0, 0.8]);
}

#[test]
fn construct_is_deterministic_in_both_formats() {
    let alist = [
        "construct",
        "--preset",
        "two-degree",
        "--n",
        "90",
        "--seed",
        "3",
    ];
    assert_eq!(stdout(&alist), stdout(&alist));
    let g = read_alist(stdout(&alist).as_bytes()).unwrap();
    assert_eq!(g.n, 90);
    assert_eq!(g.m, 30);

    let js = [
        "construct",
        "--preset",
        "two-degree",
        "--n",
        "90",
        "--seed",
        "3",
        "--format",
        "json",
    ];
    let text = stdout(&js);
    assert_eq!(text, stdout(&js));
    let h = graph_from_json(&text).unwrap();
    assert_eq!((h.n, h.m), (g.n, g.m));
    assert_eq!(h.variable_degrees, g.variable_degrees);
    assert_eq!(h.check_degrees, g.check_degrees);
    let sorted = |mut e: Vec<(u32, u32)>| {
        e.sort_unstable();
        e
    };
    assert_eq!(sorted(h.edges), sorted(g.edges));
}

#[test]
fn output_flag_writes_file() {
    let path = temp_file("out.json", "");
    let out = run(&[
        "analyze",
        "--preset",
        "two-degree",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["delta_star"].is_number());
}

#[test]
fn ensemble_file_forms_are_accepted() {
    let path = temp_file("regular.json", r#"{"joint":[[3,6,"1"]]}"#);
    let v = json(&["analyze", "--ensemble", path.to_str().unwrap()]);
    // (3,6)-regular
    assert!((v["delta_star"].as_f64().unwrap() - 0.4294).abs() < 1e-3);
    let v = json(&["analyze", "--marginals", path.to_str().unwrap()]);
    assert!(v["delta_star"].is_number());
}

#[test]
fn exit_codes_distinguish_failures() {
    let bad = temp_file("bad.json", r#"{"joint":[[3,6,"0.5"]]}"#);
    assert_eq!(
        run(&["analyze", "--ensemble", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["analyze", "--ensemble", "/nonexistent/e.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["analyze"]).status.code(), Some(2));

    let regular = temp_file("regular3.json", r#"{"joint":[[3,6,"1"]]}"#);
    let out = run(&[
        "construct",
        "--ensemble",
        regular.to_str().unwrap(),
        "--n",
        "101",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}
