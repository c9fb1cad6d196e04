use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use csrk::reduce::parse_json;

const MIDPOINT: &str = r#"{"weight":{"family":"legendre"},
    "construction":{"kind":"truncated","r":1,"variant":"balanced"},
    "quadrature":{"kind":"gauss_christoffel","s":1}}"#;

const CHEB_FOURTH_ORDER: &str = r#"{"weight":{"family":"chebyshev_first"},
    "construction":{"kind":"truncated","r":3,"variant":"balanced"},
    "quadrature":{"kind":"gauss_christoffel","s":3}}"#;

fn csrk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csrk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, name: &str, spec: &str) -> PathBuf {
    let spec_path = dir.join(format!("{name}.spec.json"));
    let out = dir.join(format!("{name}.json"));
    fs::write(&spec_path, spec).unwrap();
    let o = csrk(&[
        "gen",
        "--spec",
        path_str(&spec_path),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_writes_a_parseable_tableau_and_prints_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(dir.path(), "mid", MIDPOINT);
    let rk = parse_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rk.stages(), 1);
    assert_eq!(rk.a[0][0], 0.5);
    assert_eq!(rk.provenance.construction, "truncated_balanced");

    let spec_path = dir.path().join("mid.spec.json");
    let o = csrk(&[
        "gen",
        "--spec",
        path_str(&spec_path),
        "--out",
        path_str(&out),
    ]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains('|'), "{stdout}");
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a", CHEB_FOURTH_ORDER);
    let b = generate(dir.path(), "b", CHEB_FOURTH_ORDER);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn analyze_reports_levels_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(dir.path(), "cheb", CHEB_FOURTH_ORDER);
    let o = csrk(&["analyze", path_str(&out), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["s"], 3);
    assert!(v["order_bound"].as_u64().unwrap() >= 4);
    assert_eq!(v["a_stable"], true);

    let o = csrk(&["analyze", path_str(&out)]);
    assert!(o.status.success());
    assert!(!o.stdout.is_empty());
}

#[test]
fn integrate_harmonic_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    let tab = generate(dir.path(), "mid", MIDPOINT);
    let csv = dir.path().join("traj.csv");
    let o = csrk(&[
        "integrate",
        path_str(&tab),
        "--problem",
        "harmonic",
        "--t0",
        "0",
        "--t1",
        "10",
        "--h",
        "0.1",
        "--out",
        path_str(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,z_1,z_2,H,newton_iters");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    let h0 = rows[0][3];
    let drift = rows.iter().map(|r| (r[3] - h0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-11, "{drift}");
    assert!((rows[100][0] - 10.0).abs() < 1e-12);
}

#[test]
fn integrate_rejects_non_dividing_step() {
    let dir = tempfile::tempdir().unwrap();
    let tab = generate(dir.path(), "mid", MIDPOINT);
    let csv = dir.path().join("traj.csv");
    let o = csrk(&[
        "integrate",
        path_str(&tab),
        "--problem",
        "harmonic",
        "--t0",
        "0",
        "--t1",
        "1",
        "--h",
        "0.3",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!csv.exists());
}

#[test]
fn order_prints_a_slope() {
    let dir = tempfile::tempdir().unwrap();
    let tab = generate(dir.path(), "mid", MIDPOINT);
    let o = csrk(&[
        "order",
        path_str(&tab),
        "--problem",
        "pendulum",
        "--hs",
        "0.2,0.1,0.05,0.025",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 2.0).abs() < 0.1);
}

#[test]
fn malformed_inputs_exit_with_input_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"a\": [[0.5]], \"b\": [1.0]").unwrap();
    let o = csrk(&["analyze", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());

    fs::write(&bad, r#"{"weight":{"family":"legendre"},"construction":{"kind":"truncated","r":1},"quadrature":{"kind":"gauss_christoffel","s":1},"extra":0}"#).unwrap();
    let out = dir.path().join("out.json");
    let o = csrk(&["gen", "--spec", path_str(&bad), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let o = csrk(&["analyze", path_str(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn construction_failure_exits_with_construction_code() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    fs::write(&spec, r#"{"weight":{"family":"legendre"},"construction":{"kind":"truncated","r":0},"quadrature":{"kind":"gauss_christoffel","s":1}}"#).unwrap();
    let o = csrk(&[
        "gen",
        "--spec",
        path_str(&spec),
        "--out",
        path_str(&dir.path().join("o.json")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reproduce_all_tables() {
    for t in 1..=7 {
        let o = csrk(&["reproduce", "--table", &t.to_string()]);
        assert!(
            o.status.success(),
            "table {t}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
    }
}

#[test]
fn reproduce_reports_mismatch_below_roundoff() {
    let o = csrk(&["reproduce", "--table", "3", "--tol", "0"]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    if o.status.success() {
        assert!(!stdout.contains("FAIL"));
    } else {
        assert_eq!(o.status.code(), Some(5));
        assert!(stdout.contains("computed"));
    }
}
