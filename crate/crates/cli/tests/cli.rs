use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ssqw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssqw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn limits_config(ap: f64, pp: f64, am: f64, pm: f64) -> String {
    format!(r#"{{"limits": {{"a_plus": {ap}, "p_plus": {pp}, "a_minus": {am}, "p_minus": {pm}}}, "n": 400}}"#)
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn index_fredholm_cell() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "row2.json", &limits_config(0.3, 0.8, 0.8, 0.3));
    let out = dir.path().join("index.json");
    let o = ssqw(&["index", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Fredholm, index +1, witten +1"), "{}", stdout(&o));
    let rec: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let c0 = rec["numeric"]["extrapolated"].as_f64().unwrap();
    assert!((c0 - 1.0).abs() < 0.02, "{c0}");
    assert_eq!(rec["cell"]["fredholm_index"].as_i64(), Some(1));
}

#[test]
fn index_gapless_plus_cell() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "gp.json", &limits_config(0.5, 0.5, 0.8, 0.3));
    let o = ssqw(&["index", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("non-Fredholm, witten +1/2"), "{text}");
    assert!(text.contains("plus side: gapless, contribution +1/2"));
}

#[test]
fn index_endpoint_cell() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "end.json", &limits_config(1.0, 1.0, 0.3, 0.8));
    let o = ssqw(&["index", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("plus side: endpoint, contribution 0"), "{text}");
    assert!(text.contains("non-Fredholm, witten -1"), "{text}");
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, "bad.json", r#"{"limits": {"a_plus": 0.3}}"#);
    assert_eq!(ssqw(&["index", "--config", &bad]).status.code(), Some(2));
    let small = write_config(&dir, "small.json", &limits_config(0.3, 0.8, 0.8, 0.3).replace("400", "32"));
    assert_eq!(ssqw(&["index", "--config", &small]).status.code(), Some(2));
    assert_eq!(ssqw(&["index", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    assert_eq!(ssqw(&["ssf"]).status.code(), Some(2));
    assert_eq!(ssqw(&["ssf", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(ssqw(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn ssf_free_case_is_half_on_the_band() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ssf.csv");
    let o = ssqw(&["ssf", "--p", "0", "--grid", "301", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 301);
    for r in &rows {
        let x: f64 = r[0].parse().unwrap();
        let xi: f64 = r[1].parse().unwrap();
        if r[3] == *"true" {
            continue;
        }
        let want = if x > 0.0 && x < 4.0 { 0.5 } else { 0.0 };
        assert_eq!(xi, want, "x = {x}");
    }
}

#[test]
fn ssf_negative_p_stays_below_half() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ssf.csv");
    let plot = dir.path().join("ssf.svg");
    let o = ssqw(&["ssf", "--p", "-0.3", "--out", out.to_str().unwrap(), "--plot", plot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for r in read_csv(&out) {
        assert!(r[1].parse::<f64>().unwrap() <= 0.5);
    }
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}

#[test]
fn ssf_outer_gap_is_sign_valued() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ssf.csv");
    let o = ssqw(&["ssf", "--p", "0.8", "--grid", "3000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let gap: Vec<f64> = read_csv(&out).iter().filter(|r| &r[2] == "outer-gap").map(|r| r[1].parse().unwrap()).collect();
    assert!(!gap.is_empty());
    assert!(gap.iter().all(|v| [0.0, 0.5, 1.0].contains(v)));
}

#[test]
fn det_prints_each_point() {
    let o = ssqw(&["det", "--p", "0", "2", "-1", "1:1", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("(boundary)") && text.contains("(negative-axis)") && text.contains("(interior)"));
    assert!(text.contains("undefined"));
}

fn sweep_rows(args: &[&str], dir: &TempDir, name: &str) -> Vec<csv::StringRecord> {
    let out = dir.path().join(name);
    let mut full = vec!["sweep", "--out", out.to_str().unwrap()];
    full.extend_from_slice(args);
    let o = ssqw(&full);
    assert_eq!(o.status.code(), Some(0));
    read_csv(&out)
}

#[test]
fn sweep_slice_structure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &limits_config(0.3, 0.8, 0.8, 0.3));
    let rows = sweep_rows(&["--config", &cfg, "--grid", "41"], &dir, "s.csv");
    assert_eq!(rows.len(), 41 * 41);
    for r in &rows {
        let pp: f64 = r[1].parse().unwrap();
        let w: f64 = r[6].parse().unwrap();
        match &r[7] {
            "gapped-below" => assert_eq!(w, 0.0),
            "gapped-above" => assert_eq!(w, pp.signum()),
            "gapless" => assert_eq!(w, 0.5 * pp.signum() * f64::from(pp != 0.0)),
            "endpoint" => assert_eq!(w, 0.0),
            other => panic!("unknown regime {other}"),
        }
        assert_eq!(&r[4] == "true", r[7].starts_with("gapped"));
    }
}

#[test]
fn sweep_is_deterministic_and_antisymmetric() {
    let dir = TempDir::new().unwrap();
    let plus = write_config(
        &dir,
        "plus.json",
        r#"{"limits": {"a_plus": 0, "p_plus": 0, "a_minus": 0, "p_minus": 0},
            "sweep": {"a_plus": {"min": -1, "max": 1, "count": 9}, "p_plus": {"min": -1, "max": 1, "count": 9},
                      "a_minus": 0.4, "p_minus": -0.7}}"#,
    );
    let minus = write_config(
        &dir,
        "minus.json",
        r#"{"limits": {"a_plus": 0, "p_plus": 0, "a_minus": 0, "p_minus": 0},
            "sweep": {"a_plus": 0.4, "p_plus": -0.7,
                      "a_minus": {"min": -1, "max": 1, "count": 9}, "p_minus": {"min": -1, "max": 1, "count": 9}}}"#,
    );
    let a = sweep_rows(&["--config", &plus], &dir, "a.csv");
    let again = sweep_rows(&["--config", &plus], &dir, "b.csv");
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
    assert_eq!(a, again);
    let b = sweep_rows(&["--config", &minus], &dir, "c.csv");
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((&x[0], &x[1]), (&y[2], &y[3]));
        let wx: f64 = x[6].parse().unwrap();
        let wy: f64 = y[6].parse().unwrap();
        assert_eq!(wx, -wy);
    }
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("verify.csv");
    let o = ssqw(&["verify", "algebra", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS algebra")));
    assert!(read_csv(&out).iter().all(|r| &r[4] == "true"));
    let o = ssqw(&["verify", "algebra", "--tol-scale", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_analytic_and_gauge_suites() {
    for suite in ["analytic", "gauge", "krein"] {
        let o = ssqw(&["verify", suite, "--n", "400"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
    }
}
