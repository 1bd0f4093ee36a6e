use std::path::Path;
use std::process::{Command, Output};

fn graftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graftlab"))
        .args(args)
        .env("GRAFTLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn default_verify_passes_with_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = graftlab(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let reports: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(reports.len() >= 12);
    for r in &reports {
        for key in ["identity", "terms", "lhs", "rhs", "abs_err", "rel_err", "tol", "pass"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
    }
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), reports.len());
}

#[test]
fn impossible_tolerance_fails_with_exit_one() {
    let run = graftlab(&["verify", "--tol", "1e-16", "--samples", "3"]);
    assert_eq!(code(&run), 1);
    assert!(String::from_utf8_lossy(&run.stderr).contains("FAIL"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "ell = 2\nthis line has no separator\n").unwrap();
    assert_eq!(code(&graftlab(&["verify", "--config", cfg.to_str().unwrap()])), 2);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(code(&graftlab(&["chart", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&graftlab(&["chart", "--ell", "-1"])), 2);
    assert_eq!(code(&graftlab(&["sweep", "--param", "ell"])), 2);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# collar\nell = 3\ns = 1.5\n").unwrap();
    let run = graftlab(&["chart", "--config", cfg.to_str().unwrap(), "--s", "0.5"]);
    assert_eq!(code(&run), 0);
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["chart"]["ell"], 3.0);
    assert_eq!(v["chart"]["s"], 0.5);
    assert_eq!(v["grafted_length"], 1.5);
}

#[test]
fn ell_sweep_rows_and_decreasing_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ell.csv");
    let run = graftlab(&[
        "sweep", "--param", "ell", "--from", "1", "--to", "8", "--steps", "50", "--modes", "4", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(csv_rows(&out).len(), 50);
    let m = column(&out, "conformal_modulus");
    assert!(m.windows(2).all(|w| w[1] < w[0]));
    assert!(column(&out, "modulus_quadrature_err").iter().all(|&e| e < 1e-10));
}

#[test]
fn s_sweep_increases_modulus_from_zero_height() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let run = graftlab(&["sweep", "--param", "s", "--from", "0", "--to", "4", "--steps", "9", "--modes", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let m = column(&out, "conformal_modulus");
    assert!(m.windows(2).all(|w| w[1] > w[0]));
    let master = column(&out, "master_total");
    assert!(master[0].is_nan());
    assert!(master[1..].iter().all(|&v| v <= 0.0));
}

#[test]
fn single_step_sweep_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    let run = graftlab(&["sweep", "--param", "a", "--from", "2", "--to", "5", "--steps", "1", "--modes", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "a");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 2.0);
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let args = ["sweep", "--param", "s", "--from", "0.5", "--to", "3", "--steps", "12", "--modes", "4"];
    let first = graftlab(&args);
    let second = Command::new(env!("CARGO_BIN_EXE_graftlab"))
        .args(args)
        .env("GRAFTLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let v1 = graftlab(&["verify", "--samples", "4"]);
    let v2 = graftlab(&["verify", "--samples", "4"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn zero_field_geodesic_has_no_displacement_error() {
    let run = graftlab(&["geodesic", "--amplitude", "0", "--points", "64"]);
    assert_eq!(code(&run), 0);
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    for side in v["sides"].as_array().unwrap() {
        assert_eq!(side["rel_err"], 0.0);
        assert!(side["mode_rel_err"].as_array().unwrap().iter().all(|e| e == 0.0));
    }
}

#[test]
fn default_geodesic_passes_and_converges_first_order() {
    let run = graftlab(&["geodesic"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stdout));
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    for side in v["sides"].as_array().unwrap() {
        let full = side["rel_err"].as_f64().unwrap();
        let half = side["rel_err_half_t"].as_f64().unwrap();
        assert!(half < full);
        assert!((side["first_order_ratio"].as_f64().unwrap() - 2.0).abs() < 0.2);
    }
}

#[test]
fn mode_dumps_have_documented_headers() {
    let run = graftlab(&["modes", "--modes", "2"]);
    assert_eq!(code(&run), 0);
    let text = String::from_utf8(run.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,xi,b,b_prime,dtn"));
    let spectral = graftlab(&["modes", "--spectral", "--modes", "2"]);
    let text = String::from_utf8(spectral.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next(), Some("n,c_re,c_im,d_re,d_im"));
}
