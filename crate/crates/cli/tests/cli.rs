//! End-to-end runs of the binary: file formats, error JSON, exit codes,
//! determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-echo"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn decay_params(dir: &Path) -> PathBuf {
    write(
        dir,
        "decay.json",
        r#"{"n":1,"A":[[0.0,0.0]],"theta1":[[1.0,0.0]],"theta2":[[1.0,0.0]]}"#,
    )
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn parse_csv(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|line| line.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn gbdt_emits_closed_form_columns_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let pot = dir.path().join("pot.csv");
    let resp = dir.path().join("resp.csv");
    let zs = write(dir.path(), "z.json", "[[0.0,5.0],[1.0,8.0]]");
    let weyl = dir.path().join("weyl.csv");
    let run = || {
        run_ok(
            bin()
                .args(["gbdt", "--params"])
                .arg(&params)
                .args(["--extent", "2.0", "--N", "41", "--potential-out"])
                .arg(&pot)
                .arg("--response-out")
                .arg(&resp)
                .arg("--weyl-out")
                .arg(&weyl)
                .arg("--z-list")
                .arg(&zs),
        );
        (
            fs::read(&pot).unwrap(),
            fs::read(&resp).unwrap(),
            fs::read(&weyl).unwrap(),
        )
    };
    let first = run();
    for row in parse_csv(&pot) {
        let (x, p, q, re_v, im_v) = (row[0], row[1], row[2], row[3], row[4]);
        assert!(p.abs() < 1e-12);
        let want = -2.0 / (1.0 + 2.0 * x);
        assert!((q - want).abs() < 1e-10, "q at {x}");
        assert!(re_v.abs() < 1e-12 && (im_v - want).abs() < 1e-10);
    }
    for row in parse_csv(&resp) {
        let want = -2.0 * (-2.0 * row[0]).exp();
        assert!(row[1].abs() < 1e-12 && (row[2] - want).abs() < 1e-10);
    }
    let weyl_rows = parse_csv(&weyl);
    // phiH(5i) = (5/7) i, phi = -1/6
    assert!((weyl_rows[0][2] - (-1.0 / 6.0)).abs() < 1e-12);
    assert!((weyl_rows[0][5] - 5.0 / 7.0).abs() < 1e-12);

    // bit-identical outputs on a second run
    let second = run();
    assert_eq!(first, second);
}

#[test]
fn invert_zero_response_gives_zero_potential_on_half_interval() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,re,im\n");
    for k in 0..=200 {
        csv.push_str(&format!("{},0,0\n", 2.0 * k as f64 / 200.0));
    }
    let rpath = write(dir.path(), "r.csv", &csv);
    let out = dir.path().join("pot.csv");
    let output = run_ok(
        bin()
            .args(["invert", "--response-csv"])
            .arg(&rpath)
            .args(["--N", "201", "--half-warn", "--out"])
            .arg(&out),
    );
    assert!(String::from_utf8_lossy(&output.stderr).contains("half"));
    let rows = parse_csv(&out);
    let last_x = rows.last().unwrap()[0];
    assert!(last_x <= 1.0 + 1e-12, "half-interval rule: {last_x}");
    for row in &rows {
        assert!(row[1].abs() < 1e-12 && row[2].abs() < 1e-12);
    }
}

#[test]
fn weyl_check_on_zero_potential() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,re,im\n");
    for k in 0..=64 {
        csv.push_str(&format!("{},0,0\n", 8.0 * k as f64 / 64.0));
    }
    let vpath = write(dir.path(), "v.csv", &csv);
    let zs = write(dir.path(), "z.json", "[[0.0,3.0]]");
    let out = dir.path().join("weyl.csv");
    run_ok(
        bin()
            .args(["weyl-check", "--potential-csv"])
            .arg(&vpath)
            .arg("--z-list")
            .arg(&zs)
            .args(["--l", "8.0", "--h", "0.03125", "--out"])
            .arg(&out),
    );
    let rows = parse_csv(&out);
    let row = &rows[0];
    assert!(row[2].abs() < 1e-9 && row[3].abs() < 1e-9, "phi = ({}, {})", row[2], row[3]);
    assert!(row[4].abs() < 1e-9 && (row[5] - 1.0).abs() < 1e-9, "phiH");
}

#[test]
fn amplitude_converts_decay_response() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,re,im\n");
    for k in 0..=400 {
        let t = 2.0 * k as f64 / 400.0;
        csv.push_str(&format!("{},0,{}\n", t, -2.0 * (-2.0 * t).exp()));
    }
    let rpath = write(dir.path(), "r.csv", &csv);
    let out = dir.path().join("acc.csv");
    run_ok(bin().args(["amplitude", "--response-csv"]).arg(&rpath).arg("--out").arg(&out));
    for row in parse_csv(&out) {
        let x = row[0];
        // omega = -e^{-2x} algebraically from the kernel samples
        assert!((row[3] - (-(-2.0 * x).exp())).abs() < 1e-12, "omega at {x}");
        assert!(row[4].abs() < 1e-12);
    }
}

#[test]
fn forward_zero_potential_trace_is_phase_shifted_control() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,p,q\n");
    for k in 0..=32 {
        csv.push_str(&format!("{},0,0\n", 2.0 * k as f64 / 32.0));
    }
    let pot = write(dir.path(), "zero.csv", &csv);
    let trace = dir.path().join("trace.csv");
    run_ok(
        bin()
            .args(["forward", "--potential-csv"])
            .arg(&pot)
            .args(["--extent", "1.0", "--h", "0.015625", "--out-trace"])
            .arg(&trace),
    );
    for row in parse_csv(&trace) {
        let t = row[0];
        let f = t * t * (-t).exp();
        assert!(row[1].abs() < 1e-12, "re u2 at {t}");
        assert!((row[2] - f).abs() < 1e-12, "im u2 at {t}");
    }
}

#[test]
fn weyl_check_accepts_params_source() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let zs = write(dir.path(), "z.json", "[[0.0,5.0]]");
    let out = dir.path().join("weyl.csv");
    run_ok(
        bin()
            .args(["weyl-check", "--gbdt-params"])
            .arg(&params)
            .arg("--z-list")
            .arg(&zs)
            .args(["--l", "12.0", "--h", "0.0078125", "--out"])
            .arg(&out),
    );
    let row = &parse_csv(&out)[0];
    assert!((row[2] - (-1.0 / 6.0)).abs() < 1e-3, "phi = {}", row[2]);
    assert!((row[5] - 5.0 / 7.0).abs() < 1e-3, "phiH = {}", row[5]);
    // the length-doubling defect column is present and small
    assert!(row[6] >= 0.0 && row[6] < 1e-3);
}

#[test]
fn forward_characteristics_writes_field_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let field = dir.path().join("field.csv");
    let output = run_ok(
        bin()
            .args(["forward", "--gbdt-params"])
            .arg(&params)
            .args(["--extent", "1.0", "--h", "0.03125", "--solver", "characteristics", "--out-field"])
            .arg(&field),
    );
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["solver"], "characteristics");
    assert!(report["causality_residual"].as_f64().unwrap() <= 1e-12);
    assert!(report["growth_ratio"].as_f64().unwrap() <= 1.0 + 1e-6);
    assert!(report["fixed_point_residual"].as_f64().unwrap() < 1e-2);

    let text = fs::read_to_string(&field).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,t,re_u1,im_u1,re_u2,im_u2");
    // 33 x 33 nodes
    assert_eq!(lines.count(), 33 * 33);
}

#[test]
fn response_command_recovers_decay_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let out = dir.path().join("r.csv");
    run_ok(
        bin()
            .args(["response", "--gbdt-params"])
            .arg(&params)
            .args(["--extent", "2.0", "--h", "0.0078125", "--out"])
            .arg(&out),
    );
    let rows = parse_csv(&out);
    let mut worst = 0.0f64;
    for row in &rows {
        let want = -2.0 * (-2.0 * row[0]).exp();
        worst = worst.max((row[2] - want).abs().max(row[1].abs()));
    }
    assert!(worst < 2e-2, "kernel error {worst:.3e}");
}

#[test]
fn roundtrip_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let out = dir.path().join("report.json");
    run_ok(
        bin()
            .args(["roundtrip", "--params"])
            .arg(&params)
            .args(["--l", "1.0", "--N", "240", "--out"])
            .arg(&out),
    );
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["sup_rel_error_v"].as_f64().unwrap() < 5e-3);
    assert!(report["order_estimate"].as_f64().unwrap() > 1.5);
    assert!(report["positivity_min_eig"].as_f64().unwrap() > 0.0);
    assert!(report["sup_error_p"].as_f64().unwrap() < 1e-6);
}

#[test]
fn roundtrip_of_silent_family_reports_zero_errors() {
    // theta2 = 0 with A - A* = i theta1 theta1*: both sides identically zero
    let dir = tempfile::tempdir().unwrap();
    let params = write(
        dir.path(),
        "silent.json",
        r#"{"n":1,"A":[[0.0,0.5]],"theta1":[[1.0,0.0]],"theta2":[[0.0,0.0]]}"#,
    );
    let out = dir.path().join("report.json");
    run_ok(
        bin()
            .args(["roundtrip", "--params"])
            .arg(&params)
            .args(["--l", "1.0", "--N", "120", "--out"])
            .arg(&out),
    );
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["sup_error_v"].as_f64().unwrap() < 1e-12);
    assert!(report["sup_error_p"].as_f64().unwrap() < 1e-12);
    assert!(report["sup_error_q"].as_f64().unwrap() < 1e-12);
    assert!(report["order_estimate"].is_null());
    assert!(report["positivity_min_eig"].as_f64().unwrap() > 0.99);
}

#[test]
fn rejects_nonpositive_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let out = dir.path().join("r.csv");
    let output = bin()
        .args(["response", "--gbdt-params"])
        .arg(&params)
        .args(["--extent", "1.0", "--h", "0.0625", "--residual-tol=-1.0", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&output.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "parse");
}

#[test]
fn parse_errors_exit_2_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "x,re,im\n0,1,zzz\n1,1,0\n");
    let out = dir.path().join("acc.csv");
    let output = bin()
        .args(["amplitude", "--response-csv"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&output.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "parse");
    assert_eq!(err["context"]["command"], "amplitude");
    assert!(err["message"].as_str().unwrap().contains("zzz"));
}

#[test]
fn invalid_kernel_exits_1_with_positivity_kind() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,re,im\n");
    for k in 0..=400 {
        let t = 4.0 * k as f64 / 400.0;
        csv.push_str(&format!("{},0,{}\n", t, -6.0 * (-2.0 * t).exp()));
    }
    let rpath = write(dir.path(), "bad_r.csv", &csv);
    let out = dir.path().join("pot.csv");
    let output = bin()
        .args(["invert", "--response-csv"])
        .arg(&rpath)
        .args(["--N", "401"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&output.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "positivity");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let params = decay_params(dir.path());
    let cfg = write(dir.path(), "run.json", r#"{"extent": 1.0, "n": 21}"#);
    let out_a = dir.path().join("a.csv");
    run_ok(
        bin()
            .arg("--config")
            .arg(&cfg)
            .args(["gbdt", "--params"])
            .arg(&params)
            .arg("--potential-out")
            .arg(&out_a),
    );
    // config n = 21 rows, extent 1.0
    let rows = parse_csv(&out_a);
    assert_eq!(rows.len(), 21);
    assert!((rows.last().unwrap()[0] - 1.0).abs() < 1e-12);

    // explicit flag overrides the file value
    let out_b = dir.path().join("b.csv");
    run_ok(
        bin()
            .arg("--config")
            .arg(&cfg)
            .args(["gbdt", "--params"])
            .arg(&params)
            .args(["--N", "11"])
            .arg("--potential-out")
            .arg(&out_b),
    );
    assert_eq!(parse_csv(&out_b).len(), 11);
}
