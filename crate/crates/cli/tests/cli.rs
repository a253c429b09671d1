//! End-to-end tests of the `qparity` binary: exit codes, artifact schemas,
//! config/flag precedence.

use std::path::Path;
use std::process::{Command, Output};

use qparity::io::{read_qp_trace, read_spectrum, read_trace};
use qparity::qp::{gamma1_from_xqp, GapParams};

fn qparity(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qparity"))
        .args(args)
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .expect("binary runs")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(dir: &Path, command: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}_report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn dispersion_missing_key_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(dir.path(), &["dispersion", "--ec-ghz", "0.3"]);
    assert_exit(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ej_ghz"), "stderr: {stderr}");
}

#[test]
fn dispersion_ng_points_sets_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(
        dir.path(),
        &["dispersion", "--ej-ghz", "8.0", "--ec-ghz", "0.3", "--ng-points", "3"],
    );
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(dir.path().join("dispersion.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + 3 rows
}

#[test]
fn dispersion_q3_summary_matches_device_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(
        dir.path(),
        &["dispersion", "--f01-bar-ghz", "4.15", "--ej-over-ec", "28"],
    );
    assert_exit(&out, 0);
    let rep = report(dir.path(), "dispersion");
    let df = rep["results"]["delta_f_max_mhz"].as_f64().unwrap();
    assert!((df - 0.40).abs() / 0.40 < 0.25, "delta_f_max = {df} MHz");
}

#[test]
fn parity_artifacts_roundtrip_through_own_parsers() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(
        dir.path(),
        &[
            "parity", "--rate", "33.3", "--dt", "1e-3", "--duration", "0.5", "--fidelity",
            "0.9", "--seed", "11",
        ],
    );
    assert_exit(&out, 0);
    let trace = read_trace(std::fs::File::open(dir.path().join("trace.csv")).unwrap()).unwrap();
    assert_eq!(trace.values.len(), 500);
    assert!((trace.dt - 1e-3).abs() < 1e-12);
    let spec =
        read_spectrum(std::fs::File::open(dir.path().join("spectrum.csv")).unwrap()).unwrap();
    spec.validate().unwrap();
    let rep = report(dir.path(), "parity");
    assert!(rep["results"]["fit"]["rate_hz"].as_f64().unwrap() > 0.0);
}

#[test]
fn parity_constant_trace_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    let mut csv = String::from("t_s,parity\n");
    for k in 0..500 {
        csv.push_str(&format!("{},1\n", k as f64 * 1e-3));
    }
    std::fs::write(&path, csv).unwrap();
    let out = qparity(dir.path(), &["parity", "--trace", path.to_str().unwrap()]);
    assert_exit(&out, 3);
}

#[test]
fn parity_batch_reports_median_and_iqr() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(
        dir.path(),
        &[
            "parity", "--rate", "33.3", "--dt", "1e-3", "--duration", "0.5", "--fidelity",
            "0.9", "--batch", "8", "--seed", "1",
        ],
    );
    assert_exit(&out, 0);
    let rep = report(dir.path(), "parity");
    assert_eq!(rep["results"]["batch"].as_u64(), Some(8));
    assert!(rep["results"]["rate_median_hz"].as_f64().unwrap() > 0.0);
    assert!(rep["results"]["rate_iqr_hz"].as_f64().unwrap() >= 0.0);
    assert_eq!(rep["results"]["fits"].as_array().unwrap().len(), 8);
}

#[test]
fn config_file_keys_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "ej_ghz = 8.0\nec_ghz = 0.3\nng_points = 5\nseed = 9\n").unwrap();
    let out = qparity(
        dir.path(),
        &["dispersion", "--config", config.to_str().unwrap(), "--ng-points", "3"],
    );
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(dir.path().join("dispersion.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "flag overrides the config value");
    let rep = report(dir.path(), "dispersion");
    assert_eq!(rep["seed"].as_u64(), Some(9), "seed comes from the config");
}

#[test]
fn config_unknown_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "ej_ghz = 8.0\nec_ghz = 0.3\nno_such_key = 1\n").unwrap();
    let out = qparity(dir.path(), &["dispersion", "--config", config.to_str().unwrap()]);
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
}

#[test]
fn qp_simulation_recovers_trapping_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(dir.path(), &["qp", "--s-per-ms", "6.52", "--x0", "1e-6"]);
    assert_exit(&out, 0);
    let rep = report(dir.path(), "qp");
    let row = &rep["results"]["recovery_table"][0];
    let s = row["s_per_ms"].as_f64().unwrap();
    assert!((s - 6.52).abs() < 1e-6, "s = {s} ms^-1");
    assert_eq!(row["unresolved"].as_bool(), Some(false));
    let trace =
        read_qp_trace(std::fs::File::open(dir.path().join("xqp_trace.csv")).unwrap()).unwrap();
    assert_eq!(trace.times.len(), 200);
}

#[test]
fn qp_gamma1_input_converts_before_fitting() {
    // The decay-rate file is generated from a known density trace through
    // the inverse conversion; the fitted s must match the density truth.
    let dir = tempfile::tempdir().unwrap();
    let gap = GapParams::new(200.0, 4.15).unwrap();
    let (s, x0) = (6.52e3, 1e-6);
    let mut csv = String::from("tau_qp_s,delta_gamma1_per_s\n");
    for k in 0..40 {
        let t = k as f64 * 5e-5;
        let g = gamma1_from_xqp(x0 * (-s * t).exp(), &gap).unwrap();
        csv.push_str(&format!("{t},{g}\n"));
    }
    let path = dir.path().join("gamma1.csv");
    std::fs::write(&path, csv).unwrap();
    let out = qparity(
        dir.path(),
        &[
            "qp", "--gamma1-trace", path.to_str().unwrap(), "--delta-uev", "200",
            "--f-q-ghz", "4.15",
        ],
    );
    assert_exit(&out, 0);
    let rep = report(dir.path(), "qp");
    let fitted = rep["results"]["recovery_table"][0]["s_per_ms"].as_f64().unwrap();
    assert!((fitted - 6.52).abs() / 6.52 < 1e-8, "s = {fitted} ms^-1");
}

#[test]
fn qp_comparison_table_flags_unresolved_dataset() {
    // Two datasets: a clean exponential and a recombination-dominated decay
    // spanning less than a decade. The second gets an empty s cell.
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("trapping.csv");
    let mut csv = String::from("tau_qp_s,x_qp\n");
    for k in 0..40 {
        let t = k as f64 * 1e-4;
        csv.push_str(&format!("{t},{}\n", 1e-6 * (-6.52e3 * t).exp()));
    }
    std::fs::write(&clean, csv).unwrap();
    let flat = dir.path().join("recombination.csv");
    let mut csv = String::from("tau_qp_s,x_qp\n");
    for k in 0..40 {
        let t = k as f64 * 1e-4;
        csv.push_str(&format!("{t},{}\n", 1e-6 / (1.0 + 1e3 * t)));
    }
    std::fs::write(&flat, csv).unwrap();
    let out = qparity(
        dir.path(),
        &[
            "qp", "--xqp-trace", clean.to_str().unwrap(), "--xqp-trace", flat.to_str().unwrap(),
            "--vortex-w-um", "10",
        ],
    );
    assert_exit(&out, 0);
    let rep = report(dir.path(), "qp");
    let table = rep["results"]["recovery_table"].as_array().unwrap();
    assert_eq!(table.len(), 2);
    assert_eq!(table[0]["unresolved"].as_bool(), Some(false));
    assert_eq!(table[1]["unresolved"].as_bool(), Some(true));
    assert!(table[1]["s_per_ms"].is_null());
    let b = rep["results"]["vortex_threshold_ut"].as_f64().unwrap();
    assert!((b - 20.7).abs() < 0.1, "threshold {b} uT");
}

#[test]
fn qp_short_trace_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.csv");
    std::fs::write(&path, "tau_qp_s,x_qp\n0,1e-6\n1e-4,5e-7\n2e-4,2.5e-7\n").unwrap();
    let out = qparity(dir.path(), &["qp", "--xqp-trace", path.to_str().unwrap()]);
    assert_exit(&out, 3);
}

#[test]
fn antenna_band_gap_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(
        dir.path(),
        &["antenna", "--e-c-const", "1.0", "--band", "120e9:200e9", "--t-points", "3"],
    );
    assert_exit(&out, 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("does not cover") && stderr.contains("1.200e11"),
        "stderr names the gap: {stderr}");
}

#[test]
fn antenna_two_tables_two_targets_reports_spread() {
    let dir = tempfile::tempdir().unwrap();
    let out = qparity(
        dir.path(),
        &[
            "antenna", "--toy", "xmon", "--toy", "two-pads", "--target-rate", "33.3",
            "--target-rate", "17.5", "--t-points", "3",
        ],
    );
    assert_exit(&out, 0);
    let rep = report(dir.path(), "antenna");
    let devices = rep["results"]["devices"].as_array().unwrap();
    assert_eq!(devices.len(), 2);
    for device in devices {
        for inv in device["inversions"].as_array().unwrap() {
            let t = inv["t_star_mk"].as_f64().unwrap();
            assert!((100.0..1000.0).contains(&t), "T* = {t} mK");
        }
    }
    assert_eq!(rep["results"]["delta_t_star"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("efficiency_synthetic_xmon_like.csv").exists());
    assert!(dir.path().join("rate_vs_t_synthetic_two_pads_like.csv").exists());
}

#[test]
fn output_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qparity"))
        .args(["dispersion", "--ej-ghz", "8.0", "--ec-ghz", "0.3"])
        .env("QPARITY_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("dispersion.csv").exists());
}
