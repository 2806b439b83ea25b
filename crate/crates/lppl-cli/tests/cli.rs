//! End-to-end checks of the command-line surface: CSV ingestion rules,
//! report layouts, exit codes, and manifest-driven reruns.

use std::fs;
use std::path::Path;
use std::process::Command;

use lppl::{eval_lppl, LpplParams, PriceSeries, Scale};
use lppl_cli::error::CliError;
use lppl_cli::{load_csv, save_series};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lppl"))
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|_| panic!("missing {}", path.display()))
}

/// A noiseless series drawn from known parameters, saved as CSV.
fn noiseless_csv(dir: &Path, params: &LpplParams, days: i64) -> std::path::PathBuf {
    let values: Vec<f64> = (0..days).map(|t| eval_lppl(params, t as f64).unwrap()).collect();
    let series = PriceSeries::new(0, values, Scale::Raw).unwrap();
    let path = dir.join("input.csv");
    save_series(&path, &series).unwrap();
    path
}

fn truth() -> LpplParams {
    LpplParams { a: 900.0, b: -320.0, c: 0.12, t_c: 150.0, alpha: 0.45, omega: 6.5, phi: 1.1 }
}

#[test]
fn loads_log_prices_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prices.csv");
    write(&path, "t,price\n0,100\n1,110\n2,121\n");
    let series = load_csv(&path, true).unwrap();
    assert_eq!(series.values(), &[4.605170185988092, 4.700480365792417, 4.795790545596741]);
    assert_eq!(series.scale(), Scale::Log);
    assert_eq!(series.t0(), 0);
}

#[test]
fn gap_in_day_indices_is_reported_with_its_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gapped.csv");
    write(&path, "0,100\n2,121\n");
    match load_csv(&path, false) {
        Err(CliError::Gap { row, expected, got, .. }) => {
            assert_eq!((row, expected, got), (2, 1, 2));
        }
        other => panic!("expected a gap error, got {other:?}"),
    }
}

#[test]
fn negative_prices_cannot_be_log_loaded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.csv");
    write(&path, "0,100\n1,-3\n");
    assert!(matches!(load_csv(&path, true), Err(CliError::NonPositive { row: 2, .. })));
    assert!(load_csv(&path, false).is_ok());
}

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let series =
        PriceSeries::new(-3, vec![101.25, 99.5, 103.0625, 97.375, 100.0], Scale::Raw).unwrap();
    save_series(&path, &series).unwrap();
    assert_eq!(load_csv(&path, false).unwrap(), series);
}

#[test]
fn fit_command_recovers_noiseless_truth() {
    let dir = tempfile::tempdir().unwrap();
    let input = noiseless_csv(dir.path(), &truth(), 120);
    let out = dir.path().join("fit");
    let status = bin()
        .args(["fit", "--starts", "64", "--seed", "5", "--input"])
        .arg(&input)
        .arg("--output-dir")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let report: serde_json::Value = serde_json::from_str(&read(&out.join("fit.json"))).unwrap();
    assert_eq!(report["model"], "lppl");
    assert_eq!(report["n"], 7);
    assert!(report["converged"].as_bool().unwrap());
    let t = truth();
    for (name, want) in
        [("A", t.a), ("B", t.b), ("C", t.c), ("t_c", t.t_c), ("alpha", t.alpha), ("omega", t.omega), ("phi", t.phi)]
    {
        let got = report["params"][name].as_f64().unwrap();
        assert!(
            (got - want).abs() <= 1e-6 * want.abs(),
            "{name}: {got} vs {want}"
        );
    }
    for line in read(&out.join("residuals.csv")).lines().skip(1) {
        let r: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(r.abs() < 1e-6, "residual {r} should vanish on noiseless input");
    }
}

#[test]
fn power_law_fit_records_c_zero_and_n_five() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = truth();
    t.c = 0.0;
    let input = noiseless_csv(dir.path(), &t, 120);
    let out = dir.path().join("pl");
    let status = bin()
        .args(["fit", "--model", "power-law", "--starts", "48", "--seed", "5", "--input"])
        .arg(&input)
        .arg("--output-dir")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&out.join("fit.json"))).unwrap();
    assert_eq!(report["model"], "power-law");
    assert_eq!(report["n"], 5);
    assert_eq!(report["params"]["C"].as_f64().unwrap(), 0.0);
}

#[test]
fn sloppy_reports_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = noiseless_csv(dir.path(), &truth(), 120);
    for (out, threads) in [("t1", "1"), ("t3", "3")] {
        let status = bin()
            .args(["sloppy", "--starts", "48", "--seed", "9", "--threads", threads, "--input"])
            .arg(&input)
            .arg("--output-dir")
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for file in ["fit.json", "eigen.json", "eigen.csv"] {
        let a = read(&dir.path().join("t1").join(file));
        let b = read(&dir.path().join("t3").join(file));
        assert_eq!(a, b, "{file} differs between thread counts");
    }
    let eigen: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("t1").join("eigen.json"))).unwrap();
    assert_eq!(eigen["eigenvalues"].as_array().unwrap().len(), 7);
    assert_eq!(eigen["eigenvectors"][0].as_array().unwrap().len(), 7);
    assert!(eigen["orders_of_separation"].is_number());
    let header = read(&dir.path().join("t1").join("eigen.csv"));
    assert!(header.starts_with("lambda,A,B,C,t_c,alpha,omega,phi\n"));
}

#[test]
fn reruns_from_a_manifest_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = noiseless_csv(dir.path(), &truth(), 120);
    let first = dir.path().join("first");
    let status = bin()
        .args(["fit", "--starts", "48", "--seed", "5", "--input"])
        .arg(&input)
        .arg("--output-dir")
        .arg(&first)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let again = dir.path().join("again");
    let status = bin()
        .args(["rerun", "--threads", "2", "--manifest"])
        .arg(first.join("manifest.json"))
        .arg("--output-dir")
        .arg(&again)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for file in ["fit.json", "residuals.csv"] {
        assert_eq!(read(&first.join(file)), read(&again.join(file)), "{file} differs on rerun");
    }

    // Rerun into the recorded directory: the manifest itself must also
    // reproduce byte-for-byte.
    let manifest_before = read(&first.join("manifest.json"));
    let status = bin().args(["rerun", "--manifest"]).arg(first.join("manifest.json")).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(read(&first.join("manifest.json")), manifest_before);
}

#[test]
fn synth_track_and_mc_round_trip_through_their_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let s1 = dir.path().join("s1");
    let status = bin()
        .args(["synth", "--seed", "11", "--output-dir"])
        .arg(&s1)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let series = load_csv(&s1.join("series.csv"), false).unwrap();
    assert_eq!(series.len(), 834);

    let s2 = dir.path().join("s2");
    let status = bin()
        .args(["rerun", "--manifest"])
        .arg(s1.join("manifest.json"))
        .arg("--output-dir")
        .arg(&s2)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(read(&s1.join("series.csv")), read(&s2.join("series.csv")));

    let t1 = dir.path().join("t1");
    let status = bin()
        .args(["track", "--reference-day", "834", "--horizon", "30", "--stride", "15"])
        .args(["--starts", "12", "--seed", "6", "--input"])
        .arg(s1.join("series.csv"))
        .arg("--output-dir")
        .arg(&t1)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let track = read(&t1.join("track.csv"));
    assert!(track.starts_with("date,lambda1,lambda2,lambda3,lambda4\n"));
    assert_eq!(track.lines().count(), 3, "two evaluation dates plus the header");

    let t2 = dir.path().join("t2");
    let status = bin()
        .args(["rerun", "--manifest"])
        .arg(t1.join("manifest.json"))
        .arg("--output-dir")
        .arg(&t2)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(read(&t1.join("track.csv")), read(&t2.join("track.csv")));

    let m1 = dir.path().join("m1");
    let status = bin()
        .args([
            "mc", "--samples", "3", "--starts", "12", "--window-ends", "820:833:13", "--seed",
            "21", "--fit-seed", "4", "--output-dir",
        ])
        .arg(&m1)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let mc = read(&m1.join("mc.csv"));
    assert!(mc.starts_with("window_end,n_used,n_failed,mean_tc,std_tc,bias,lo80,hi80,lo95,hi95\n"));
    assert_eq!(mc.lines().count(), 3, "two window ends plus the header");

    let m2 = dir.path().join("m2");
    let status = bin()
        .args(["rerun", "--threads", "3", "--manifest"])
        .arg(m1.join("manifest.json"))
        .arg("--output-dir")
        .arg(&m2)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(read(&m1.join("mc.csv")), read(&m2.join("mc.csv")));
}

#[test]
fn exit_codes_distinguish_input_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();

    let out = bin()
        .args(["fit", "--input", "no/such/file.csv", "--output-dir"])
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "missing input should exit 1");

    let gapped = dir.path().join("gapped.csv");
    write(&gapped, "0,100\n2,121\n");
    let out = bin()
        .args(["fit", "--input"])
        .arg(&gapped)
        .arg("--output-dir")
        .arg(dir.path().join("y"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "gapped input should exit 1");
    assert!(String::from_utf8_lossy(&out.stderr).contains("day 2"));

    // A constant series has B = 0 exactly: C is unrecoverable and every
    // start fails, which is a numerical failure, not an input one.
    let flat = dir.path().join("flat.csv");
    let rows: String = (0..60).map(|t| format!("{t},100\n")).collect();
    write(&flat, &rows);
    let out = bin()
        .args(["fit", "--starts", "8", "--input"])
        .arg(&flat)
        .arg("--output-dir")
        .arg(dir.path().join("z"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "flat series should exit 2");

    let out = bin()
        .args(["fit", "--model", "nope", "--input"])
        .arg(&gapped)
        .arg("--output-dir")
        .arg(dir.path().join("w"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "unknown model should exit 1");
}
