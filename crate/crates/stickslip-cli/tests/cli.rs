//! End-to-end tests of the `stickslip` binary: exit codes, output shapes,
//! error reporting, and reproducibility of file outputs.

// Reference constants keep their full generator precision.
#![allow(clippy::excessive_precision)]

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stickslip"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn stribeck_curve_prints_exact_header_and_row_count() {
    let out = run(&["stribeck-curve", "--points", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "v,F");
    assert_eq!(lines.len(), 12);
    // Odd symmetric grid crosses v = 0 exactly; F(0) = 0.
    assert_eq!(lines[6], "0,0");
}

#[test]
fn phase_diagram_header_and_known_point() {
    let out = run(&[
        "phase-diagram",
        "--k-grid",
        "0.01",
        "--z-min",
        "0.5",
        "--z-max",
        "0.5",
        "--z-points",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,z,v");
    assert_eq!(lines[1], "0.01,0.5,0.011541560327111707");
}

#[test]
fn breakaway_sweep_lists_choices_in_request_order() {
    let out = run(&[
        "breakaway-sweep",
        "--k-grid",
        "0.1",
        "--choices",
        "stiction,coulomb",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,v_th,F_ba,choice");
    assert!(lines[1].ends_with(",stiction"));
    assert!(lines[2].ends_with(",coulomb"));
}

#[test]
fn simulate_emits_summary_block_with_breakaway() {
    let out = run(&["simulate", "--k", "2", "--sample-every", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t,x,v,z,F,u\n"));
    assert!(text.contains("\nk = 2\n"));
    assert!(text.contains("detector = z_th\n"));
    assert!(text.contains("t_ba = "));
    assert!(text.contains("F_ba_sim = "));
}

#[test]
fn params_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("params.txt");
    std::fs::write(
        &path,
        "F_c = 2\nF_s = 3\nsigma = 0\nV = 0.1\ndelta_exp = 1\ns = 1\n",
    )
    .unwrap();
    let out = run(&[
        "--params",
        path.to_str().unwrap(),
        "stribeck-curve",
        "--v-min",
        "-1",
        "--v-max",
        "1",
        "--points",
        "3",
    ]);
    assert!(out.status.success());
    // At |v| = 1 = 10 V the exponential is dead: F ≈ F_c + (F_s-F_c) e^{-10}.
    let last = stdout(&out).lines().last().unwrap().to_owned();
    let f: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((f - 2.0000453999297620).abs() < 1e-12, "got {f}");
}

#[test]
fn bad_params_file_reports_path_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("params.txt");
    std::fs::write(&path, "F_c = 1\nF_s = banana\n").unwrap();
    let out = run(&["--params", path.to_str().unwrap(), "stribeck-curve"]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("params.txt"), "stderr: {err}");
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn malformed_fit_row_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    std::fs::write(&path, "v,F\n0.1,1.2\n0.2,oops\n").unwrap();
    let out = run(&["fit", "--data", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn fit_too_few_points_is_an_identifiability_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    std::fs::write(&path, "0.1,1.2\n0.2,1.1\n").unwrap();
    let out = run(&["fit", "--data", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("identifiability"), "{}", stderr(&out));
}

#[test]
fn plot_without_out_dir_fails() {
    let out = run(&["--plot", "stribeck-curve"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--out"));
}

#[test]
fn empty_velocity_range_fails() {
    let out = run(&["stribeck-curve", "--v-min", "1", "--v-max", "1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("empty v-range"));
}

#[test]
fn out_dir_contains_table_manifest_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "--plot",
        "stribeck-curve",
        "--points",
        "16",
    ]);
    assert!(out.status.success());
    for name in [
        "stribeck-curve.csv",
        "stribeck-curve.svg",
        "stribeck-curve.manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("stribeck-curve.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["subcommand"], "stribeck-curve");
    assert_eq!(manifest["settings"]["points"], 16);
    assert_eq!(manifest["settings"]["format"], "csv");
    assert_eq!(manifest["params"]["f_s"], 1.5);
    let svg = std::fs::read_to_string(dir.path().join("stribeck-curve.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn json_format_produces_parsable_records() {
    let out = run(&[
        "--format",
        "json",
        "breakaway-sweep",
        "--k-grid",
        "0.5",
        "--choices",
        "average",
    ]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["choice"], "average");
    assert_eq!(rows[0]["k"], 0.5);
}

fn read_bytes(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn parallel_output_matches_sequential_byte_for_byte() {
    let seq = tempfile::tempdir().unwrap();
    let par = tempfile::tempdir().unwrap();
    let common = [
        "breakaway-sweep",
        "--k-grid",
        "0.01,0.1,1,10",
        "--choices",
        "coulomb,stiction,average,self-consistent",
    ];
    let a = bin()
        .args(["--out", seq.path().to_str().unwrap()])
        .args(common)
        .output()
        .unwrap();
    let b = bin()
        .args(["--out", par.path().to_str().unwrap(), "--parallel", "4"])
        .args(common)
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        read_bytes(&seq.path().join("breakaway-sweep.csv")),
        read_bytes(&par.path().join("breakaway-sweep.csv"))
    );
}

#[test]
fn fit_roundtrip_from_generated_curve() {
    let dir = tempfile::tempdir().unwrap();
    // Generate clean (v, F) samples with the tool itself, then fit from a
    // perturbed start provided via a params file.
    let gen = run(&[
        "stribeck-curve",
        "--v-min",
        "0.001",
        "--v-max",
        "0.8",
        "--points",
        "40",
    ]);
    assert!(gen.status.success());
    let data_path = dir.path().join("data.csv");
    std::fs::write(&data_path, stdout(&gen)).unwrap();
    let init_path = dir.path().join("init.txt");
    std::fs::write(
        &init_path,
        "F_c = 0.8\nF_s = 1.9\nsigma = 0.05\nV = 0.06\ndelta_exp = 1\ns = 1\n",
    )
    .unwrap();
    let out = run(&[
        "--params",
        init_path.to_str().unwrap(),
        "fit",
        "--data",
        data_path.to_str().unwrap(),
        "--mode",
        "stribeck",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let get = |key: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("missing {key} in:\n{text}"))
            .split(" = ")
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("F_c") - 1.0).abs() < 1e-3, "F_c = {}", get("F_c"));
    assert!((get("F_s") - 1.5).abs() < 1e-3, "F_s = {}", get("F_s"));
    assert!((get("V") - 0.1).abs() < 1e-3, "V = {}", get("V"));
    assert!(text.contains("converged = true"));
}
