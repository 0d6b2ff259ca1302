use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rsplit::io::{self, GrayImage, PgmEncoding};
use rsplit::oracles::descent_auditor;
use serde_json::Value;
use tempfile::TempDir;

fn rsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsplit")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let o = rsplit(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every file under `dir`, relative path and bytes, sorted.
fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn lad_trace_passes_descent_audit() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("lad");
    run_ok(&["lad", "--out", path(&out), "--m", "80", "--n", "8", "--nu", "0.5", "--max-iter", "400"]);
    let trace = io::parse_trace_csv(&fs::read_to_string(out.join("trace.csv")).unwrap()).unwrap();
    assert!(trace.len() > 2);
    let r = descent_auditor(&trace, 0.5);
    assert!(r.pass, "{r:?}");
    let s = summary(&out);
    assert!(s["rel_error"].as_f64().unwrap() < s["ls_rel_error"].as_f64().unwrap());
    let plot = csv_rows(&out.join("plot.csv"));
    assert_eq!(plot[0], ["iter", "objective", "log10_objective", "optimality", "log10_optimality"]);
    assert_eq!(plot.len(), trace.len() + 1);
}

#[test]
fn phase_example_recovers_signal() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("phase");
    run_ok(&["phase", "--out", path(&out)]);
    let s = summary(&out);
    assert!(s["phase_error"].as_f64().unwrap() <= 1e-6, "{s}");
    assert_eq!(s["driver"], "phase");
    assert!(s["transforms"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors_exit_one_and_write_nothing() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("never");
    let o = path(&out);
    for args in [
        vec!["lad"],
        vec!["lad", "--out", o, "--kappa", "2"],
        vec!["lad", "--out", o, "--nu", "-1"],
        vec!["lad", "--out", o, "--bogus"],
        vec!["phase", "--out", o, "--n", "48"],
        vec!["ssp", "--out", o, "--schedule", "1:2:0.1"],
        vec!["sweep", "--out", o, "--driver", "lad", "--param", "m", "--values", "1.5"],
        vec!["sweep", "--out", o, "--driver", "lad", "--param", "nu", "--values", "1", "--nu", "2"],
        vec!["phase-trimmed", "--out", o, "--tau", "1.5"],
        vec!["nope", "--out", o],
    ] {
        let r = rsplit(&args);
        assert_eq!(r.status.code(), Some(1), "{args:?}");
        assert!(!r.stderr.is_empty(), "{args:?}");
        assert!(!out.exists(), "{args:?} wrote output");
    }
    let r = rsplit(&["lad", "--out", o, "--kappa", "2"]);
    assert!(String::from_utf8_lossy(&r.stderr).contains("--kappa"));
}

#[test]
fn help_exits_zero() {
    let r = rsplit(&["--help"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("sweep"));
}

#[test]
fn missing_data_directory_is_an_error() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o");
    let data = t.path().join("absent");
    let r = rsplit(&["lad", "--out", path(&out), "--data", path(&data)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn reruns_are_byte_identical() {
    let t = TempDir::new().unwrap();
    for driver in ["lad", "cluster", "phase-trimmed"] {
        let a = t.path().join(format!("{driver}-a"));
        let b = t.path().join(format!("{driver}-b"));
        let extra: &[&str] = if driver == "lad" { &["--m", "60", "--n", "6"] } else { &[] };
        let mut args = vec![driver, "--out", path(&a)];
        args.extend_from_slice(extra);
        run_ok(&args);
        args[2] = path(&b);
        run_ok(&args);
        assert_eq!(tree(&a), tree(&b), "{driver}");
    }
}

#[test]
fn trace_out_redirects_the_trace() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o");
    let trace = t.path().join("elsewhere/run.csv");
    run_ok(&["lad", "--out", path(&out), "--m", "40", "--n", "4", "--trace-out", path(&trace)]);
    assert!(trace.exists());
    assert!(!out.join("trace.csv").exists());
}

#[test]
fn single_point_sweep_matches_plain_run() {
    let t = TempDir::new().unwrap();
    let plain = t.path().join("plain");
    let sw = t.path().join("sweep");
    run_ok(&["lad", "--out", path(&plain), "--m", "60", "--n", "6", "--nu", "0.7"]);
    run_ok(&["sweep", "--driver", "lad", "--param", "nu", "--values", "0.7", "--out", path(&sw), "--m", "60", "--n", "6"]);
    assert_eq!(fs::read(plain.join("trace.csv")).unwrap(), fs::read(sw.join("runs/000/trace.csv")).unwrap());
    assert_eq!(summary(&plain), summary(&sw.join("runs/000")));
    let rows = csv_rows(&sw.join("table.csv"));
    assert_eq!(rows.len(), 2);
    let s = summary(&plain);
    assert_eq!(rows[1][3].parse::<f64>().unwrap(), s["iterations"].as_f64().unwrap());
    assert_eq!(rows[1][4].parse::<f64>().unwrap(), s["final_objective"].as_f64().unwrap());
    assert_eq!(rows[1][5], "rel_error");
    assert_eq!(rows[1][6].parse::<f64>().unwrap(), s["rel_error"].as_f64().unwrap());
    assert_eq!(rows[1][7], "0.0");
}

#[test]
fn admm_compare_rs_needs_fewer_iterations() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("cmp");
    run_ok(&["admm-compare", "--out", path(&out), "--m", "100", "--n", "20", "--points", "4"]);
    let rows = csv_rows(&out.join("table.csv"));
    assert_eq!(rows[0][..3], ["rho", "rs_iterations", "admm_iterations"]);
    assert_eq!(rows.len(), 5);
    for r in &rows[1..] {
        let (rs, ad): (usize, usize) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert_eq!(r[3], "true");
        assert!(rs <= ad, "{r:?}");
    }
    assert_eq!(summary(&out)["rs_below_admm"], true);
}

#[test]
fn sslr_sweep_reports_mean_and_variance() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("sw");
    run_ok(&[
        "sweep", "--driver", "sslr", "--param", "gamma", "--values", "0,0.1", "--seeds", "3", "--m", "150", "--out",
        path(&out), "--tol", "1e-6",
    ]);
    let rows = csv_rows(&out.join("table.csv"));
    assert_eq!(rows[0].join(","), "param,value,seeds,mean_iterations,mean_objective,metric,mean,variance,converged_fraction");
    assert_eq!(rows.len(), 3);
    for (r, gamma) in rows[1..].iter().zip([0.0, 0.1]) {
        assert_eq!(r[0], "gamma");
        assert_eq!(r[1].parse::<f64>().unwrap(), gamma);
        assert_eq!(r[2], "3");
        assert_eq!(r[5], "test_accuracy");
        let (mean, var): (f64, f64) = (r[6].parse().unwrap(), r[7].parse().unwrap());
        assert!((0.5..=1.0).contains(&mean) && var >= 0.0);
    }
    // recompute the first row from the per-run summaries
    let acc: Vec<f64> = (0..3).map(|i| summary(&out.join(format!("runs/{i:03}")))["test_accuracy"].as_f64().unwrap()).collect();
    let mean = acc.iter().sum::<f64>() / 3.0;
    let var = acc.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 2.0;
    assert!((rows[1][6].parse::<f64>().unwrap() - mean).abs() < 1e-12);
    assert!((rows[1][7].parse::<f64>().unwrap() - var).abs() < 1e-12);
}

#[test]
fn saved_instances_load_back() {
    let t = TempDir::new().unwrap();
    for (driver, extra) in [("lad", vec!["--m", "50", "--n", "5"]), ("phase", vec!["--n", "32"]), ("cluster", vec![])] {
        let first = t.path().join(format!("{driver}-1"));
        let second = t.path().join(format!("{driver}-2"));
        let mut args = vec![driver, "--out", path(&first)];
        args.extend(extra.iter().copied());
        run_ok(&args);
        let inst = first.join("instance");
        run_ok(&[driver, "--out", path(&second), "--data", path(&inst)]);
        let x = if driver == "cluster" { "partition.txt" } else { "x.mtx" };
        assert_eq!(fs::read(first.join(x)).unwrap(), fs::read(second.join(x)).unwrap(), "{driver}");
        assert_eq!(fs::read(first.join("trace.csv")).unwrap(), fs::read(second.join("trace.csv")).unwrap(), "{driver}");
    }
}

#[test]
fn data_kind_mismatch_is_rejected() {
    let t = TempDir::new().unwrap();
    let first = t.path().join("lad");
    run_ok(&["lad", "--out", path(&first), "--m", "30", "--n", "3"]);
    let out = t.path().join("o");
    let r = rsplit(&["phase", "--out", path(&out), "--data", path(&first.join("instance"))]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn rpca_accepts_pgm_frames() {
    let t = TempDir::new().unwrap();
    // rank-two background with a bright block
    let mut m = rsplit::Matrix::from_fn(16, 24, |i, j| 0.2 + 0.4 * ((i as f64) / 16.0) * ((j as f64 + 1.0) / 24.0));
    for i in 4..7 {
        for j in 10..13 {
            m[(i, j)] = 1.0;
        }
    }
    let img = t.path().join("frame.pgm");
    fs::write(&img, io::write_pgm(&GrayImage::from_matrix(&m, 255), PgmEncoding::Binary)).unwrap();
    let out = t.path().join("o");
    let r = rsplit(&["rpca", "--out", path(&out), "--data", path(&img), "--rank", "2", "--max-iter", "60"]);
    assert!(matches!(r.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&r.stderr));
    let (bg, _) = io::read_pgm(&fs::read(out.join("background.pgm")).unwrap()).unwrap();
    assert_eq!((bg.width, bg.height), (24, 16));
    let (mask, _) = io::read_pgm(&fs::read(out.join("foreground.pgm")).unwrap()).unwrap();
    assert!(mask.pixels[4 * 24 + 11] > 0);
    let sweeps = csv_rows(&out.join("trace.csv"));
    assert_eq!(sweeps[0][0], "sweep");
}

#[test]
fn nonconvergence_exits_two_but_writes() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o");
    let r = rsplit(&["lad", "--out", path(&out), "--m", "50", "--n", "5", "--max-iter", "2"]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(summary(&out)["converged"], false);
}

#[test]
fn continuation_gap_respects_bound() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o");
    run_ok(&["continuation", "--out", path(&out), "--m", "60", "--n", "6", "--schedule", "1:0.5:0.05"]);
    let s = summary(&out);
    assert!(s["coupling_gap"].as_f64().unwrap() <= s["gap_bound"].as_f64().unwrap());
    let stages = s["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 5);
    assert!(out.join("stage_04.csv").exists());
}
