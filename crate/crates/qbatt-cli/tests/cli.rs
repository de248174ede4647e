//! End-to-end tests of the `qbatt` binary and the run/sweep plumbing:
//! byte determinism, summary/CSV consistency, config error reporting.

use std::fs;
use std::path::Path;
use std::process::Command;

use qbatt_cli::config::{resolve, RawConfig};
use qbatt_cli::output::{read_trajectory_csv, parse_f64};
use qbatt_cli::runner;

fn qbatt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qbatt"))
}

fn run_preset_into(dir: &Path, preset: &str, extra: &[&str]) {
    let out = qbatt()
        .args(["run", preset, "--out", dir.to_str().unwrap()])
        .args(extra)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "qbatt run {preset} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn list_presets_names_them_all() {
    let out = qbatt().arg("--list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in qbatt_core::models::presets::PRESET_NAMES {
        assert!(text.contains(name), "--list-presets misses {name}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    run_preset_into(&dir_a, "fig3-mu", &["--seed", "7"]);
    run_preset_into(&dir_b, "fig3-mu", &["--seed", "7"]);
    for file in ["fig3-mu.csv", "summary.csv"] {
        let a = fs::read(dir_a.join(file)).unwrap();
        let b = fs::read(dir_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn summary_is_consistent_with_the_csv() {
    let tmp = tempfile::tempdir().unwrap();
    run_preset_into(tmp.path(), "fig3-mu", &[]);
    let csv = fs::read_to_string(tmp.path().join("fig3-mu.csv")).unwrap();
    let traj = read_trajectory_csv(&csv).unwrap();

    // recompute the headline statistics from the written rows
    let mut max_dw = f64::NEG_INFINITY;
    let mut t_at = 0.0;
    let mut max_p = f64::NEG_INFINITY;
    let mut t_at_p = 0.0;
    for r in &traj.rows {
        if r.dw > max_dw {
            max_dw = r.dw;
            t_at = r.t;
        }
        if r.p.abs() > max_p {
            max_p = r.p.abs();
            t_at_p = r.t;
        }
    }

    // and the saturation fraction / worst geometric slack the same way
    let mut saturated = 0usize;
    let mut geo_samples = 0usize;
    let mut min_slack_geo = f64::INFINITY;
    for r in &traj.rows {
        let abs_p = r.p.abs();
        if r.bound_geo.is_finite() {
            geo_samples += 1;
            min_slack_geo = min_slack_geo.min(r.bound_geo - abs_p);
            if r.bound_geo - abs_p <= 1e-3 * r.bound_geo.abs().max(1.0) {
                saturated += 1;
            }
        }
    }
    let saturation = saturated as f64 / geo_samples as f64;

    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    let line = summary.lines().nth(1).unwrap();
    let cols: Vec<&str> = line.split(',').collect();
    assert_eq!(cols[0], "fig3-mu");
    assert_eq!(parse_f64(cols[1]).unwrap().to_bits(), max_dw.to_bits());
    assert_eq!(parse_f64(cols[2]).unwrap().to_bits(), t_at.to_bits());
    assert_eq!(parse_f64(cols[3]).unwrap().to_bits(), max_p.to_bits());
    assert_eq!(parse_f64(cols[4]).unwrap().to_bits(), t_at_p.to_bits());
    assert_eq!(parse_f64(cols[5]).unwrap().to_bits(), saturation.to_bits());
    assert_eq!(
        parse_f64(cols[6]).unwrap().to_bits(),
        min_slack_geo.to_bits()
    );
}

#[test]
fn config_file_run_with_unknown_key_fails_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "preset = fig3-mu\nwarp_factor = 9\n").unwrap();
    let out = qbatt()
        .args(["run", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warp_factor"), "stderr was: {err}");
}

#[test]
fn run_rejects_missing_target() {
    let out = qbatt().args(["run", "no-such-preset-or-file"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn cli_overrides_reach_the_grid() {
    let tmp = tempfile::tempdir().unwrap();
    run_preset_into(tmp.path(), "fig3-mu", &["--tmax", "1.0"]);
    let csv = fs::read_to_string(tmp.path().join("fig3-mu.csv")).unwrap();
    let traj = read_trajectory_csv(&csv).unwrap();
    let t_last = traj.rows.last().unwrap().t;
    assert!((t_last - 1.0).abs() < 1e-12, "t_max override ignored: {t_last}");
}

#[test]
fn sweep_over_lambda_reproduces_the_markovianity_comparison() {
    // R ∈ {0.01, 10} at fixed underdamped κ: the strongly coupled point
    // stores strictly more work
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sweep.cfg");
    fs::write(
        &cfg,
        "preset = fig3-mu\nsweep.lambda = 10,0.01\ndt = 0.001\nworkers = 2\npositivity_floor = -1e-3\n",
    )
    .unwrap();
    let out = qbatt()
        .args([
            "sweep",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "sweep failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = fs::read_to_string(tmp.path().join("out/summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let dw_of = |line: &str| parse_f64(line.split(',').nth(1).unwrap()).unwrap();
    let markovian = dw_of(rows[0]); // lambda = 10 first in the declared grid
    let non_markovian = dw_of(rows[1]);
    assert!(rows[0].contains("lambda=10"));
    assert!(rows[1].contains("lambda=0.01"));
    assert!(
        non_markovian > markovian,
        "expected non-Markovian point to store more work: {non_markovian} vs {markovian}"
    );
}

#[test]
fn sweep_without_grid_errors_naming_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("nosweep.cfg");
    fs::write(&cfg, "preset = fig3-mu\n").unwrap();
    let out = qbatt().args(["sweep", cfg.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sweep"), "stderr was: {err}");
}

#[test]
fn sweep_workers_do_not_change_output() {
    let write_cfg = |dir: &Path, workers: usize| {
        let cfg = dir.join("sweep.cfg");
        fs::write(
            &cfg,
            format!(
                "preset = fig3-mu\nsweep.eta = 0.05,0.1,0.2\nt_max = 2.0\nworkers = {workers}\n"
            ),
        )
        .unwrap();
        cfg
    };
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    fs::create_dir_all(&dir_a).unwrap();
    fs::create_dir_all(&dir_b).unwrap();
    for (dir, workers) in [(&dir_a, 1usize), (&dir_b, 2usize)] {
        let cfg = write_cfg(dir, workers);
        let mut raw = RawConfig::load(&cfg).unwrap();
        raw.set("out", dir.join("out").display().to_string());
        let resolved = resolve(&raw).unwrap();
        runner::sweep(&resolved).unwrap();
    }
    let a = fs::read(dir_a.join("out/summary.csv")).unwrap();
    let b = fs::read(dir_b.join("out/summary.csv")).unwrap();
    assert_eq!(a, b, "worker count changed sweep output");
}

#[test]
fn written_columns_match_the_closed_form() {
    // fig1a end to end through the binary: the battery population is
    // p(t) = (4/9)sin²(3t/2), so W_max = p, dW = p, and P = ṗ (ω₀ = J = 1)
    let tmp = tempfile::tempdir().unwrap();
    run_preset_into(tmp.path(), "fig1a", &[]);
    let csv = fs::read_to_string(tmp.path().join("fig1a.csv")).unwrap();
    let traj = read_trajectory_csv(&csv).unwrap();
    assert_eq!(traj.rows.len(), 2001);
    for r in traj.rows.iter().step_by(97) {
        let p = 4.0 / 9.0 * (1.5 * r.t).sin().powi(2);
        let p_dot = 4.0 / 9.0 * 1.5 * (3.0 * r.t).sin();
        assert!((r.w_max - p).abs() <= 1e-12, "t={}: W {} vs {p}", r.t, r.w_max);
        assert!((r.dw - p).abs() <= 1e-12);
        assert!((r.p - p_dot).abs() <= 1e-12, "t={}: P {} vs {p_dot}", r.t, r.p);
        assert!(r.f_t.is_nan());
        assert_eq!(r.trace_err, 0.0);
    }
}

#[test]
fn fig5_preset_writes_both_trajectories() {
    let tmp = tempfile::tempdir().unwrap();
    run_preset_into(tmp.path(), "fig5", &[]);
    assert!(tmp.path().join("fig5-nm.csv").exists());
    assert!(tmp.path().join("fig5-m.csv").exists());
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}
