//! Run and sweep orchestration.
//!
//! `run` executes every job of the resolved configuration and writes one
//! trajectory CSV per job plus `summary.csv`. `sweep` expands the Cartesian
//! sweep grids into points, executes them across a worker pool (each worker
//! owns its trajectory end to end), and writes results in point order from
//! the collecting thread so the output is byte-deterministic regardless of
//! scheduling.

use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};

use qbatt_core::analysis::{run_job, summarize, Summary, Trajectory};
use qbatt_core::models::presets::Job;

use crate::config::{apply_override, ResolvedConfig};
use crate::output::{write_summary_csv, write_trajectory_csv};

/// Execute the configured jobs and write CSVs; returns the summaries.
pub fn run(config: &ResolvedConfig) -> Result<Vec<Summary>> {
    let out = &config.options.out_dir;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;

    let mut summaries = Vec::new();
    for job in &config.jobs {
        let traj = run_job(job).map_err(|e| anyhow!("{}: {e}", job.label))?;
        write_csv(out, &traj)?;
        summaries.push(summarize(&traj));
    }
    write_summary(out, &summaries, config.options.seed)?;
    Ok(summaries)
}

/// One sweep point: the base job with a set of scalar overrides applied.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub label: String,
    pub job: Job,
}

/// Expand the sweep grids into concrete points (Cartesian product, last
/// declared key varying fastest).
pub fn expand_sweep(config: &ResolvedConfig) -> Result<Vec<SweepPoint>> {
    if config.sweeps.is_empty() {
        bail!("`sweep` requires at least one `sweep.<param>` grid in the configuration");
    }
    if config.jobs.len() != 1 {
        bail!(
            "`sweep` needs a single-trajectory base configuration, but this one expands to {} trajectories",
            config.jobs.len()
        );
    }
    let base = &config.jobs[0];

    let grids: Vec<(&str, Vec<f64>)> = config
        .sweeps
        .iter()
        .map(|(k, vs)| {
            let parsed: Vec<f64> = vs.iter().map(|v| v.parse().unwrap()).collect();
            (k.as_str(), parsed)
        })
        .collect();

    let total: usize = grids.iter().map(|(_, v)| v.len()).product();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut job = base.clone();
        let mut rem = index;
        let mut parts = Vec::with_capacity(grids.len());
        for (key, values) in grids.iter().rev() {
            let v = values[rem % values.len()];
            rem /= values.len();
            apply_override(&mut job, key, v).map_err(|e| anyhow!("{e}"))?;
            parts.push(format!("{key}={v}"));
        }
        parts.reverse(); // label lists the keys in declaration order
        let label = format!("point{index:04}-{}", parts.join("-"));
        job.label = label.clone();
        points.push(SweepPoint { index, label, job });
    }
    Ok(points)
}

/// Execute a sweep; workers run points concurrently, results are written in
/// point order.
pub fn sweep(config: &ResolvedConfig) -> Result<Vec<Summary>> {
    let points = expand_sweep(config)?;
    let out = &config.options.out_dir;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;

    let n = points.len();
    let workers = config.options.workers.min(n).max(1);
    let results: Mutex<Vec<Option<Result<Trajectory, String>>>> =
        Mutex::new((0..n).map(|_| None).collect());
    let next: AtomicUsize = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= n {
                    break;
                }
                let outcome = run_job(&points[idx].job).map_err(|e| e.to_string());
                results.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });

    let results = results.into_inner().unwrap();
    let mut summaries = Vec::with_capacity(n);
    for (point, outcome) in points.iter().zip(results) {
        let traj = outcome
            .expect("worker filled every slot")
            .map_err(|e| anyhow!("{}: {e}", point.label))?;
        if config.options.sweep_csv {
            write_csv(out, &traj)?;
        }
        summaries.push(summarize(&traj));
    }
    write_summary(out, &summaries, config.options.seed)?;
    Ok(summaries)
}

fn write_csv(out: &Path, traj: &Trajectory) -> Result<()> {
    let path = out.join(format!("{}.csv", traj.label));
    let file = fs::File::create(&path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_trajectory_csv(&mut w, traj)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn write_summary(out: &Path, summaries: &[Summary], seed: u64) -> Result<()> {
    let path = out.join("summary.csv");
    let file = fs::File::create(&path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_summary_csv(&mut w, summaries, seed)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
