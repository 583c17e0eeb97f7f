//! Run driver: one problem to its end time with snapshots and diagnostics.
//!
//! The output directory receives `config.txt` (the effective config),
//! `diagnostics.csv` (one row per accepted step plus the initial state) and
//! `snapshot_NNNN.{csv,bin}` files. When a step fails the last accepted
//! field is written to `snapshot_last_good.*`.

use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use esmhd::diagnostics::RunDiagnostics;
use esmhd::problems::{make_problem, ProblemConfig, UnknownProblem};
use esmhd::solver::{Scheme, Simulation, SolverError, TimeControl};

use crate::config::{ConfigError, RunConfig};
use crate::snapshot::{Snapshot, SnapshotFormat};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Problem(#[from] UnknownProblem),
    #[error("invalid setup: {0}")]
    Setup(SolverError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// What a run produced.
#[derive(Debug)]
pub struct RunSummary {
    pub steps: u64,
    pub t: f64,
    pub t_end: f64,
    pub snapshots: Vec<PathBuf>,
    /// The error that stopped the run early, if any.
    pub failure: Option<SolverError>,
}

impl RunSummary {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Problem preset with the resolution and end-time overrides of `cfg`.
pub fn resolve_problem(cfg: &RunConfig) -> Result<ProblemConfig, RunError> {
    let mut problem = make_problem(cfg.problem_name()?)?;
    let mut n = problem.resolution;
    for (dst, src) in n.iter_mut().zip(cfg.resolution) {
        if let Some(v) = src {
            *dst = v;
        }
    }
    problem = problem.with_resolution(n);
    if let Some(t) = cfg.tend {
        problem = problem.with_t_end(t);
    }
    Ok(problem)
}

pub fn build_simulation(cfg: &RunConfig) -> Result<(ProblemConfig, Simulation), RunError> {
    let problem = resolve_problem(cfg)?;
    let scheme = Scheme::new(cfg.flux, cfg.reconstruction);
    let time = TimeControl {
        integrator: cfg.integrator,
        cfl: cfg.cfl,
        dt_fixed: cfg.dt,
    };
    let sim = problem.simulation(scheme, time).map_err(RunError::Setup)?;
    Ok((problem, sim))
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_snapshot(sim: &Simulation, path: &Path, format: SnapshotFormat) -> Result<(), RunError> {
    let snap = Snapshot::from_simulation(sim).map_err(|e| RunError::Setup(e.into()))?;
    let file = BufWriter::new(File::create(path).map_err(io_err(path))?);
    match format {
        SnapshotFormat::Csv => snap.write_csv(file),
        SnapshotFormat::Bin => snap.write_bin(file),
    }
    .map_err(io_err(path))
}

fn write_diagnostics(diag: &RunDiagnostics, dir: &Path) -> Result<(), RunError> {
    let path = dir.join("diagnostics.csv");
    let file = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    diag.write_csv(file).map_err(io_err(&path))
}

/// Output times `every, 2 every, ...` strictly before `t_end`, then `t_end`.
pub fn output_times(t_end: f64, every: Option<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(dt) = every.filter(|d| *d > 0.0) {
        let mut k = 1u64;
        loop {
            let t = k as f64 * dt;
            if t >= t_end * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
    }
    out.push(t_end);
    out
}

pub fn execute(cfg: &RunConfig) -> Result<RunSummary, RunError> {
    let (problem, mut sim) = build_simulation(cfg)?;
    let dir = cfg.out.as_path();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let cfg_path = dir.join("config.txt");
    fs::write(&cfg_path, cfg.to_text()).map_err(io_err(&cfg_path))?;

    let ext = cfg.format.extension();
    let mut snapshots = Vec::new();
    let mut snap = |sim: &Simulation, name: String| -> Result<(), RunError> {
        let path = dir.join(name);
        write_snapshot(sim, &path, cfg.format)?;
        snapshots.push(path);
        Ok(())
    };
    snap(&sim, format!("snapshot_0000.{ext}"))?;

    let mut diag = RunDiagnostics::start(&sim).map_err(|e| RunError::Setup(e.into()))?;
    let mut failure = None;
    'outer: for (k, target) in output_times(problem.t_end, cfg.snapshot_every).into_iter().enumerate() {
        while sim.t < target {
            let info = match sim.step(target) {
                Ok(info) => info,
                Err(e) => {
                    failure = Some(e);
                    break 'outer;
                }
            };
            if let Err(e) = diag.record(&sim, info) {
                failure = Some(e.into());
                break 'outer;
            }
        }
        snap(&sim, format!("snapshot_{:04}.{ext}", k + 1))?;
    }
    if failure.is_some() {
        snap(&sim, format!("snapshot_last_good.{ext}"))?;
    }
    write_diagnostics(&diag, dir)?;
    Ok(RunSummary {
        steps: sim.steps,
        t: sim.t,
        t_end: problem.t_end,
        snapshots,
        failure,
    })
}
