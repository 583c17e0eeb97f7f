//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage, setup or IO errors, 2 when a run
//! stops on an inadmissible state.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use esmhd::problems::make_problem;
use esmhd::reconstruction::Reconstruction;
use esmhd::solver::{FluxKind, TimeIntegrator};

use crate::config::RunConfig;
use crate::harness::{self, ConvergenceSetup};
use crate::run;
use crate::snapshot::SnapshotFormat;

#[derive(Debug, Parser)]
#[command(name = "esmhd", version, about = "Entropy-stable finite-volume ideal MHD solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one problem to its end time.
    Run(RunArgs),
    /// Smooth Alfven wave error table over several resolutions.
    Convergence(ConvergenceArgs),
    /// Entropy conservation error against the time step.
    EntropyTest(EntropyArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub nz: Option<usize>,
    /// kepec, kepes or kepes-naive.
    #[arg(long)]
    pub flux: Option<FluxKind>,
    /// constant, linear or minmod.
    #[arg(long)]
    pub reconstruction: Option<Reconstruction>,
    /// euler, ssprk2 or ssprk3.
    #[arg(long)]
    pub integrator: Option<TimeIntegrator>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Fixed time step instead of the CFL step.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tend: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub snapshot_every: Option<f64>,
    /// csv or bin.
    #[arg(long)]
    pub format: Option<SnapshotFormat>,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            cfg.apply_text(&text)?;
        }
        if let Some(p) = &self.problem {
            cfg.problem = Some(p.clone());
        }
        for (dst, src) in cfg.resolution.iter_mut().zip([self.nx, self.ny, self.nz]) {
            if src.is_some() {
                *dst = src;
            }
        }
        if let Some(v) = self.flux {
            cfg.flux = v;
        }
        if let Some(v) = self.reconstruction {
            cfg.reconstruction = v;
        }
        if let Some(v) = self.integrator {
            cfg.integrator = v;
        }
        if let Some(v) = self.cfl {
            cfg.cfl = v;
        }
        if self.dt.is_some() {
            cfg.dt = self.dt;
        }
        if self.tend.is_some() {
            cfg.tend = self.tend;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if self.snapshot_every.is_some() {
            cfg.snapshot_every = self.snapshot_every;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "constant,minmod,linear")]
    pub reconstructions: Vec<Reconstruction>,
    #[arg(long, default_value = "kepes")]
    pub flux: FluxKind,
    #[arg(long, default_value = "ssprk3")]
    pub integrator: TimeIntegrator,
    #[arg(long, default_value_t = 1e-5)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tend: f64,
    /// Also write the table to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// briowu-entropy (1D) or briowu2d.
    #[arg(long, default_value = "briowu-entropy")]
    pub problem: String,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "euler,ssprk2,ssprk3")]
    pub integrators: Vec<TimeIntegrator>,
    /// Step counts over the end time; log-spaced 1..1000 by default.
    #[arg(long, value_delimiter = ',')]
    pub steps: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

fn set_threads(n: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<i32> {
    let cfg = args.resolve()?;
    set_threads(cfg.threads)?;
    let summary = run::execute(&cfg)?;
    match &summary.failure {
        None => {
            println!(
                "completed {} steps, t = {}, output in {}",
                summary.steps,
                summary.t,
                cfg.out.display()
            );
            Ok(0)
        }
        Some(e) => {
            eprintln!(
                "run stopped after {} steps at t = {} (t_end = {}): {e}",
                summary.steps, summary.t, summary.t_end
            );
            Ok(2)
        }
    }
}

fn cmd_convergence(args: &ConvergenceArgs) -> anyhow::Result<i32> {
    set_threads(args.threads)?;
    let setup = ConvergenceSetup {
        flux: args.flux,
        integrator: args.integrator,
        dt: args.dt,
        t_end: args.tend,
    };
    let rows = harness::convergence_study(&args.ns, &args.reconstructions, setup)?;
    let csv = harness::convergence_csv(&rows);
    print!("{csv}");
    if let Some(path) = &args.out {
        fs::write(path, &csv).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    }
    Ok(0)
}

fn cmd_entropy(args: &EntropyArgs) -> anyhow::Result<i32> {
    set_threads(args.threads)?;
    let mut problem = make_problem(&args.problem)?;
    let mut n = problem.resolution;
    if let Some(v) = args.nx {
        n[0] = v;
    }
    if let Some(v) = args.ny {
        n[1] = v;
    }
    problem = problem.with_resolution(n);
    let steps = if args.steps.is_empty() {
        harness::default_step_counts()
    } else {
        args.steps.clone()
    };
    let sweeps = args
        .integrators
        .iter()
        .map(|&i| harness::entropy_sweep(&problem, i, &steps))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = harness::entropy_csv(&sweeps);
    for sw in &sweeps {
        let slope = sw.slope().map(|s| format!("{s:.4}")).unwrap_or_else(|| "n/a".into());
        text.push_str(&format!(
            "# {} slope={slope} fit_points={} floor={:.3e}\n",
            sw.integrator,
            sw.fit_points().len(),
            sw.floor().unwrap_or(f64::NAN)
        ));
    }
    print!("{text}");
    if let Some(path) = &args.out {
        fs::write(path, &text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::EntropyTest(a) => cmd_entropy(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        1
    })
}
