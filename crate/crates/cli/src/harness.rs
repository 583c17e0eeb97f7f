//! Grid-convergence and entropy-versus-time-step experiments.

use std::fmt::Write as _;

use esmhd::diagnostics::{alfven_error, log_log_slope, total_entropy, Norm};
use esmhd::problems::{make_problem, ProblemConfig};
use esmhd::reconstruction::Reconstruction;
use esmhd::solver::{FluxKind, Scheme, SolverError, TimeControl, TimeIntegrator};
use rayon::prelude::*;

/// Smooth Alfven wave errors of one reconstruction at one resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub reconstruction: Reconstruction,
    pub n: usize,
    pub l1: f64,
    pub l2: f64,
    /// Against the previous resolution of the same reconstruction.
    pub eoc_l1: Option<f64>,
    pub eoc_l2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceSetup {
    pub flux: FluxKind,
    pub integrator: TimeIntegrator,
    pub dt: f64,
    pub t_end: f64,
}

impl Default for ConvergenceSetup {
    fn default() -> Self {
        Self {
            flux: FluxKind::Kepes,
            integrator: TimeIntegrator::Ssprk3,
            dt: 1e-5,
            t_end: 1.0,
        }
    }
}

fn alfven_run(n: usize, rec: Reconstruction, setup: ConvergenceSetup) -> Result<(f64, f64), SolverError> {
    let mut sim = make_problem("alfven")
        .expect("alfven is a known problem")
        .with_resolution([n, 1, 1])
        .simulation(
            Scheme::new(setup.flux, rec),
            TimeControl {
                integrator: setup.integrator,
                cfl: 0.8,
                dt_fixed: Some(setup.dt),
            },
        )?;
    sim.advance_to(setup.t_end, |_, _| {})?;
    Ok((
        alfven_error(&sim.field, &sim.grid, sim.t, Norm::L1),
        alfven_error(&sim.field, &sim.grid, sim.t, Norm::L2),
    ))
}

/// Runs every `(reconstruction, n)` pair in parallel; rows come back grouped
/// by reconstruction with `ns` in the given order.
pub fn convergence_study(
    ns: &[usize],
    recs: &[Reconstruction],
    setup: ConvergenceSetup,
) -> Result<Vec<ConvergenceRow>, SolverError> {
    let jobs: Vec<(Reconstruction, usize)> = recs.iter().flat_map(|&r| ns.iter().map(move |&n| (r, n))).collect();
    let errors: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(r, n)| alfven_run(n, r, setup))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(jobs.len());
    for (chunk, errs) in jobs.chunks(ns.len()).zip(errors.chunks(ns.len())) {
        for (k, (&(r, n), &(l1, l2))) in chunk.iter().zip(errs).enumerate() {
            let rate = |prev: f64, cur: f64, j: usize| (prev / cur).ln() / (n as f64 / chunk[j].1 as f64).ln();
            let (eoc_l1, eoc_l2) = match k.checked_sub(1) {
                Some(j) => (Some(rate(errs[j].0, l1, j)), Some(rate(errs[j].1, l2, j))),
                None => (None, None),
            };
            rows.push(ConvergenceRow {
                reconstruction: r,
                n,
                l1,
                l2,
                eoc_l1,
                eoc_l2,
            });
        }
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("reconstruction,n,l1,l2,eoc_l1,eoc_l2\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.6e},{:.6e},{},{}",
            r.reconstruction,
            r.n,
            r.l1,
            r.l2,
            opt(r.eoc_l1),
            opt(r.eoc_l2)
        );
    }
    s
}

/// Errors below this are treated as round-off and left out of slope fits.
pub const ENTROPY_FIT_FLOOR: f64 = 1e-11;
/// Slope fits use at most this many of the smallest admissible steps.
pub const ENTROPY_FIT_POINTS: usize = 6;

/// Step counts `round(10^(k/4))`, `k = 0..=12`: log-spaced from 1 to 1000.
pub fn default_step_counts() -> Vec<usize> {
    (0..=12).map(|k| 10f64.powf(k as f64 / 4.0).round() as usize).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPoint {
    pub steps: usize,
    pub dt: f64,
    /// `|S(t_end) - S(0)|`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropySweep {
    pub integrator: TimeIntegrator,
    pub points: Vec<EntropyPoint>,
}

impl EntropySweep {
    /// Points entering the slope fit: error at or above
    /// [`ENTROPY_FIT_FLOOR`], the [`ENTROPY_FIT_POINTS`] smallest steps.
    pub fn fit_points(&self) -> Vec<EntropyPoint> {
        let mut pts: Vec<EntropyPoint> = self.points.iter().copied().filter(|p| p.error >= ENTROPY_FIT_FLOOR).collect();
        pts.sort_by(|a, b| a.dt.total_cmp(&b.dt));
        pts.truncate(ENTROPY_FIT_POINTS);
        pts
    }

    pub fn slope(&self) -> Option<f64> {
        let pts = self.fit_points();
        if pts.len() < 2 {
            return None;
        }
        let dt: Vec<f64> = pts.iter().map(|p| p.dt).collect();
        let err: Vec<f64> = pts.iter().map(|p| p.error).collect();
        Some(log_log_slope(&dt, &err))
    }

    /// Error at the smallest step.
    pub fn floor(&self) -> Option<f64> {
        self.points.iter().min_by(|a, b| a.dt.total_cmp(&b.dt)).map(|p| p.error)
    }
}

/// Entropy conservation error of the entropy-conserving flux with first-order
/// interface values, for each step count over `problem.t_end`.
pub fn entropy_sweep(
    problem: &ProblemConfig,
    integrator: TimeIntegrator,
    step_counts: &[usize],
) -> Result<EntropySweep, SolverError> {
    let points = step_counts
        .par_iter()
        .map(|&steps| {
            let dt = problem.t_end / steps as f64;
            let mut sim = problem.simulation(
                Scheme::new(FluxKind::Kepec, Reconstruction::Constant),
                TimeControl {
                    integrator,
                    cfl: 0.8,
                    dt_fixed: Some(dt),
                },
            )?;
            let s0 = total_entropy(&sim.field, &sim.grid, sim.gas)?;
            sim.advance_to(problem.t_end, |_, _| {})?;
            let s1 = total_entropy(&sim.field, &sim.grid, sim.gas)?;
            Ok(EntropyPoint {
                steps,
                dt,
                error: (s1 - s0).abs(),
            })
        })
        .collect::<Result<Vec<_>, SolverError>>()?;
    Ok(EntropySweep { integrator, points })
}

pub fn entropy_csv(sweeps: &[EntropySweep]) -> String {
    let mut s = String::from("integrator,steps,dt,entropy_err\n");
    for sw in sweeps {
        for p in &sw.points {
            let _ = writeln!(s, "{},{},{:.6e},{:.6e}", sw.integrator, p.steps, p.dt, p.error);
        }
    }
    s
}
