//! Conservation totals, the entropy budget, a divergence monitor, analytic
//! error norms and convergence orders.
//!
//! All reductions use a pairwise tree over cells in x-fastest order, so the
//! result does not depend on the number of worker threads.

use std::io::{self, Write};

use crate::problems::alfven_exact;
use crate::solver::{Axis, Field, Grid, Simulation, StepInfo};
use crate::state::{cons_to_prim, GasModel, StateError};

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Volume integrals of the conserved hydrodynamic quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Totals {
    pub mass: f64,
    pub momentum: [f64; 3],
    pub energy: f64,
}

impl Totals {
    pub fn as_array(&self) -> [f64; 5] {
        [self.mass, self.momentum[0], self.momentum[1], self.momentum[2], self.energy]
    }
}

pub fn conserved_totals(field: &Field, grid: &Grid) -> Totals {
    let dv = grid.cell_volume();
    let cells: Vec<[usize; 3]> = grid.fluid_cells().collect();
    let sum = |k: usize| pairwise_sum(&cells.iter().map(|&c| field.get(c)[k]).collect::<Vec<_>>()) * dv;
    Totals {
        mass: sum(0),
        momentum: [sum(1), sum(2), sum(3)],
        energy: sum(4),
    }
}

/// `sum S dV` over fluid cells, with `S = -rho s / (gamma - 1)`.
pub fn total_entropy(field: &Field, grid: &Grid, g: GasModel) -> Result<f64, StateError> {
    let dv = grid.cell_volume();
    let values = grid
        .fluid_cells()
        .map(|c| {
            cons_to_prim(&field.conserved(c), g)
                .map(|w| w.entropy_density(g))
                .map_err(|e| e.at_cell(c))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(pairwise_sum(&values) * dv)
}

/// Cell-wise central-difference divergence of B and its maximum magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct DivB {
    /// Per interior cell, x-fastest; zero on solid cells.
    pub per_cell: Vec<f64>,
    pub max: f64,
}

/// Needs filled ghost layers.
pub fn div_b_estimate(field: &Field, grid: &Grid) -> DivB {
    let layout = grid.layout;
    let axes: Vec<Axis> = layout.active_axes().collect();
    let mut per_cell = vec![0.0; layout.interior_len()];
    let mut max = 0.0f64;
    for c in grid.fluid_cells() {
        let mut div = 0.0;
        for &axis in &axes {
            let comp = 5 + axis.index();
            let hi = field.data[layout.offset_index(c, axis, 1)][comp];
            let lo = field.data[layout.offset_index(c, axis, -1)][comp];
            div += (hi - lo) / (2.0 * grid.dx(axis));
        }
        per_cell[layout.interior_rank(c)] = div;
        max = max.max(div.abs());
    }
    DivB { per_cell, max }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

/// `sum |e| dV` or `sqrt(sum e^2 dV)` of `component - exact(center)` over
/// fluid cells.
pub fn error_norm(field: &Field, grid: &Grid, component: usize, exact: impl Fn([f64; 3]) -> f64, norm: Norm) -> f64 {
    let dv = grid.cell_volume();
    let errs: Vec<f64> = grid
        .fluid_cells()
        .map(|c| {
            let e = field.get(c)[component] - exact(grid.center(c));
            match norm {
                Norm::L1 => e.abs(),
                Norm::L2 => e * e,
            }
        })
        .collect();
    let s = pairwise_sum(&errs) * dv;
    match norm {
        Norm::L1 => s,
        Norm::L2 => s.sqrt(),
    }
}

/// Error in `B2` against the travelling Alfvén wave at time `t`.
pub fn alfven_error(field: &Field, grid: &Grid, t: f64, norm: Norm) -> f64 {
    error_norm(field, grid, 6, |x| alfven_exact(x[0], t).b.y, norm)
}

/// `log2(e_k / e_{k+1})` for errors on successively doubled grids.
pub fn eoc(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// One line of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub dt: f64,
    pub totals: Totals,
    pub entropy: f64,
    /// `|S(t) - S(0)|`.
    pub entropy_err: f64,
    pub div_b_max: f64,
    pub rho_min: f64,
    pub p_min: f64,
}

pub const CSV_HEADER: &str = "t,dt,mass,momx,momy,momz,energy,entropy,entropy_err,divB_max,rho_min,p_min";

impl DiagnosticsRow {
    pub fn to_csv(&self) -> String {
        let t = &self.totals;
        [
            self.t,
            self.dt,
            t.mass,
            t.momentum[0],
            t.momentum[1],
            t.momentum[2],
            t.energy,
            self.entropy,
            self.entropy_err,
            self.div_b_max,
            self.rho_min,
            self.p_min,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Time series of [`DiagnosticsRow`]s measured against the initial entropy.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunDiagnostics {
    pub rows: Vec<DiagnosticsRow>,
}

impl RunDiagnostics {
    /// Starts a series with the state of `sim` as its first row (`dt = 0`).
    pub fn start(sim: &Simulation) -> Result<Self, StateError> {
        let mut d = Self::default();
        d.push(sim, 0.0)?;
        Ok(d)
    }

    pub fn measure(sim: &Simulation, dt: f64, entropy0: Option<f64>) -> Result<DiagnosticsRow, StateError> {
        let g = sim.gas;
        let field = &sim.field;
        let grid = &sim.grid;
        let entropy = total_entropy(field, grid, g)?;
        let (mut rho_min, mut p_min) = (f64::INFINITY, f64::INFINITY);
        for c in grid.fluid_cells() {
            let w = cons_to_prim(&field.conserved(c), g).map_err(|e| e.at_cell(c))?;
            rho_min = rho_min.min(w.rho);
            p_min = p_min.min(w.p);
        }
        Ok(DiagnosticsRow {
            t: sim.t,
            dt,
            totals: conserved_totals(field, grid),
            entropy,
            entropy_err: (entropy - entropy0.unwrap_or(entropy)).abs(),
            div_b_max: div_b_estimate(field, grid).max,
            rho_min,
            p_min,
        })
    }

    pub fn push(&mut self, sim: &Simulation, dt: f64) -> Result<&DiagnosticsRow, StateError> {
        let row = Self::measure(sim, dt, self.initial_entropy())?;
        self.rows.push(row);
        Ok(self.rows.last().expect("row just pushed"))
    }

    pub fn record(&mut self, sim: &Simulation, info: StepInfo) -> Result<&DiagnosticsRow, StateError> {
        self.push(sim, info.dt)
    }

    pub fn initial_entropy(&self) -> Option<f64> {
        self.rows.first().map(|r| r.entropy)
    }

    /// Largest relative change of each conserved total against the first row.
    pub fn max_relative_drift(&self) -> [f64; 5] {
        let mut out = [0.0; 5];
        let Some(first) = self.rows.first() else {
            return out;
        };
        let base = first.totals.as_array();
        let scale = base.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for row in &self.rows {
            for (k, v) in row.totals.as_array().iter().enumerate() {
                let denom = if base[k].abs() > 0.0 { base[k].abs() } else { scale };
                out[k] = out[k].max((v - base[k]).abs() / denom);
            }
        }
        out
    }

    /// Largest single-step entropy increase relative to `|S|`.
    pub fn max_entropy_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| (w[1].entropy - w[0].entropy) / w[0].entropy.abs().max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(out, "{}", row.to_csv())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_problem, ProblemConfig};
    use crate::solver::{fill_ghosts, Boundaries, BoundaryCondition, Layout, Scheme, TimeControl};
    use crate::state::{PrimitiveState, Vector8};

    fn sim_of(cfg: &ProblemConfig) -> Simulation {
        cfg.simulation(Scheme::default(), TimeControl::default()).unwrap()
    }

    #[test]
    fn pairwise_matches_exact_sum() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn entropy_of_reference_state_is_zero() {
        let g = GasModel::new(1.4).unwrap();
        let grid = Grid::new([8, 4, 1], [0.0; 3], [1.0; 3]).unwrap();
        let field = crate::solver::initial_field(&grid, g, |_| PrimitiveState::new(1.0, [0.3, 0.0, 0.0], 1.0, [1.0; 3]));
        assert!(total_entropy(&field, &grid, g).unwrap().abs() < 1e-14);
    }

    #[test]
    fn entropy_total_is_volume_weighted() {
        let g = GasModel::new(2.0).unwrap();
        let grid = Grid::new([10, 1, 1], [0.0; 3], [2.0, 1.0, 1.0]).unwrap();
        let w = PrimitiveState::new(2.0, [0.0; 3], 1.0, [0.0; 3]);
        let field = crate::solver::initial_field(&grid, g, |_| w);
        // S = -rho (ln p - gamma ln rho)/(gamma - 1) = 2 * 2 ln 2
        let expected = 4.0 * 2f64.ln() * 2.0;
        assert!((total_entropy(&field, &grid, g).unwrap() - expected).abs() < 1e-13);
    }

    fn linear_b_field(layout: Layout, spacing: [f64; 3], b: impl Fn([f64; 3]) -> [f64; 3]) -> Field {
        let mut f = Field::zeros(layout);
        for kz in 0..layout.padded[2] {
            for ky in 0..layout.padded[1] {
                for kx in 0..layout.padded[0] {
                    let p = [kx, ky, kz];
                    let x = [0, 1, 2].map(|d| (p[d] as f64 - layout.ghost[d] as f64 + 0.5) * spacing[d]);
                    let bv = b(x);
                    f.data[layout.padded_index(p)] = Vector8::from([1.0, 0.0, 0.0, 0.0, 1.0, bv[0], bv[1], bv[2]]);
                }
            }
        }
        f
    }

    #[test]
    fn divergence_examples() {
        let grid = Grid::new([8, 8, 1], [0.0; 3], [1.0; 3]).unwrap();
        let solenoidal = linear_b_field(grid.layout, grid.spacing, |x| [x[1], x[0], 0.0]);
        assert!(div_b_estimate(&solenoidal, &grid).max < 1e-14);
        let ramp = linear_b_field(grid.layout, grid.spacing, |x| [x[0], 0.0, 0.0]);
        let d = div_b_estimate(&ramp, &grid);
        assert!(d.per_cell.iter().all(|v| (v - 1.0).abs() < 1e-13));
        let uniform = linear_b_field(grid.layout, grid.spacing, |_| [0.3, -1.0, 2.0]);
        assert_eq!(div_b_estimate(&uniform, &grid).max, 0.0);
    }

    #[test]
    fn alfven_error_vanishes_on_exact_data() {
        let cfg = make_problem("alfven").unwrap().with_resolution([32, 1, 1]);
        let sim = sim_of(&cfg);
        assert_eq!(alfven_error(&sim.field, &sim.grid, 0.0, Norm::L1), 0.0);
        let g = sim.gas;
        let shifted = crate::solver::initial_field(&sim.grid, g, |x| alfven_exact(x[0], 0.3));
        assert_eq!(alfven_error(&shifted, &sim.grid, 0.3, Norm::L2), 0.0);
        assert!(alfven_error(&shifted, &sim.grid, 0.0, Norm::L2) > 1e-2);
    }

    #[test]
    fn norms_of_known_error() {
        let g = GasModel::new(1.4).unwrap();
        let grid = Grid::new([4, 1, 1], [0.0; 3], [2.0, 1.0, 1.0]).unwrap();
        let field = crate::solver::initial_field(&grid, g, |_| PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.0, 3.0, 0.0]));
        assert!((error_norm(&field, &grid, 6, |_| 1.0, Norm::L1) - 4.0).abs() < 1e-14);
        assert!((error_norm(&field, &grid, 6, |_| 1.0, Norm::L2) - 8f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eoc_examples() {
        assert_eq!(eoc(&[4.0, 1.0]), vec![2.0]);
        assert_eq!(eoc(&[3.0, 3.0]), vec![0.0]);
        let reference = eoc(&[2.0e-2, 4.9e-3]);
        assert!((reference[0] - 2.0).abs() < 0.05);
        assert!((log_log_slope(&[1.0, 10.0, 100.0], &[2.0, 200.0, 20000.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn series_rows_and_csv() {
        let g = GasModel::new(1.4).unwrap();
        let grid = Grid::new([8, 1, 1], [0.0; 3], [1.0; 3]).unwrap();
        let w = PrimitiveState::new(1.0, [0.5, 0.0, 0.0], 1.0, [0.2, 0.1, 0.0]);
        let mut sim = Simulation::from_initializer(
            grid,
            |_| w,
            Boundaries::uniform(BoundaryCondition::Periodic),
            g,
            Scheme::default(),
            TimeControl::default(),
        )
        .unwrap();
        fill_ghosts(&mut sim.field, &sim.boundaries, g);
        let mut diag = RunDiagnostics::start(&sim).unwrap();
        sim.advance_to(0.5, |s, info| {
            diag.record(s, info).unwrap();
        })
        .unwrap();
        assert!(diag.rows.len() > 2);
        assert!(diag.rows.windows(2).all(|r| r[1].t > r[0].t));
        assert!(diag.max_relative_drift().iter().all(|d| *d < 1e-13));
        let mut buf = Vec::new();
        diag.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 12);
        assert_eq!(first[2].parse::<f64>().unwrap(), diag.rows[0].totals.mass);
    }
}
