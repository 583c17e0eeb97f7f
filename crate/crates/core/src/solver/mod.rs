//! Grid, boundary handling, semi-discrete operator and the time-stepping loop.

mod boundary;
mod grid;
mod rhs;
mod time;

pub use boundary::{fill_ghosts, reflect, BoundaryCondition, BoundaryError, Boundaries};
pub use grid::{rotate_from_x, rotate_to_x, rotate_vec, Axis, CellKind, Field, Grid, GridError, Layout};
pub use rhs::{compute_dt, fv_rhs, FluxKind, Scheme, UnknownFlux};
pub use time::{ode_step, TimeControl, TimeIntegrator, UnknownIntegrator};

use crate::state::{cons_to_prim, GasModel, PrimitiveState, StateError, Vector8};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("CFL number must lie in (0, 1], got {0}")]
    InvalidCfl(f64),
    #[error("time step must be positive and finite, got {0}")]
    InvalidDt(f64),
    #[error("maximum wave speed is zero in every direction")]
    ZeroWaveSpeed,
    #[error("field layout does not match the grid")]
    LayoutMismatch,
}

/// Summary of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
}

/// A field evolving on a grid under fixed boundary conditions and scheme.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub grid: Grid,
    pub field: Field,
    pub boundaries: Boundaries,
    pub gas: GasModel,
    pub scheme: Scheme,
    pub time: TimeControl,
    pub t: f64,
    pub steps: u64,
}

impl Simulation {
    pub fn new(
        grid: Grid,
        field: Field,
        boundaries: Boundaries,
        gas: GasModel,
        scheme: Scheme,
        time: TimeControl,
    ) -> Result<Self, SolverError> {
        boundaries.validate()?;
        time.validate()?;
        if field.layout != grid.layout {
            return Err(SolverError::LayoutMismatch);
        }
        let mut sim = Self {
            grid,
            field,
            boundaries,
            gas,
            scheme,
            time,
            t: 0.0,
            steps: 0,
        };
        sim.check_admissible(&sim.field)?;
        fill_ghosts(&mut sim.field, &sim.boundaries, gas);
        Ok(sim)
    }

    /// Builds the initial field from a function of the cell center.
    pub fn from_initializer(
        grid: Grid,
        init: impl Fn([f64; 3]) -> PrimitiveState + Sync,
        boundaries: Boundaries,
        gas: GasModel,
        scheme: Scheme,
        time: TimeControl,
    ) -> Result<Self, SolverError> {
        let field = initial_field(&grid, gas, init);
        Self::new(grid, field, boundaries, gas, scheme, time)
    }

    pub fn rhs(&mut self) -> Result<Vec<Vector8>, SolverError> {
        fill_ghosts(&mut self.field, &self.boundaries, self.gas);
        Ok(fv_rhs(&self.field, &self.grid, &self.scheme, self.gas)?)
    }

    /// Step size before clipping to an end time.
    pub fn next_dt(&self) -> Result<f64, SolverError> {
        match self.time.dt_fixed {
            Some(dt) => Ok(dt),
            None => compute_dt(&self.field, &self.grid, self.gas, self.time.cfl),
        }
    }

    fn check_admissible(&self, field: &Field) -> Result<(), SolverError> {
        for c in self.grid.fluid_cells() {
            cons_to_prim(&field.conserved(c), self.gas).map_err(|e| e.at_cell(c))?;
        }
        Ok(())
    }

    /// Advances by exactly `dt`. On failure the field is left at the last
    /// accepted state.
    pub fn step_dt(&mut self, dt: f64) -> Result<(), SolverError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::InvalidDt(dt));
        }
        let layout = self.grid.layout;
        let fluid: Vec<usize> = self.grid.fluid_cells().map(|c| layout.index(c)).collect();
        let fluid_ranks: Vec<usize> = self.grid.fluid_cells().map(|c| layout.interior_rank(c)).collect();
        let q0 = self.field.clone();
        let mut stage = self.field.clone();
        for &(a, b) in self.time.integrator.stages() {
            fill_ghosts(&mut stage, &self.boundaries, self.gas);
            let l = fv_rhs(&stage, &self.grid, &self.scheme, self.gas)?;
            for (&idx, &rank) in fluid.iter().zip(&fluid_ranks) {
                let euler = stage.data[idx] + l[rank] * dt;
                stage.data[idx] = if a == 0.0 { euler * b } else { q0.data[idx] * a + euler * b };
            }
        }
        self.check_admissible(&stage)?;
        fill_ghosts(&mut stage, &self.boundaries, self.gas);
        self.field = stage;
        self.steps += 1;
        Ok(())
    }

    /// One step, clipped so as not to pass `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<StepInfo, SolverError> {
        let mut dt = self.next_dt()?;
        let remaining = t_end - self.t;
        let last = remaining <= dt * (1.0 + 1e-9);
        if last {
            dt = remaining;
        }
        self.step_dt(dt)?;
        self.t = if last { t_end } else { self.t + dt };
        Ok(StepInfo {
            step: self.steps,
            t: self.t,
            dt,
        })
    }

    /// Steps until `t_end`, calling `observer` after every accepted step.
    pub fn advance_to(
        &mut self,
        t_end: f64,
        mut observer: impl FnMut(&Simulation, StepInfo),
    ) -> Result<(), SolverError> {
        while self.t < t_end {
            let info = self.step(t_end)?;
            observer(self, info);
        }
        Ok(())
    }

    /// Primitive state of an interior cell.
    pub fn primitive(&self, c: [usize; 3]) -> Result<PrimitiveState, StateError> {
        cons_to_prim(&self.field.conserved(c), self.gas).map_err(|e| e.at_cell(c))
    }
}

/// Samples `init` at every cell center; solid cells are sampled too.
pub fn initial_field(grid: &Grid, gas: GasModel, init: impl Fn([f64; 3]) -> PrimitiveState + Sync) -> Field {
    use rayon::prelude::*;
    let cells: Vec<[usize; 3]> = grid.layout.interior_cells().collect();
    let values: Vec<Vector8> = cells
        .par_iter()
        .map(|&c| init(grid.center(c)).to_conserved(gas).to_vector())
        .collect();
    let mut field = Field::zeros(grid.layout);
    for (c, v) in cells.into_iter().zip(values) {
        *field.get_mut(c) = v;
    }
    field
}
