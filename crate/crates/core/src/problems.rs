//! Initial conditions and run parameters for the standard test problems.

use std::f64::consts::PI;
use std::fmt;

use crate::solver::{
    Boundaries, BoundaryCondition, CellKind, Grid, GridError, Scheme, Simulation, SolverError, TimeControl, Axis,
};
use crate::state::{GasModel, PrimitiveState};

/// Names accepted by [`make_problem`].
pub const PROBLEM_NAMES: [&str; 9] = [
    "alfven",
    "briowu1d",
    "briowu-entropy",
    "briowu2d",
    "orszag-tang",
    "rotor",
    "blast2d",
    "blast3d",
    "windtunnel",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown problem `{0}`")]
pub struct UnknownProblem(pub String);

/// Everything needed to set up a run of one test problem.
#[derive(Clone, Copy)]
pub struct ProblemConfig {
    pub name: &'static str,
    pub origin: [f64; 3],
    pub lengths: [f64; 3],
    pub resolution: [usize; 3],
    pub boundaries: Boundaries,
    pub gamma: f64,
    pub t_end: f64,
    /// Primitive state at a cell center.
    pub init: fn([f64; 3]) -> PrimitiveState,
    pub mask: Option<fn(&Grid) -> Vec<CellKind>>,
}

impl fmt::Debug for ProblemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemConfig")
            .field("name", &self.name)
            .field("origin", &self.origin)
            .field("lengths", &self.lengths)
            .field("resolution", &self.resolution)
            .field("boundaries", &self.boundaries)
            .field("gamma", &self.gamma)
            .field("t_end", &self.t_end)
            .field("mask", &self.mask.is_some())
            .finish()
    }
}

impl ProblemConfig {
    pub fn with_resolution(mut self, n: [usize; 3]) -> Self {
        self.resolution = n;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    /// Number of directions the problem varies in.
    pub fn dims(&self) -> usize {
        self.lengths
            .iter()
            .zip(self.resolution)
            .filter(|(_, n)| *n > 1)
            .count()
    }

    pub fn grid(&self) -> Result<Grid, GridError> {
        let grid = Grid::new(self.resolution, self.origin, self.lengths)?;
        match self.mask {
            Some(mask) => {
                let m = mask(&grid);
                grid.with_mask(m)
            }
            None => Ok(grid),
        }
    }

    pub fn gas(&self) -> GasModel {
        GasModel::new(self.gamma).expect("problem tables use gamma > 1")
    }

    pub fn simulation(&self, scheme: Scheme, time: TimeControl) -> Result<Simulation, SolverError> {
        Simulation::from_initializer(self.grid()?, self.init, self.boundaries, self.gas(), scheme, time)
    }
}

pub fn make_problem(name: &str) -> Result<ProblemConfig, UnknownProblem> {
    let periodic = Boundaries::periodic();
    let unit = [1.0, 1.0, 1.0];
    let cfg = match name {
        "alfven" => ProblemConfig {
            name: "alfven",
            origin: [0.0; 3],
            lengths: unit,
            resolution: [64, 1, 1],
            boundaries: periodic,
            gamma: 5.0 / 3.0,
            t_end: 1.0,
            init: |x| alfven_exact(x[0], 0.0),
            mask: None,
        },
        "briowu1d" | "briowu-entropy" => ProblemConfig {
            name: if name == "briowu1d" { "briowu1d" } else { "briowu-entropy" },
            origin: [0.0; 3],
            lengths: unit,
            resolution: if name == "briowu1d" { [256, 1, 1] } else { [64, 1, 1] },
            boundaries: periodic,
            gamma: 2.0,
            t_end: if name == "briowu1d" { 0.1 } else { 0.001 },
            init: |x| brio_wu_state(x[0] < 0.5),
            mask: None,
        },
        "briowu2d" => ProblemConfig {
            name: "briowu2d",
            origin: [0.0; 3],
            lengths: unit,
            resolution: [64, 64, 1],
            boundaries: periodic,
            gamma: 2.0,
            t_end: 0.001,
            init: brio_wu_diagonal,
            mask: None,
        },
        "orszag-tang" => ProblemConfig {
            name: "orszag-tang",
            origin: [0.0; 3],
            lengths: unit,
            resolution: [128, 128, 1],
            boundaries: periodic,
            gamma: 5.0 / 3.0,
            t_end: 0.5,
            init: orszag_tang,
            mask: None,
        },
        "rotor" => ProblemConfig {
            name: "rotor",
            origin: [0.0; 3],
            lengths: unit,
            resolution: [128, 128, 1],
            boundaries: Boundaries::uniform(BoundaryCondition::ZeroGradient),
            gamma: 1.4,
            t_end: 0.15,
            init: rotor,
            mask: None,
        },
        "blast2d" => ProblemConfig {
            name: "blast2d",
            origin: [-0.5; 3],
            lengths: unit,
            resolution: [128, 128, 1],
            boundaries: periodic,
            gamma: 1.4,
            t_end: 0.01,
            init: |x| blast(x[0].hypot(x[1])),
            mask: None,
        },
        "blast3d" => ProblemConfig {
            name: "blast3d",
            origin: [-0.5; 3],
            lengths: unit,
            resolution: [48, 48, 48],
            boundaries: periodic,
            gamma: 1.4,
            t_end: 0.01,
            init: |x| blast((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()),
            mask: None,
        },
        "windtunnel" => ProblemConfig {
            name: "windtunnel",
            origin: [0.0; 3],
            lengths: [3.0, 1.0, 1.0],
            resolution: [240, 80, 1],
            boundaries: Boundaries::uniform(BoundaryCondition::Reflecting).with(
                Axis::X,
                BoundaryCondition::Inflow(windtunnel_state()),
                BoundaryCondition::ZeroGradient,
            ),
            gamma: 1.4,
            t_end: 4.0,
            init: |_| windtunnel_state(),
            mask: Some(windtunnel_mask),
        },
        other => return Err(UnknownProblem(other.to_string())),
    };
    Ok(cfg)
}

/// Circularly polarized Alfvén wave. With `B1 / sqrt(rho) = 1` and
/// `B_perp = u_perp` it travels towards negative x at unit speed, so the
/// profile is evaluated at phase `x + t`.
pub fn alfven_exact(x: f64, t: f64) -> PrimitiveState {
    let phase = 2.0 * PI * (x + t);
    let (s, c) = phase.sin_cos();
    let u = [0.0, 0.1 * s, 0.1 * c];
    PrimitiveState::new(1.0, u, 0.1, [1.0 + u[0], u[1], u[2]])
}

pub fn brio_wu_state(left: bool) -> PrimitiveState {
    if left {
        PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0])
    } else {
        PrimitiveState::new(0.125, [0.0; 3], 0.1, [0.75, -1.0, 0.0])
    }
}

/// One-dimensional shock tube rotated by 45 degrees: the normal is
/// `(1, 1)/sqrt(2)` and the discontinuity lies on `x + y = 1`.
fn brio_wu_diagonal(x: [f64; 3]) -> PrimitiveState {
    let w = brio_wu_state(x[0] + x[1] < 1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (bn, bt) = (w.b.x, w.b.y);
    PrimitiveState::new(w.rho, [0.0; 3], w.p, [h * (bn - bt), h * (bn + bt), w.b.z])
}

fn orszag_tang(x: [f64; 3]) -> PrimitiveState {
    let gamma = 5.0 / 3.0;
    let (sx, sy) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
    PrimitiveState::new(
        1.0,
        [-sy, sx, 0.0],
        1.0 / gamma,
        [-sy / gamma, (4.0 * PI * x[0]).sin() / gamma, 0.0],
    )
}

fn rotor(x: [f64; 3]) -> PrimitiveState {
    let (r0, r1) = (0.1, 0.115);
    let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
    let r = dx.hypot(dy);
    let f = if r <= r0 {
        1.0
    } else if r < r1 {
        (r1 - r) / (r1 - r0)
    } else {
        0.0
    };
    let b1 = 5.0 / (4.0 * PI).sqrt();
    PrimitiveState::new(1.0 + 9.0 * f, [-20.0 * f * dy, 20.0 * f * dx, 0.0], 1.0, [b1, 0.0, 0.0])
}

fn blast(r: f64) -> PrimitiveState {
    let (r0, r1) = (0.09, 0.1);
    let p = if r <= r0 {
        1000.0
    } else if r < r1 {
        0.1 + 999.9 * (r1 - r) / (r1 - r0)
    } else {
        0.1
    };
    PrimitiveState::new(1.0, [0.0; 3], p, [100.0 / (4.0 * PI).sqrt(), 0.0, 0.0])
}

/// Mach 3 inflow state.
pub fn windtunnel_state() -> PrimitiveState {
    PrimitiveState::new(1.4, [3.0, 0.0, 0.0], 1.0, [0.0; 3])
}

/// Step occupying `x > 0.6`, `y < 0.2`, decided at cell centers.
pub fn windtunnel_mask(grid: &Grid) -> Vec<CellKind> {
    grid.layout
        .interior_cells()
        .map(|c| {
            let x = grid.center(c);
            if x[0] > 0.6 && x[1] < 0.2 {
                CellKind::Solid
            } else {
                CellKind::Fluid
            }
        })
        .collect()
}
