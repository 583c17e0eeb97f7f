//! Explicit strong-stability-preserving time integration.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeIntegrator {
    Euler,
    Ssprk2,
    #[default]
    Ssprk3,
}

impl TimeIntegrator {
    /// Stage weights `(a, b)` of the Shu-Osher form
    /// `q_k = a q_0 + b (q_{k-1} + dt L(q_{k-1}))`.
    pub fn stages(self) -> &'static [(f64, f64)] {
        match self {
            TimeIntegrator::Euler => &[(0.0, 1.0)],
            TimeIntegrator::Ssprk2 => &[(0.0, 1.0), (0.5, 0.5)],
            TimeIntegrator::Ssprk3 => &[(0.0, 1.0), (0.75, 0.25), (1.0 / 3.0, 2.0 / 3.0)],
        }
    }

    pub fn order(self) -> u32 {
        self.stages().len() as u32
    }
}

impl fmt::Display for TimeIntegrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeIntegrator::Euler => "euler",
            TimeIntegrator::Ssprk2 => "ssprk2",
            TimeIntegrator::Ssprk3 => "ssprk3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown integrator `{0}` (expected euler, ssprk2 or ssprk3)")]
pub struct UnknownIntegrator(pub String);

impl FromStr for TimeIntegrator {
    type Err = UnknownIntegrator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "euler" => Ok(TimeIntegrator::Euler),
            "ssprk2" => Ok(TimeIntegrator::Ssprk2),
            "ssprk3" => Ok(TimeIntegrator::Ssprk3),
            other => Err(UnknownIntegrator(other.to_string())),
        }
    }
}

/// Integrator plus step-size policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControl {
    pub integrator: TimeIntegrator,
    /// Must lie in `(0, 1]`.
    pub cfl: f64,
    /// Replaces the CFL step when set.
    pub dt_fixed: Option<f64>,
}

impl Default for TimeControl {
    fn default() -> Self {
        Self {
            integrator: TimeIntegrator::default(),
            cfl: 0.8,
            dt_fixed: None,
        }
    }
}

impl TimeControl {
    pub fn validate(&self) -> Result<(), super::SolverError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(super::SolverError::InvalidCfl(self.cfl));
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(super::SolverError::InvalidDt(dt));
            }
        }
        Ok(())
    }
}

/// Advances `y` by one step of `integrator` for a scalar ODE `y' = f(y)`.
pub fn ode_step(integrator: TimeIntegrator, y: f64, dt: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut cur = y;
    for &(a, b) in integrator.stages() {
        cur = a * y + b * (cur + dt * f(cur));
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(integrator: TimeIntegrator, steps: usize) -> f64 {
        let dt = 1.0 / steps as f64;
        (0..steps).fold(1.0, |y, _| ode_step(integrator, y, dt, |q| -q))
    }

    #[test]
    fn observed_orders() {
        for integrator in [TimeIntegrator::Euler, TimeIntegrator::Ssprk2, TimeIntegrator::Ssprk3] {
            let exact = (-1.0f64).exp();
            let e1 = (solve(integrator, 40) - exact).abs();
            let e2 = (solve(integrator, 80) - exact).abs();
            let order = (e1 / e2).log2();
            assert!((order - integrator.order() as f64).abs() < 0.1, "{integrator}: {order}");
        }
    }

    #[test]
    fn zero_rhs_is_identity() {
        for integrator in [TimeIntegrator::Euler, TimeIntegrator::Ssprk2, TimeIntegrator::Ssprk3] {
            assert_eq!(ode_step(integrator, 2.5, 0.1, |_| 0.0), 2.5);
        }
    }

    #[test]
    fn stage_weights_are_convex() {
        for integrator in [TimeIntegrator::Euler, TimeIntegrator::Ssprk2, TimeIntegrator::Ssprk3] {
            for &(a, b) in integrator.stages() {
                assert!(a >= 0.0 && b > 0.0 && (a + b - 1.0).abs() < 1e-15);
            }
        }
        assert_eq!("ssprk2".parse::<TimeIntegrator>().unwrap(), TimeIntegrator::Ssprk2);
        assert!("rk4".parse::<TimeIntegrator>().is_err());
    }

    #[test]
    fn cfl_range() {
        let mut tc = TimeControl::default();
        assert!(tc.validate().is_ok());
        tc.cfl = 1.2;
        assert!(tc.validate().is_err());
        tc.cfl = 0.5;
        tc.dt_fixed = Some(-1.0);
        assert!(tc.validate().is_err());
    }
}
