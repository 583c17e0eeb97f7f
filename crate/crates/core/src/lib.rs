//! Entropy-stable finite-volume solver for the ideal MHD equations.
//!
//! The crate provides the entropy-conservative KEPEC interface flux, the
//! entropy-stable KEPES flux built from it, the interface discretization of
//! the Janhunen source term, a dimension-by-dimension Cartesian update with
//! SSP Runge-Kutta time stepping, and diagnostics for the entropy budget.

pub mod diagnostics;
pub mod dissipation;
pub mod flux;
pub mod means;
pub mod problems;
pub mod reconstruction;
pub mod solver;
pub mod state;

pub use means::{interface_means, log_mean, InterfaceMeans};
pub use state::{
    cons_to_prim, prim_to_cons, ConservedState, EntropyVars, GasModel, Matrix8, PrimitiveState,
    StateError, Vector8, WaveSpeeds,
};
