//! Interface reconstruction of primitive variables along a grid line.
//!
//! A line holds `n` interior cells padded by [`GHOST`] cells on each side.
//! The `n + 1` interfaces bounding the interior receive a left state (the
//! cell to the left evaluated at its right face) and a right state.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::state::Vector8;

/// Ghost layers required on each side of a line.
pub const GHOST: usize = 2;

/// Slope choice for the piecewise-linear reconstruction.
///
/// `Linear(alpha)` blends the backward (`alpha`) and forward (`1 - alpha`)
/// differences; `alpha = 0.5` is the centered slope. It is unlimited and
/// meant for smooth problems only.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Reconstruction {
    #[default]
    Constant,
    Linear(f64),
    Minmod,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructionError {
    #[error("line of {len} cells cannot hold {ghost} ghost cells per side")]
    InsufficientGhosts { len: usize, ghost: usize },
    #[error("output buffers hold {got} interfaces, expected {expected}")]
    OutputLength { got: usize, expected: usize },
    #[error("unknown reconstruction `{0}` (expected constant, linear or minmod)")]
    Unknown(String),
    #[error("linear blending parameter {0} outside [0, 1]")]
    InvalidAlpha(f64),
}

impl Reconstruction {
    pub fn linear(alpha: f64) -> Result<Self, ReconstructionError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Reconstruction::Linear(alpha))
        } else {
            Err(ReconstructionError::InvalidAlpha(alpha))
        }
    }

    /// Half-cell increment `dx/2 * slope` from backward and forward differences.
    #[inline]
    fn half_increment(&self, back: f64, fwd: f64) -> f64 {
        match *self {
            Reconstruction::Constant => 0.0,
            Reconstruction::Linear(alpha) => 0.5 * (alpha * back + (1.0 - alpha) * fwd),
            Reconstruction::Minmod => 0.5 * minmod(back, fwd),
        }
    }
}

impl fmt::Display for Reconstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reconstruction::Constant => write!(f, "constant"),
            Reconstruction::Linear(a) if *a == 0.5 => write!(f, "linear"),
            Reconstruction::Linear(a) => write!(f, "linear({a})"),
            Reconstruction::Minmod => write!(f, "minmod"),
        }
    }
}

impl FromStr for Reconstruction {
    type Err = ReconstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "constant" => Ok(Reconstruction::Constant),
            "linear" => Ok(Reconstruction::Linear(0.5)),
            "minmod" => Ok(Reconstruction::Minmod),
            other => Err(ReconstructionError::Unknown(other.to_string())),
        }
    }
}

/// `a` if `|a| < |b|` and `ab > 0`, `b` if `|a| >= |b|` and `ab > 0`, else 0.
#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b > 0.0 {
        if a.abs() < b.abs() {
            a
        } else {
            b
        }
    } else {
        0.0
    }
}

/// Left and right states at the interface between `s[1]` and `s[2]` of a
/// four-cell stencil.
#[inline]
pub fn interface_pair(s: [&Vector8; 4], scheme: Reconstruction) -> (Vector8, Vector8) {
    if scheme == Reconstruction::Constant {
        return (*s[1], *s[2]);
    }
    let mut l = *s[1];
    let mut r = *s[2];
    for k in 0..8 {
        l[k] += scheme.half_increment(s[1][k] - s[0][k], s[2][k] - s[1][k]);
        r[k] -= scheme.half_increment(s[2][k] - s[1][k], s[3][k] - s[2][k]);
    }
    (l, r)
}

/// Fills `left[k]`, `right[k]` for the `n + 1` interfaces of a padded line.
pub fn reconstruct(
    line: &[Vector8],
    scheme: Reconstruction,
    left: &mut [Vector8],
    right: &mut [Vector8],
) -> Result<(), ReconstructionError> {
    if line.len() < 2 * GHOST + 1 {
        return Err(ReconstructionError::InsufficientGhosts {
            len: line.len(),
            ghost: GHOST,
        });
    }
    let n = line.len() - 2 * GHOST;
    for out in [&*left, &*right] {
        if out.len() != n + 1 {
            return Err(ReconstructionError::OutputLength {
                got: out.len(),
                expected: n + 1,
            });
        }
    }
    // Cells GHOST-1 ..= GHOST+n touch the interior interfaces.
    for c in GHOST - 1..=GHOST + n {
        let (qm, q, qp) = (&line[c - 1], &line[c], &line[c + 1]);
        let mut inc = Vector8::zeros();
        if scheme != Reconstruction::Constant {
            for k in 0..8 {
                inc[k] = scheme.half_increment(q[k] - qm[k], qp[k] - q[k]);
            }
        }
        // Cell c is to the right of interface c - GHOST and left of c - GHOST + 1.
        if c >= GHOST {
            right[c - GHOST] = q - inc;
        }
        if c < GHOST + n {
            left[c + 1 - GHOST] = q + inc;
        }
    }
    Ok(())
}
