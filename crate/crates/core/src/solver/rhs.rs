//! Semi-discrete right-hand side and the CFL time step.
//!
//! Each active direction is handled one grid line (pencil) at a time: the
//! primitive states along the line are rotated into the x frame, reconstructed,
//! fed to the interface flux and source, and the update is rotated back.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dissipation::{entropy_jump, Dissipation, MeanPolicy};
use crate::flux::{janhunen_from_means, kepec_from_means};
use crate::means::InterfaceMeans;
use crate::reconstruction::{interface_pair, Reconstruction};
use crate::state::{cons_to_prim, ConservedState, GasModel, PrimitiveState, StateError, Vector8};

use super::boundary::reflect;
use super::grid::{rotate_vec, Axis, CellKind, Field, Grid};

/// Interface flux family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxKind {
    /// Entropy conserving, no dissipation.
    Kepec,
    /// Entropy stable with the matched discrete dissipation operator.
    #[default]
    Kepes,
    /// Entropy stable form with arithmetic-mean matrices.
    KepesNaive,
}

impl fmt::Display for FluxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FluxKind::Kepec => "kepec",
            FluxKind::Kepes => "kepes",
            FluxKind::KepesNaive => "kepes-naive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown flux `{0}` (expected kepec, kepes or kepes-naive)")]
pub struct UnknownFlux(pub String);

impl FromStr for FluxKind {
    type Err = UnknownFlux;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "kepec" => Ok(FluxKind::Kepec),
            "kepes" => Ok(FluxKind::Kepes),
            "kepes-naive" => Ok(FluxKind::KepesNaive),
            other => Err(UnknownFlux(other.to_string())),
        }
    }
}

/// Spatial discretization choices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scheme {
    pub flux: FluxKind,
    pub reconstruction: Reconstruction,
    /// See [`Dissipation::eigenvalue_floor`].
    pub eigenvalue_floor: f64,
}

impl Scheme {
    pub fn new(flux: FluxKind, reconstruction: Reconstruction) -> Self {
        Self {
            flux,
            reconstruction,
            eigenvalue_floor: 0.0,
        }
    }

    fn dissipation(&self) -> Option<Dissipation> {
        let policy = match self.flux {
            FluxKind::Kepec => return None,
            FluxKind::Kepes => MeanPolicy::Entropy,
            FluxKind::KepesNaive => MeanPolicy::Arithmetic,
        };
        Some(Dissipation {
            policy,
            eigenvalue_floor: self.eigenvalue_floor,
        })
    }

    /// Numerical flux from interface means.
    #[inline]
    pub fn flux_from_means(&self, m: &InterfaceMeans) -> Vector8 {
        match self.dissipation() {
            None => kepec_from_means(m),
            Some(d) => kepec_from_means(m) - d.apply(m, &entropy_jump(m)) * 0.5,
        }
    }
}

/// Converts every cell of the padded field. Solid cells, whose data is never
/// read, are not checked. An inadmissible interior cell is reported in
/// preference to a ghost copy of it.
pub(crate) fn primitive_field(field: &Field, grid: &Grid, g: GasModel) -> Result<Vec<Vector8>, StateError> {
    let layout = field.layout;
    let converted: Vec<Result<Vector8, StateError>> = field
        .data
        .par_iter()
        .enumerate()
        .map(|(idx, q)| {
            let padded = unflatten(idx, layout.padded);
            let interior = interior_of(padded, &layout);
            if let Some(c) = interior {
                if grid.kind(c) == CellKind::Solid {
                    return Ok(Vector8::zeros());
                }
            }
            cons_to_prim(&ConservedState::from_vector(q), g)
                .map(|w| w.to_vector())
                .map_err(|e| match interior {
                    Some(c) => e.at_cell(c),
                    None => e,
                })
        })
        .collect();
    if let Some(e) = converted.iter().filter_map(|r| r.err()).min_by_key(|e| e.cell().is_none()) {
        return Err(e);
    }
    Ok(converted.into_iter().map(|r| r.expect("errors handled above")).collect())
}

fn unflatten(idx: usize, padded: [usize; 3]) -> [usize; 3] {
    [idx % padded[0], (idx / padded[0]) % padded[1], idx / (padded[0] * padded[1])]
}

fn interior_of(p: [usize; 3], layout: &super::grid::Layout) -> Option<[usize; 3]> {
    let mut c = [0; 3];
    for d in 0..3 {
        let g = layout.ghost[d];
        if p[d] < g || p[d] >= g + layout.n[d] {
            return None;
        }
        c[d] = p[d] - g;
    }
    Some(c)
}

/// First interior cell of every grid line along `axis`.
fn pencil_starts(grid: &Grid, axis: Axis) -> Vec<[usize; 3]> {
    let n = grid.n();
    let mut out = Vec::new();
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let c = [i, j, k];
                if c[axis.index()] == 0 {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Replaces solid cells of a four-cell stencil by mirror images of the fluid
/// cells across the nearest fluid-solid face. `solid[1] && solid[2]` is
/// excluded by the caller.
fn mirror_stencil(s: &mut [Vector8; 4], solid: [bool; 4]) {
    match (solid[1], solid[2]) {
        (false, false) => {
            if solid[0] {
                s[0] = reflect(s[1], Axis::X);
            }
            if solid[3] {
                s[3] = reflect(s[2], Axis::X);
            }
        }
        (false, true) => {
            s[2] = reflect(s[1], Axis::X);
            s[3] = reflect(if solid[0] { s[1] } else { s[0] }, Axis::X);
        }
        (true, false) => {
            s[1] = reflect(s[2], Axis::X);
            s[0] = reflect(if solid[3] { s[2] } else { s[3] }, Axis::X);
        }
        (true, true) => unreachable!("interface between two solid cells"),
    }
}

/// Contribution of one pencil to the cells it crosses, in the x frame order of
/// the line. Entries belonging to solid cells stay zero.
fn pencil_rhs(
    prim: &[Vector8],
    grid: &Grid,
    scheme: &Scheme,
    g: GasModel,
    axis: Axis,
    start: [usize; 3],
) -> Result<Vec<Vector8>, StateError> {
    let layout = grid.layout;
    let d = axis.index();
    let n = layout.n[d];
    let gw = layout.ghost[d] as isize;
    let dx = grid.dx(axis);
    let inv_dx = 1.0 / dx;

    let cell_at = |i: usize| {
        let mut c = start;
        c[d] = i;
        c
    };
    // Padded line along the axis, rotated to the x frame.
    let line: Vec<Vector8> = (-gw..n as isize + gw)
        .map(|o| {
            let mut v = prim[layout.offset_index(start, axis, o)];
            rotate_vec(&mut v, axis);
            v
        })
        .collect();
    let solid: Vec<bool> = (-gw..n as isize + gw)
        .map(|o| o >= 0 && o < n as isize && !grid.is_fluid(cell_at(o as usize)))
        .collect();
    let has_solid = solid.iter().any(|s| *s);

    let mut fluxes = vec![Vector8::zeros(); n + 1];
    let mut sources = vec![Vector8::zeros(); n + 1];
    let mut active = vec![true; n + 1];
    // Interface k sits between line cells k + gw - 1 and k + gw.
    for k in 0..=n {
        let c = k + gw as usize;
        let (lo, hi) = (c - 1, c);
        if has_solid && solid[lo] && solid[hi] {
            active[k] = false;
            continue;
        }
        let mut s = [line[c - 2], line[c - 1], line[c], line[c + 1]];
        if has_solid {
            mirror_stencil(&mut s, [solid[c - 2], solid[c - 1], solid[c], solid[c + 1]]);
        }
        let (l, r) = interface_pair([&s[0], &s[1], &s[2], &s[3]], scheme.reconstruction);
        let (wl, wr) = (PrimitiveState::from_vector(&l), PrimitiveState::from_vector(&r));
        let blame = |e: StateError, side: isize| {
            let i = (k as isize + side).clamp(0, n as isize - 1) as usize;
            e.at_cell(cell_at(i))
        };
        wl.validate().map_err(|e| blame(e, -1))?;
        wr.validate().map_err(|e| blame(e, 0))?;
        let m = InterfaceMeans::new(&wl, &wr, g);
        fluxes[k] = scheme.flux_from_means(&m);
        sources[k] = janhunen_from_means(&m, dx, dx);
    }

    let mut out = vec![Vector8::zeros(); n];
    for i in 0..n {
        if solid[i + gw as usize] {
            continue;
        }
        debug_assert!(active[i] && active[i + 1]);
        let mut v = (fluxes[i] - fluxes[i + 1]) * inv_dx + (sources[i] + sources[i + 1]) * 0.5;
        rotate_vec(&mut v, axis);
        out[i] = v;
    }
    Ok(out)
}

/// Semi-discrete time derivative of every interior cell, x-fastest. Ghost
/// layers of `field` must be filled.
pub fn fv_rhs(field: &Field, grid: &Grid, scheme: &Scheme, g: GasModel) -> Result<Vec<Vector8>, StateError> {
    let prim = primitive_field(field, grid, g)?;
    rhs_from_primitive(&prim, grid, scheme, g)
}

pub(crate) fn rhs_from_primitive(
    prim: &[Vector8],
    grid: &Grid,
    scheme: &Scheme,
    g: GasModel,
) -> Result<Vec<Vector8>, StateError> {
    let layout = grid.layout;
    let mut rhs = vec![Vector8::zeros(); layout.interior_len()];
    for axis in layout.active_axes() {
        let starts = pencil_starts(grid, axis);
        let parts: Vec<Vec<Vector8>> = starts
            .par_iter()
            .map(|s| pencil_rhs(prim, grid, scheme, g, axis, *s))
            .collect::<Result<_, _>>()?;
        let d = axis.index();
        for (start, part) in starts.iter().zip(parts) {
            for (i, v) in part.into_iter().enumerate() {
                let mut c = *start;
                c[d] = i;
                rhs[layout.interior_rank(c)] += v;
            }
        }
    }
    Ok(rhs)
}

/// CFL time step over the fluid cells and active directions.
pub fn compute_dt(field: &Field, grid: &Grid, g: GasModel, cfl: f64) -> Result<f64, super::SolverError> {
    let layout = grid.layout;
    let axes: Vec<Axis> = if layout.dims() == 0 {
        vec![Axis::X]
    } else {
        layout.active_axes().collect()
    };
    let cells: Vec<[usize; 3]> = grid.fluid_cells().collect();
    let speeds: Vec<[f64; 3]> = cells
        .par_iter()
        .map(|&c| -> Result<[f64; 3], StateError> {
            let w = cons_to_prim(&field.conserved(c), g).map_err(|e| e.at_cell(c))?;
            let mut s = [0.0; 3];
            for &axis in &axes {
                let mut v = w.to_vector();
                rotate_vec(&mut v, axis);
                let wr = PrimitiveState::from_vector(&v);
                s[axis.index()] = wr.vel.x.abs() + wr.wave_speeds_x(g).c_f;
            }
            Ok(s)
        })
        .collect::<Result<_, _>>()?;
    let mut dt = f64::INFINITY;
    for &axis in &axes {
        let d = axis.index();
        let max = speeds.iter().fold(0.0f64, |m, s| m.max(s[d]));
        if max > 0.0 {
            dt = dt.min(grid.dx(axis) / max);
        }
    }
    if !dt.is_finite() {
        return Err(super::SolverError::ZeroWaveSpeed);
    }
    Ok(cfl * dt)
}
