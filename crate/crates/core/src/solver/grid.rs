//! Uniform Cartesian grids and padded cell-average storage.

use crate::reconstruction::GHOST;
use crate::state::{ConservedState, Vector8};

/// Coordinate direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Swaps the normal velocity and field components of an 8-vector into the
/// x slot. Works on conserved, primitive and flux vectors alike and is its
/// own inverse.
#[inline]
pub fn rotate_vec(v: &mut Vector8, axis: Axis) {
    match axis {
        Axis::X => {}
        Axis::Y => {
            v.swap_rows(1, 2);
            v.swap_rows(5, 6);
        }
        Axis::Z => {
            v.swap_rows(1, 3);
            v.swap_rows(5, 7);
        }
    }
}

pub fn rotate_to_x(q: &ConservedState, axis: Axis) -> ConservedState {
    let mut v = q.to_vector();
    rotate_vec(&mut v, axis);
    ConservedState::from_vector(&v)
}

/// Inverse of [`rotate_to_x`]; the swaps are involutions.
pub fn rotate_from_x(q: &ConservedState, axis: Axis) -> ConservedState {
    rotate_to_x(q, axis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellKind {
    #[default]
    Fluid,
    Solid,
}

/// Index arithmetic for an interior block padded by ghost layers along the
/// active axes (those with more than one cell).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: [usize; 3],
    pub ghost: [usize; 3],
    pub padded: [usize; 3],
}

impl Layout {
    pub fn new(n: [usize; 3]) -> Self {
        let ghost = n.map(|e| if e > 1 { GHOST } else { 0 });
        let padded = [n[0] + 2 * ghost[0], n[1] + 2 * ghost[1], n[2] + 2 * ghost[2]];
        Self { n, ghost, padded }
    }

    #[inline]
    pub fn is_active(&self, axis: Axis) -> bool {
        self.n[axis.index()] > 1
    }

    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|a| self.is_active(*a))
    }

    pub fn dims(&self) -> usize {
        self.active_axes().count()
    }

    pub fn len(&self) -> usize {
        self.padded.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_len(&self) -> usize {
        self.n.iter().product()
    }

    /// Flat index from padded coordinates.
    #[inline]
    pub fn padded_index(&self, p: [usize; 3]) -> usize {
        p[0] + self.padded[0] * (p[1] + self.padded[1] * p[2])
    }

    /// Flat index of interior cell `c`.
    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        self.padded_index([c[0] + self.ghost[0], c[1] + self.ghost[1], c[2] + self.ghost[2]])
    }

    /// Flat index of interior cell `c` offset by `offset` along `axis`
    /// (may land in the ghost layers).
    #[inline]
    pub fn offset_index(&self, c: [usize; 3], axis: Axis, offset: isize) -> usize {
        let mut p = [c[0] + self.ghost[0], c[1] + self.ghost[1], c[2] + self.ghost[2]];
        let d = axis.index();
        p[d] = (p[d] as isize + offset) as usize;
        self.padded_index(p)
    }

    #[inline]
    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => 1,
            Axis::Y => self.padded[0],
            Axis::Z => self.padded[0] * self.padded[1],
        }
    }

    /// Interior cells in x-fastest order.
    pub fn interior_cells(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let n = self.n;
        (0..n[2]).flat_map(move |k| (0..n[1]).flat_map(move |j| (0..n[0]).map(move |i| [i, j, k])))
    }

    /// Position of interior cell `c` in x-fastest order.
    #[inline]
    pub fn interior_rank(&self, c: [usize; 3]) -> usize {
        c[0] + self.n[0] * (c[1] + self.n[1] * c[2])
    }
}

/// Uniform Cartesian grid with an optional solid mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub layout: Layout,
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    /// Per interior cell, x-fastest.
    pub mask: Vec<CellKind>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid extents must be at least 1, got {0:?}")]
    Extent([usize; 3]),
    #[error("domain lengths must be positive and finite, got {0:?}")]
    Length([f64; 3]),
    #[error("mask holds {got} cells, grid has {expected}")]
    Mask { got: usize, expected: usize },
}

impl Grid {
    /// Grid of `n` cells covering `[origin, origin + lengths]`.
    pub fn new(n: [usize; 3], origin: [f64; 3], lengths: [f64; 3]) -> Result<Self, GridError> {
        if n.iter().any(|&e| e == 0) {
            return Err(GridError::Extent(n));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(GridError::Length(lengths));
        }
        let layout = Layout::new(n);
        let spacing = [lengths[0] / n[0] as f64, lengths[1] / n[1] as f64, lengths[2] / n[2] as f64];
        Ok(Self {
            layout,
            spacing,
            origin,
            mask: vec![CellKind::Fluid; layout.interior_len()],
        })
    }

    pub fn with_mask(mut self, mask: Vec<CellKind>) -> Result<Self, GridError> {
        if mask.len() != self.layout.interior_len() {
            return Err(GridError::Mask {
                got: mask.len(),
                expected: self.layout.interior_len(),
            });
        }
        self.mask = mask;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> [usize; 3] {
        self.layout.n
    }

    pub fn dx(&self, axis: Axis) -> f64 {
        self.spacing[axis.index()]
    }

    /// Cell volume over the active axes.
    pub fn cell_volume(&self) -> f64 {
        self.layout.active_axes().map(|a| self.dx(a)).product()
    }

    pub fn center(&self, c: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|d| self.origin[d] + (c[d] as f64 + 0.5) * self.spacing[d])
    }

    #[inline]
    pub fn kind(&self, c: [usize; 3]) -> CellKind {
        self.mask[self.layout.interior_rank(c)]
    }

    pub fn is_fluid(&self, c: [usize; 3]) -> bool {
        self.kind(c) == CellKind::Fluid
    }

    pub fn has_solids(&self) -> bool {
        self.mask.iter().any(|k| *k == CellKind::Solid)
    }

    pub fn fluid_cells(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.layout.interior_cells().filter(|c| self.is_fluid(*c))
    }
}

/// Conserved cell averages including ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub layout: Layout,
    pub data: Vec<Vector8>,
}

impl Field {
    pub fn zeros(layout: Layout) -> Self {
        Self {
            layout,
            data: vec![Vector8::zeros(); layout.len()],
        }
    }

    #[inline]
    pub fn get(&self, c: [usize; 3]) -> &Vector8 {
        &self.data[self.layout.index(c)]
    }

    #[inline]
    pub fn get_mut(&mut self, c: [usize; 3]) -> &mut Vector8 {
        let i = self.layout.index(c);
        &mut self.data[i]
    }

    pub fn conserved(&self, c: [usize; 3]) -> ConservedState {
        ConservedState::from_vector(self.get(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_rows() {
        let mut v = Vector8::from([0.0, 1.0, 2.0, 3.0, 9.0, 4.0, 5.0, 6.0]);
        rotate_vec(&mut v, Axis::Y);
        assert_eq!(v, Vector8::from([0.0, 2.0, 1.0, 3.0, 9.0, 5.0, 4.0, 6.0]));
        let orig = Vector8::from([0.0, 1.0, 2.0, 3.0, 9.0, 4.0, 5.0, 6.0]);
        for axis in Axis::ALL {
            let mut w = orig;
            rotate_vec(&mut w, axis);
            if axis == Axis::X {
                assert_eq!(w, orig);
            }
            rotate_vec(&mut w, axis);
            assert_eq!(w, orig);
        }
        let mut z = orig;
        rotate_vec(&mut z, Axis::Z);
        assert_eq!(z, Vector8::from([0.0, 3.0, 2.0, 1.0, 9.0, 6.0, 5.0, 4.0]));
    }

    #[test]
    fn layout_indices() {
        let l = Layout::new([4, 3, 1]);
        assert_eq!(l.ghost, [2, 2, 0]);
        assert_eq!(l.padded, [8, 7, 1]);
        assert_eq!(l.dims(), 2);
        assert_eq!(l.index([0, 0, 0]), 2 + 8 * 2);
        assert_eq!(l.offset_index([0, 0, 0], Axis::X, -2), 8 * 2);
        assert_eq!(l.offset_index([0, 0, 0], Axis::Y, 1), l.index([0, 1, 0]));
        let cells: Vec<_> = l.interior_cells().collect();
        assert_eq!(cells.len(), 12);
        assert_eq!(cells[1], [1, 0, 0]);
        assert_eq!(l.interior_rank([1, 2, 0]), 9);
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::new([10, 1, 1], [0.0; 3], [1.0; 3]).unwrap();
        assert_eq!(g.cell_volume(), 0.1);
        assert!((g.center([3, 0, 0])[0] - 0.35).abs() < 1e-15);
        assert!(Grid::new([0, 1, 1], [0.0; 3], [1.0; 3]).is_err());
        assert!(g.clone().with_mask(vec![CellKind::Solid; 3]).is_err());
    }
}
