//! Boundary conditions and ghost-cell filling.

use crate::state::{GasModel, PrimitiveState, Vector8};

use super::grid::{Axis, Field};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Periodic,
    /// Copies the nearest interior cell ("outflow").
    ZeroGradient,
    /// Mirrors the interior and negates the face-normal velocity; the
    /// magnetic field is copied unchanged.
    Reflecting,
    /// Fixed external state.
    Inflow(PrimitiveState),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundaryError {
    #[error("periodic boundary on the {0:?} axis must be paired on both faces")]
    UnpairedPeriodic(Axis),
    #[error("inflow state on the {0:?} axis is not admissible")]
    InflowState(Axis),
}

/// Low and high face conditions per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    pub faces: [[BoundaryCondition; 2]; 3],
}

impl Boundaries {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self { faces: [[bc; 2]; 3] }
    }

    pub fn periodic() -> Self {
        Self::uniform(BoundaryCondition::Periodic)
    }

    pub fn with(mut self, axis: Axis, low: BoundaryCondition, high: BoundaryCondition) -> Self {
        self.faces[axis.index()] = [low, high];
        self
    }

    pub fn validate(&self) -> Result<(), BoundaryError> {
        for axis in Axis::ALL {
            let [lo, hi] = self.faces[axis.index()];
            let lo_p = lo == BoundaryCondition::Periodic;
            let hi_p = hi == BoundaryCondition::Periodic;
            if lo_p != hi_p {
                return Err(BoundaryError::UnpairedPeriodic(axis));
            }
            for bc in [lo, hi] {
                if let BoundaryCondition::Inflow(w) = bc {
                    w.validate().map_err(|_| BoundaryError::InflowState(axis))?;
                }
            }
        }
        Ok(())
    }
}

/// Mirror image of a state across a face normal to `axis`.
#[inline]
pub fn reflect(mut v: Vector8, axis: Axis) -> Vector8 {
    v[1 + axis.index()] = -v[1 + axis.index()];
    v
}

/// Fills the ghost layers of every active axis. Works on conserved data; the
/// momentum sits in the same slots as the velocity, so [`reflect`] applies.
pub fn fill_ghosts(field: &mut Field, bcs: &Boundaries, g: GasModel) {
    let layout = field.layout;
    for axis in layout.active_axes() {
        let d = axis.index();
        let n = layout.n[d] as isize;
        let gw = layout.ghost[d] as isize;
        let stride = layout.stride(axis);
        // Enumerate every line along `axis` over the full padded cross-section.
        let (t1, t2) = match axis {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        };
        for b in 0..layout.padded[t2] {
            for a in 0..layout.padded[t1] {
                let mut p = [0usize; 3];
                p[t1] = a;
                p[t2] = b;
                let base = layout.padded_index(p) as isize + gw * stride as isize;
                // base is the flat index of interior position 0 along the line.
                let at = |i: isize| (base + i * stride as isize) as usize;
                for side in 0..2 {
                    let bc = bcs.faces[d][side];
                    for l in 1..=gw {
                        let ghost = if side == 0 { -l } else { n - 1 + l };
                        let value = match bc {
                            BoundaryCondition::Periodic => {
                                let src = if side == 0 { n - l } else { l - 1 };
                                field.data[at(src)]
                            }
                            BoundaryCondition::ZeroGradient => {
                                let src = if side == 0 { 0 } else { n - 1 };
                                field.data[at(src)]
                            }
                            BoundaryCondition::Reflecting => {
                                let src = if side == 0 { l - 1 } else { n - l };
                                reflect(field.data[at(src)], axis)
                            }
                            BoundaryCondition::Inflow(w) => w.to_conserved(g).to_vector(),
                        };
                        field.data[at(ghost)] = value;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::grid::Layout;

    fn line_field(values: &[f64]) -> Field {
        let layout = Layout::new([values.len(), 1, 1]);
        let mut f = Field::zeros(layout);
        for (i, v) in values.iter().enumerate() {
            *f.get_mut([i, 0, 0]) = Vector8::from([*v, 10.0 * v, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        }
        f
    }

    fn gas() -> GasModel {
        GasModel::new(1.4).unwrap()
    }

    #[test]
    fn periodic_wraps() {
        let mut f = line_field(&[1.0, 2.0, 3.0, 4.0]);
        fill_ghosts(&mut f, &Boundaries::periodic(), gas());
        assert_eq!(f.data[1][0], 4.0);
        assert_eq!(f.data[0][0], 3.0);
        assert_eq!(f.data[6][0], 1.0);
        assert_eq!(f.data[7][0], 2.0);
    }

    #[test]
    fn zero_gradient_copies() {
        let mut f = line_field(&[1.0, 2.0, 3.0, 4.0]);
        let bcs = Boundaries::uniform(BoundaryCondition::ZeroGradient);
        fill_ghosts(&mut f, &bcs, gas());
        assert_eq!(f.data[0][0], 1.0);
        assert_eq!(f.data[7][0], 4.0);
    }

    #[test]
    fn reflecting_mirrors_normal_momentum() {
        let mut f = line_field(&[1.0, 2.0, 3.0, 4.0]);
        let bcs = Boundaries::uniform(BoundaryCondition::Reflecting);
        fill_ghosts(&mut f, &bcs, gas());
        assert_eq!(f.data[1][0], 1.0);
        assert_eq!(f.data[1][1], -10.0);
        assert_eq!(f.data[0][1], -20.0);
        assert_eq!(f.data[1][2], 2.0);
        assert_eq!(f.data[1][5], 5.0);
        assert_eq!(f.data[6][1], -40.0);
    }

    #[test]
    fn inflow_writes_state() {
        let w = PrimitiveState::new(1.4, [3.0, 0.0, 0.0], 1.0, [0.0; 3]);
        let mut f = line_field(&[1.0, 2.0, 3.0, 4.0]);
        let bcs = Boundaries::uniform(BoundaryCondition::ZeroGradient).with(
            Axis::X,
            BoundaryCondition::Inflow(w),
            BoundaryCondition::ZeroGradient,
        );
        fill_ghosts(&mut f, &bcs, gas());
        let q = w.to_conserved(gas()).to_vector();
        assert_eq!(f.data[0], q);
        assert_eq!(f.data[1], q);
    }

    #[test]
    fn unpaired_periodic_rejected() {
        let bcs = Boundaries::periodic().with(Axis::Y, BoundaryCondition::Periodic, BoundaryCondition::ZeroGradient);
        assert!(bcs.validate().is_err());
        assert!(Boundaries::periodic().validate().is_ok());
    }

    #[test]
    fn two_dimensional_periodic() {
        let layout = Layout::new([3, 2, 1]);
        let mut f = Field::zeros(layout);
        for c in layout.interior_cells().collect::<Vec<_>>() {
            f.get_mut(c)[0] = (c[0] + 10 * c[1]) as f64;
        }
        fill_ghosts(&mut f, &Boundaries::periodic(), gas());
        assert_eq!(f.data[layout.offset_index([0, 1, 0], Axis::X, -1)][0], 12.0);
        assert_eq!(f.data[layout.offset_index([1, 0, 0], Axis::Y, -1)][0], 11.0);
        assert_eq!(f.data[layout.offset_index([2, 1, 0], Axis::Y, 2)][0], 12.0);
    }
}
