//! Pointwise MHD states, the ideal-gas closure, the entropy pair and the
//! characteristic speeds in the x-direction.
//!
//! Entropy uses the mathematical sign convention: `S = -rho s / (gamma - 1)`
//! with `s = ln p - gamma ln rho`, so physically admissible processes make
//! the total `S` decrease.

use nalgebra::{SMatrix, SVector, Vector3};
use thiserror::Error;

pub type Vector8 = SVector<f64, 8>;
pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Index triple of an interior cell, used to locate admissibility failures.
pub type CellIndex = [usize; 3];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StateError {
    #[error("non-positive density {rho:e}{}", at(.cell))]
    NonPositiveDensity { rho: f64, cell: Option<CellIndex> },
    #[error("non-positive pressure {p:e}{}", at(.cell))]
    NonPositivePressure { p: f64, cell: Option<CellIndex> },
    #[error("non-finite state{}", at(.cell))]
    NonFinite { cell: Option<CellIndex> },
    #[error("adiabatic index must exceed 1, got {0}")]
    InvalidGamma(f64),
}

fn at(cell: &Option<CellIndex>) -> String {
    match cell {
        Some([i, j, k]) => format!(" at cell ({i}, {j}, {k})"),
        None => String::new(),
    }
}

impl StateError {
    /// Attach a cell index to an admissibility error.
    pub fn at_cell(self, idx: CellIndex) -> Self {
        match self {
            StateError::NonPositiveDensity { rho, .. } => StateError::NonPositiveDensity {
                rho,
                cell: Some(idx),
            },
            StateError::NonPositivePressure { p, .. } => StateError::NonPositivePressure {
                p,
                cell: Some(idx),
            },
            StateError::NonFinite { .. } => StateError::NonFinite { cell: Some(idx) },
            other => other,
        }
    }

    pub fn cell(&self) -> Option<CellIndex> {
        match self {
            StateError::NonPositiveDensity { cell, .. }
            | StateError::NonPositivePressure { cell, .. }
            | StateError::NonFinite { cell } => *cell,
            StateError::InvalidGamma(_) => None,
        }
    }
}

/// Ideal gas with a fixed adiabatic index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self, StateError> {
        if gamma.is_finite() && gamma > 1.0 {
            Ok(Self { gamma })
        } else {
            Err(StateError::InvalidGamma(gamma))
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Conserved variables `(rho, rho u, E, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: Vector3<f64>,
    pub energy: f64,
    pub b: Vector3<f64>,
}

/// Primitive variables `(rho, u, p, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub vel: Vector3<f64>,
    pub p: f64,
    pub b: Vector3<f64>,
}

/// Entropy variables, the gradient of `S` with respect to the conserved state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyVars(pub Vector8);

/// Characteristic speeds along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    pub c_a: f64,
    pub c_s: f64,
    pub c_f: f64,
    pub a: f64,
}

impl ConservedState {
    pub fn from_vector(q: &Vector8) -> Self {
        Self {
            rho: q[0],
            mom: Vector3::new(q[1], q[2], q[3]),
            energy: q[4],
            b: Vector3::new(q[5], q[6], q[7]),
        }
    }

    pub fn to_vector(&self) -> Vector8 {
        Vector8::from([
            self.rho, self.mom.x, self.mom.y, self.mom.z, self.energy, self.b.x, self.b.y,
            self.b.z,
        ])
    }

    fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }
}

impl PrimitiveState {
    pub fn new(rho: f64, vel: [f64; 3], p: f64, b: [f64; 3]) -> Self {
        Self {
            rho,
            vel: Vector3::from(vel),
            p,
            b: Vector3::from(b),
        }
    }

    pub fn from_vector(w: &Vector8) -> Self {
        Self {
            rho: w[0],
            vel: Vector3::new(w[1], w[2], w[3]),
            p: w[4],
            b: Vector3::new(w[5], w[6], w[7]),
        }
    }

    pub fn to_vector(&self) -> Vector8 {
        Vector8::from([
            self.rho, self.vel.x, self.vel.y, self.vel.z, self.p, self.b.x, self.b.y, self.b.z,
        ])
    }

    fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }

    /// Checks `rho > 0`, `p > 0` and finiteness.
    pub fn validate(&self) -> Result<(), StateError> {
        if !self.is_finite() {
            return Err(StateError::NonFinite { cell: None });
        }
        if self.rho <= 0.0 {
            return Err(StateError::NonPositiveDensity {
                rho: self.rho,
                cell: None,
            });
        }
        if self.p <= 0.0 {
            return Err(StateError::NonPositivePressure {
                p: self.p,
                cell: None,
            });
        }
        Ok(())
    }

    /// `beta = rho / (2 p)`, an inverse temperature.
    #[inline]
    pub fn beta(&self) -> f64 {
        self.rho / (2.0 * self.p)
    }

    pub fn to_conserved(&self, g: GasModel) -> ConservedState {
        let kinetic = 0.5 * self.rho * self.vel.norm_squared();
        let magnetic = 0.5 * self.b.norm_squared();
        ConservedState {
            rho: self.rho,
            mom: self.vel * self.rho,
            energy: self.p / (g.gamma - 1.0) + kinetic + magnetic,
            b: self.b,
        }
    }

    /// Physical flux in x.
    pub fn flux_x(&self, g: GasModel) -> Vector8 {
        let gamma = g.gamma;
        let (rho, p) = (self.rho, self.p);
        let [u, v, w] = [self.vel.x, self.vel.y, self.vel.z];
        let [b1, b2, b3] = [self.b.x, self.b.y, self.b.z];
        let b_sq = self.b.norm_squared();
        let f5 = 0.5 * rho * u * self.vel.norm_squared() + gamma * u * p / (gamma - 1.0)
            + u * b2 * b2
            + u * b3 * b3
            - v * b1 * b2
            - w * b1 * b3;
        Vector8::from([
            rho * u,
            rho * u * u + p + 0.5 * b_sq - b1 * b1,
            rho * u * v - b1 * b2,
            rho * u * w - b1 * b3,
            f5,
            0.0,
            u * b2 - v * b1,
            u * b3 - w * b1,
        ])
    }

    /// Specific entropy `s = ln p - gamma ln rho`.
    #[inline]
    pub fn specific_entropy(&self, g: GasModel) -> f64 {
        self.p.ln() - g.gamma * self.rho.ln()
    }

    pub fn entropy_density(&self, g: GasModel) -> f64 {
        -self.rho * self.specific_entropy(g) / (g.gamma - 1.0)
    }

    pub fn entropy_flux_x(&self, g: GasModel) -> f64 {
        self.vel.x * self.entropy_density(g)
    }

    pub fn entropy_potential_x(&self) -> f64 {
        let u = self.vel.x;
        self.rho * u
            + self.rho / self.p * (0.5 * u * self.b.norm_squared() - self.b.x * self.vel.dot(&self.b))
    }

    pub fn entropy_variables(&self, g: GasModel) -> EntropyVars {
        let gamma = g.gamma;
        let beta = self.beta();
        let s = self.specific_entropy(g);
        let tb = 2.0 * beta;
        EntropyVars(Vector8::from([
            (gamma - s) / (gamma - 1.0) - beta * self.vel.norm_squared(),
            tb * self.vel.x,
            tb * self.vel.y,
            tb * self.vel.z,
            -tb,
            tb * self.b.x,
            tb * self.b.y,
            tb * self.b.z,
        ]))
    }

    /// Sound, Alfvén and magnetosonic speeds along x.
    pub fn wave_speeds_x(&self, g: GasModel) -> WaveSpeeds {
        let a2 = g.gamma * self.p / self.rho;
        let a = a2.sqrt();
        let inv_rho = 1.0 / self.rho;
        let b1_sq = self.b.x * self.b.x * inv_rho;
        let bperp_sq = (self.b.y * self.b.y + self.b.z * self.b.z) * inv_rho;
        let (c_f, c_s) = magnetosonic(a2, b1_sq, bperp_sq);
        let c_a = b1_sq.sqrt().clamp(c_s, c_f);
        WaveSpeeds { c_a, c_s, c_f, a }
    }

    /// Continuous entropy Jacobian `dq/dv`.
    pub fn entropy_jacobian(&self, g: GasModel) -> Matrix8 {
        let gamma = g.gamma;
        let (rho, p) = (self.rho, self.p);
        let u = self.vel;
        let a2 = gamma * p / rho;
        let h = a2 / (gamma - 1.0) + 0.5 * u.norm_squared();
        let e_hydro = p / (gamma - 1.0) + 0.5 * rho * u.norm_squared();
        let mut m = Matrix8::zeros();
        m[(0, 0)] = rho;
        for i in 0..3 {
            m[(0, 1 + i)] = rho * u[i];
            for j in i..3 {
                m[(1 + i, 1 + j)] = rho * u[i] * u[j] + if i == j { p } else { 0.0 };
            }
            m[(1 + i, 4)] = rho * h * u[i];
            m[(4, 5 + i)] = p * self.b[i] / rho;
            m[(5 + i, 5 + i)] = p / rho;
        }
        m[(0, 4)] = e_hydro;
        m[(4, 4)] = rho * h * h - a2 * p / (gamma - 1.0) + a2 * self.b.norm_squared() / gamma;
        m.fill_lower_triangle_with_upper_triangle();
        m
    }
}

/// Fast and slow magnetosonic speeds from `a^2`, `b1^2` and `b_perp^2`.
///
/// Uses `c_f +- c_s = sqrt(a^2 + b^2 +- 2 a |b1|)`, with the minus radicand
/// written as `(a - |b1|)^2 + b_perp^2` so that it cannot go negative.
pub fn magnetosonic(a2: f64, b1_sq: f64, bperp_sq: f64) -> (f64, f64) {
    let a2 = a2.max(0.0);
    let b1_sq = b1_sq.max(0.0);
    let bperp_sq = bperp_sq.max(0.0);
    let a = a2.sqrt();
    let b1 = b1_sq.sqrt();
    let plus = (a2 + b1_sq + bperp_sq + 2.0 * a * b1).sqrt();
    let minus = ((a - b1) * (a - b1) + bperp_sq).sqrt();
    let c_f = 0.5 * (plus + minus);
    let c_s = (0.5 * (plus - minus)).max(0.0);
    (c_f, c_s.min(c_f))
}

pub fn prim_to_cons(w: &PrimitiveState, g: GasModel) -> Result<ConservedState, StateError> {
    if !w.is_finite() {
        return Err(StateError::NonFinite { cell: None });
    }
    Ok(w.to_conserved(g))
}

pub fn cons_to_prim(q: &ConservedState, g: GasModel) -> Result<PrimitiveState, StateError> {
    if !q.is_finite() {
        return Err(StateError::NonFinite { cell: None });
    }
    if q.rho <= 0.0 {
        return Err(StateError::NonPositiveDensity {
            rho: q.rho,
            cell: None,
        });
    }
    let vel = q.mom / q.rho;
    let p = (g.gamma - 1.0) * (q.energy - 0.5 * q.mom.dot(&vel) - 0.5 * q.b.norm_squared());
    if !(p > 0.0) {
        return Err(StateError::NonPositivePressure { p, cell: None });
    }
    Ok(PrimitiveState {
        rho: q.rho,
        vel,
        p,
        b: q.b,
    })
}

pub fn physical_flux_x(q: &ConservedState, g: GasModel) -> Result<Vector8, StateError> {
    Ok(cons_to_prim(q, g)?.flux_x(g))
}

pub fn entropy_density(q: &ConservedState, g: GasModel) -> Result<f64, StateError> {
    Ok(cons_to_prim(q, g)?.entropy_density(g))
}

pub fn entropy_flux_x(q: &ConservedState, g: GasModel) -> Result<f64, StateError> {
    Ok(cons_to_prim(q, g)?.entropy_flux_x(g))
}

pub fn entropy_potential_x(q: &ConservedState, g: GasModel) -> Result<f64, StateError> {
    Ok(cons_to_prim(q, g)?.entropy_potential_x())
}

pub fn entropy_variables(q: &ConservedState, g: GasModel) -> Result<EntropyVars, StateError> {
    Ok(cons_to_prim(q, g)?.entropy_variables(g))
}

pub fn wave_speeds_x(w: &PrimitiveState, g: GasModel) -> WaveSpeeds {
    w.wave_speeds_x(g)
}

/// Continuous entropy Jacobian `dq/dv` at a conserved state.
pub fn entropy_jacobian(q: &ConservedState, g: GasModel) -> Result<Matrix8, StateError> {
    Ok(cons_to_prim(q, g)?.entropy_jacobian(g))
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::Rng;

    /// Random admissible primitive state with O(1) spread.
    pub fn random_prim<R: Rng>(rng: &mut R) -> PrimitiveState {
        PrimitiveState::new(
            rng.gen_range(0.1..3.0),
            [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ],
            rng.gen_range(0.1..3.0),
            [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ],
        )
    }

    pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
        (a - b).abs() / scale.max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gas(g: f64) -> GasModel {
        GasModel::new(g).unwrap()
    }

    #[test]
    fn briowu_left_energy() {
        let w = PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0]);
        let q = prim_to_cons(&w, gas(2.0)).unwrap();
        assert_eq!(q.energy, 1.78125);
        let back = cons_to_prim(&q, gas(2.0)).unwrap();
        assert!((back.p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn static_gas_energy_and_flux() {
        let g = gas(1.4);
        let w = PrimitiveState::new(1.0, [0.0; 3], 2.5, [0.0; 3]);
        let q = w.to_conserved(g);
        assert_eq!(q.mom, Vector3::zeros());
        assert!((q.energy - 2.5 / 0.4).abs() < 1e-14);
        let f = w.flux_x(g);
        assert_eq!(f, Vector8::from([0.0, 2.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn closure_pressure_from_energy() {
        let q = ConservedState {
            rho: 1.0,
            mom: Vector3::zeros(),
            energy: 0.15,
            b: Vector3::zeros(),
        };
        let w = cons_to_prim(&q, gas(5.0 / 3.0)).unwrap();
        assert!((w.p - 0.1).abs() < 1e-15);
    }

    #[test]
    fn admissibility_errors() {
        let g = gas(5.0 / 3.0);
        let q = ConservedState {
            rho: 1.0,
            mom: Vector3::new(1.0, 0.0, 0.0),
            energy: 0.4,
            b: Vector3::new(0.5, 0.0, 0.0),
        };
        assert!(matches!(
            cons_to_prim(&q, g),
            Err(StateError::NonPositivePressure { .. })
        ));
        let q = ConservedState { rho: 0.0, ..q };
        assert!(matches!(
            cons_to_prim(&q, g),
            Err(StateError::NonPositiveDensity { .. })
        ));
        let q = ConservedState { rho: f64::NAN, ..q };
        assert!(matches!(cons_to_prim(&q, g), Err(StateError::NonFinite { .. })));
        let err = StateError::NonPositivePressure { p: -1.0, cell: None }.at_cell([3, 4, 0]);
        assert_eq!(err.cell(), Some([3, 4, 0]));
        assert!(GasModel::new(1.0).is_err());
    }

    #[test]
    fn briowu_left_flux_momentum() {
        let w = PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0]);
        let f = w.flux_x(gas(2.0));
        assert_eq!(f[1], 1.21875);
    }

    #[test]
    fn round_trip_random() {
        let g = gas(5.0 / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let w = random_prim(&mut rng);
            let back = cons_to_prim(&prim_to_cons(&w, g).unwrap(), g).unwrap();
            let (a, b) = (w.to_vector(), back.to_vector());
            for i in 0..8 {
                assert!(rel_err(a[i], b[i], a[i].abs().max(1e-3)) < 1e-13, "{i}: {a} {b}");
            }
        }
    }

    #[test]
    fn unit_state_entropy() {
        let g = gas(5.0 / 3.0);
        let w = PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.0; 3]);
        assert_eq!(w.entropy_density(g), 0.0);
        let v = w.entropy_variables(g).0;
        assert_eq!(v, Vector8::from([2.5, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0]));
        let w = PrimitiveState::new(0.7, [0.0; 3], 3.0, [1.0, 2.0, 3.0]);
        assert_eq!(w.entropy_flux_x(g), 0.0);
        assert_eq!(w.entropy_potential_x(), 0.0);
    }

    #[test]
    fn magnetic_entropy_variables_ignore_velocity() {
        let g = gas(1.4);
        let mut w = PrimitiveState::new(1.3, [0.4, -0.2, 0.9], 0.7, [0.3, -1.1, 0.5]);
        let v1 = w.entropy_variables(g).0;
        w.vel = Vector3::zeros();
        let v0 = w.entropy_variables(g).0;
        for i in 5..8 {
            assert_eq!(v1[i], v0[i]);
            assert_eq!(v0[i], w.rho / w.p * w.b[i - 5]);
        }
    }

    #[test]
    fn potential_identity() {
        let g = gas(5.0 / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let w = random_prim(&mut rng);
            let v = w.entropy_variables(g).0;
            let f = w.flux_x(g);
            let lhs = v.dot(&f) - w.entropy_flux_x(g);
            let phi = w.entropy_potential_x();
            let scale = v.component_mul(&f).abs().sum() + w.entropy_flux_x(g).abs();
            assert!(rel_err(lhs, phi, scale) < 1e-13, "{lhs} vs {phi}");
        }
    }

    fn entropy_of_vector(q: &Vector8, g: GasModel) -> f64 {
        cons_to_prim(&ConservedState::from_vector(q), g)
            .unwrap()
            .entropy_density(g)
    }

    #[test]
    fn entropy_variables_are_gradient() {
        let g = gas(5.0 / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 1e-7;
        for _ in 0..200 {
            let w = random_prim(&mut rng);
            let q = w.to_conserved(g).to_vector();
            let v = w.entropy_variables(g).0;
            for i in 0..8 {
                let (mut qp, mut qm) = (q, q);
                qp[i] += h;
                qm[i] -= h;
                let fd = (entropy_of_vector(&qp, g) - entropy_of_vector(&qm, g)) / (2.0 * h);
                assert!((fd - v[i]).abs() < 1e-6 * v[i].abs().max(1.0), "{i}: {fd} {}", v[i]);
            }
        }
    }

    #[test]
    fn jacobian_inverts_entropy_hessian() {
        // dv/dq by central differences, multiplied by dq/dv, must be the identity.
        let g = gas(1.4);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = 1e-6;
        for _ in 0..50 {
            let w = random_prim(&mut rng);
            let q = w.to_conserved(g).to_vector();
            let jac = w.entropy_jacobian(g);
            assert_eq!(jac, jac.transpose());
            let mut hess = Matrix8::zeros();
            for j in 0..8 {
                let (mut qp, mut qm) = (q, q);
                qp[j] += h;
                qm[j] -= h;
                let vp = entropy_variables(&ConservedState::from_vector(&qp), g).unwrap().0;
                let vm = entropy_variables(&ConservedState::from_vector(&qm), g).unwrap().0;
                hess.set_column(j, &((vp - vm) / (2.0 * h)));
            }
            let prod = jac * hess;
            let err = (prod - Matrix8::identity()).abs().max();
            assert!(err < 1e-6 * jac.abs().max() * hess.abs().max(), "{err}");
        }
    }

    #[test]
    fn hydrodynamic_speeds() {
        let g = gas(1.4);
        let w = PrimitiveState::new(1.4, [3.0, 0.0, 0.0], 1.0, [0.0; 3]);
        let s = w.wave_speeds_x(g);
        assert!((s.a - 1.0).abs() < 1e-15);
        assert_eq!(s.c_f, s.a);
        assert_eq!(s.c_s, 0.0);
        assert_eq!(s.c_a, 0.0);
    }

    #[test]
    fn parallel_field_speeds() {
        let g = gas(5.0 / 3.0);
        let w = PrimitiveState::new(1.0, [0.0; 3], 0.6, [0.5, 0.0, 0.0]);
        let s = w.wave_speeds_x(g);
        assert!((s.c_f - 1.0).abs() < 1e-15);
        assert!((s.c_s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn speed_identities() {
        let g = gas(5.0 / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let w = random_prim(&mut rng);
            let s = w.wave_speeds_x(g);
            let b1 = w.b.x.abs() / w.rho.sqrt();
            let b2 = w.b.norm_squared() / w.rho;
            assert!(rel_err(s.c_f * s.c_s, s.a * b1, s.a * s.a + b2) < 1e-12);
            assert!(rel_err(s.c_f * s.c_f + s.c_s * s.c_s, s.a * s.a + b2, s.a * s.a + b2) < 1e-12);
            assert!(0.0 <= s.c_s && s.c_s <= s.c_a && s.c_a <= s.c_f);
        }
    }

    #[test]
    fn contraction_identity_smooth_field() {
        // v . df/dx - dF/dx + (rho (u.B)/p) dB1/dx = 0 along an analytic field.
        let g = gas(5.0 / 3.0);
        let state = |x: f64| {
            PrimitiveState::new(
                1.0 + 0.3 * x.sin(),
                [0.5 * x.cos(), 0.2 + 0.1 * x, -0.3 * (2.0 * x).sin()],
                1.0 + 0.2 * x.cos(),
                [0.8 + 0.4 * x.sin(), 0.3 * x, 0.5 - 0.2 * x.cos()],
            )
        };
        let x0 = 0.37;
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3] {
            let (l, r, c) = (state(x0 - h), state(x0 + h), state(x0));
            let df = (r.flux_x(g) - l.flux_x(g)) / (2.0 * h);
            let d_ent = (r.entropy_flux_x(g) - l.entropy_flux_x(g)) / (2.0 * h);
            let db1 = (r.b.x - l.b.x) / (2.0 * h);
            let v = c.entropy_variables(g).0;
            let res = v.dot(&df) - d_ent + c.rho * c.vel.dot(&c.b) / c.p * db1;
            errs.push(res.abs());
        }
        assert!(errs[0] < 1e-4);
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
    }
}
