//! Entropy-scaled dissipation: the discrete entropy Jacobian, the discrete
//! right eigenvectors with their scaling, the interface eigenvalues, and the
//! entropy-stable KEPES flux.
//!
//! The eigenvector matrix `R` and diagonal scaling `Z` satisfy `H = R Z R^T`
//! for the discrete entropy Jacobian `H`, so the dissipation term
//! `R |Lambda| Z R^T [[v]]` is a positive semi-definite form in the jump of
//! the entropy variables.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Vector3;

use crate::flux::kepec_from_means;
use crate::means::{interface_means, InterfaceMeans};
use crate::state::{magnetosonic, ConservedState, GasModel, Matrix8, StateError, Vector8};

/// Column order of the eigenvector matrix.
pub const WAVE_ORDER: [&str; 8] = ["+f", "+a", "+s", "E", "D", "-s", "-a", "-f"];

/// Which averages feed `H`, `R`, `Z` and `Lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanPolicy {
    /// Logarithmic and beta-based means that make `H [[v]] = [[q]]` hold
    /// away from the energy component.
    #[default]
    Entropy,
    /// Every average replaced by the plain arithmetic mean of the primitive
    /// variables; the matrices become the continuous ones at that state.
    Arithmetic,
}

/// The scalar averages shared by `H`, `R`, `Z` and `Lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Averages {
    gamma: f64,
    rho_ln: f64,
    rho_avg: f64,
    beta_avg: f64,
    vel: Vector3<f64>,
    vel_sq_bar: f64,
    p_bar: f64,
    p_ln: f64,
    e_bar: f64,
    tau: f64,
    b: Vector3<f64>,
    p_arith: f64,
    rho_inv: f64,
    b_over_rho: Vector3<f64>,
}

impl Averages {
    fn new(m: &InterfaceMeans, policy: MeanPolicy) -> Self {
        match policy {
            MeanPolicy::Entropy => Self {
                gamma: m.gamma,
                rho_ln: m.rho_ln,
                rho_avg: m.rho_avg,
                beta_avg: m.beta_avg,
                vel: m.vel_avg,
                vel_sq_bar: m.vel_sq_bar,
                p_bar: m.p_bar,
                p_ln: m.p_ln,
                e_bar: m.e_bar,
                tau: m.tau,
                b: m.b_avg,
                p_arith: m.p_avg,
                rho_inv: m.rho_inv_avg,
                b_over_rho: m.b_over_rho_avg,
            },
            MeanPolicy::Arithmetic => {
                let (rho, p, vel) = (m.rho_avg, m.p_avg, m.vel_avg);
                let vel_sq = vel.norm_squared();
                Self {
                    gamma: m.gamma,
                    rho_ln: rho,
                    rho_avg: rho,
                    beta_avg: rho / (2.0 * p),
                    vel,
                    vel_sq_bar: vel_sq,
                    p_bar: p,
                    p_ln: p,
                    e_bar: p / (m.gamma - 1.0) + 0.5 * rho * vel_sq,
                    tau: p / rho,
                    b: m.b_avg,
                    p_arith: p,
                    rho_inv: 1.0 / rho,
                    b_over_rho: m.b_avg / rho,
                }
            }
        }
    }
}

/// Discrete entropy Jacobian and the averages it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEntropyJacobian {
    pub h: Matrix8,
    pub tau: f64,
    pub p_bar: f64,
    pub e_bar: f64,
    pub p_ln: f64,
}

fn build_h(a: &Averages) -> DiscreteEntropyJacobian {
    let (rho_ln, p_bar, e_bar, tau) = (a.rho_ln, a.p_bar, a.e_bar, a.tau);
    let u = a.vel;
    let mut h = Matrix8::zeros();
    h[(0, 0)] = rho_ln;
    for i in 0..3 {
        h[(0, 1 + i)] = rho_ln * u[i];
        for j in i..3 {
            h[(1 + i, 1 + j)] = rho_ln * u[i] * u[j] + if i == j { p_bar } else { 0.0 };
        }
        h[(1 + i, 4)] = (e_bar + p_bar) * u[i];
        h[(4, 5 + i)] = tau * a.b[i];
        h[(5 + i, 5 + i)] = tau;
    }
    h[(0, 4)] = e_bar;
    h[(4, 4)] = (a.p_ln * a.p_ln / (a.gamma - 1.0) + e_bar * e_bar) / rho_ln
        + p_bar * u.norm_squared()
        + tau * a.b.norm_squared();
    h.fill_lower_triangle_with_upper_triangle();
    DiscreteEntropyJacobian {
        h,
        tau,
        p_bar,
        e_bar,
        p_ln: a.p_ln,
    }
}

pub fn discrete_entropy_jacobian(m: &InterfaceMeans) -> DiscreteEntropyJacobian {
    discrete_entropy_jacobian_with(m, MeanPolicy::Entropy)
}

pub fn discrete_entropy_jacobian_with(m: &InterfaceMeans, policy: MeanPolicy) -> DiscreteEntropyJacobian {
    build_h(&Averages::new(m, policy))
}

/// Intermediate averaged quantities of the eigen decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenHats {
    /// Alfvén, fast and slow speeds entering the eigenvalues.
    pub c_a: f64,
    pub c_f: f64,
    pub c_s: f64,
    /// Sound speed entering the eigenvalues.
    pub a_hat: f64,
    /// Fast and slow speeds entering the eigenvectors.
    pub c_f_vec: f64,
    pub c_s_vec: f64,
    pub a_bar: f64,
    pub a_ln: f64,
    pub a_beta: f64,
    pub b_bar: Vector3<f64>,
    pub b_perp: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub alpha_f: f64,
    pub alpha_s: f64,
    pub psi_plus_f: f64,
    pub psi_minus_f: f64,
    pub psi_plus_s: f64,
    pub psi_minus_s: f64,
    pub sigma: f64,
}

/// Discrete eigenvectors (columns in [`WAVE_ORDER`]), scaling and eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub r: Matrix8,
    pub z: Vector8,
    pub lambda: Vector8,
    pub hats: EigenHats,
}

/// `(alpha_f, alpha_s)` from `a^2`, `b1^2`, `b_perp^2`, evaluated without
/// cancellation, together with the fast and slow speeds squared.
fn alphas(a2: f64, b1_sq: f64, bperp_sq: f64) -> (f64, f64, f64, f64) {
    let b2 = b1_sq + bperp_sq;
    let disc = ((a2 - b2) * (a2 - b2) + 4.0 * a2 * bperp_sq).sqrt();
    // n1 = a^2 - c_s^2, n2 = c_f^2 - a^2, n1 + n2 = c_f^2 - c_s^2 = disc.
    let (n1, n2) = if a2 >= b2 {
        let d = disc + a2 - b2;
        (0.5 * d, if d > 0.0 { 2.0 * a2 * bperp_sq / d } else { 0.0 })
    } else {
        let d = disc + b2 - a2;
        (if d > 0.0 { 2.0 * a2 * bperp_sq / d } else { 0.0 }, 0.5 * d)
    };
    let (n1, n2) = (n1.max(0.0), n2.max(0.0));
    let cf2 = a2 + n2;
    let cs2 = if cf2 > 0.0 { a2 * b1_sq / cf2 } else { 0.0 };
    let total = n1 + n2;
    if total > 0.0 {
        ((n1 / total).sqrt(), (n2 / total).sqrt(), cf2, cs2)
    } else {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2, cf2, cs2)
    }
}

fn build_eigensystem(av: &Averages) -> EigenSystem {
    let gamma = av.gamma;
    let rho_ln = av.rho_ln;
    let sqrt_rho_ln = rho_ln.sqrt();
    let [u, v, w] = [av.vel.x, av.vel.y, av.vel.z];

    let a_bar2 = gamma * av.p_bar / rho_ln;
    let a_ln2 = gamma * av.p_ln / rho_ln;
    let a_beta = (gamma / (2.0 * av.beta_avg)).sqrt();
    let b_bar = av.b / sqrt_rho_ln;
    let b1_sq = b_bar.x * b_bar.x;
    let b_perp = b_bar.y.hypot(b_bar.z);
    let bperp_sq = b_perp * b_perp;
    // Any unit transverse direction works when b_perp vanishes; a tolerance
    // here would break H = R Z R^T by O(b_perp).
    let (beta2, beta3) = if b_perp == 0.0 {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else {
        (b_bar.y / b_perp, b_bar.z / b_perp)
    };
    let (alpha_f, alpha_s, cf2, cs2) = alphas(a_bar2, b1_sq, bperp_sq);
    let (cf, cs) = (cf2.sqrt(), cs2.sqrt());
    let sigma = if b_bar.x >= 0.0 { 1.0 } else { -1.0 };

    let trans = sigma * (v * beta2 + w * beta3);
    let enthalpy_f = alpha_f * rho_ln * (0.5 * av.vel_sq_bar + a_ln2 / (gamma - 1.0));
    let enthalpy_s = alpha_s * rho_ln * (0.5 * av.vel_sq_bar + a_ln2 / (gamma - 1.0));
    let psi_f = |sgn: f64| {
        enthalpy_f + a_beta * alpha_s * rho_ln * b_perp + sgn * alpha_f * cf * rho_ln * u
            - sgn * alpha_s * cs * rho_ln * trans
    };
    let psi_s = |sgn: f64| {
        enthalpy_s - a_beta * alpha_f * rho_ln * b_perp
            + sgn * alpha_s * cs * rho_ln * u
            + sgn * alpha_f * cf * rho_ln * trans
    };
    let fast = |sgn: f64| {
        Vector8::from([
            alpha_f * rho_ln,
            alpha_f * rho_ln * (u + sgn * cf),
            rho_ln * (alpha_f * v - sgn * alpha_s * cs * beta2 * sigma),
            rho_ln * (alpha_f * w - sgn * alpha_s * cs * beta3 * sigma),
            psi_f(sgn),
            0.0,
            alpha_s * a_beta * beta2 * sqrt_rho_ln,
            alpha_s * a_beta * beta3 * sqrt_rho_ln,
        ])
    };
    let slow = |sgn: f64| {
        Vector8::from([
            alpha_s * rho_ln,
            alpha_s * rho_ln * (u + sgn * cs),
            rho_ln * (alpha_s * v + sgn * alpha_f * cf * beta2 * sigma),
            rho_ln * (alpha_s * w + sgn * alpha_f * cf * beta3 * sigma),
            psi_s(sgn),
            0.0,
            -alpha_f * a_beta * beta2 * sqrt_rho_ln,
            -alpha_f * a_beta * beta3 * sqrt_rho_ln,
        ])
    };
    let alfven_scale = rho_ln * av.rho_avg.sqrt();
    let alfven = |sgn: f64| {
        Vector8::from([
            0.0,
            0.0,
            sgn * alfven_scale * beta3,
            -sgn * alfven_scale * beta2,
            -sgn * alfven_scale * (beta2 * w - beta3 * v),
            0.0,
            -rho_ln * beta3,
            rho_ln * beta2,
        ])
    };
    let entropy = Vector8::from([1.0, u, v, w, 0.5 * av.vel_sq_bar, 0.0, 0.0, 0.0]);
    let divergence = Vector8::from([0.0, 0.0, 0.0, 0.0, av.b.x, 1.0, 0.0, 0.0]);

    let r = Matrix8::from_columns(&[
        fast(1.0),
        alfven(1.0),
        slow(1.0),
        entropy,
        divergence,
        slow(-1.0),
        alfven(-1.0),
        fast(-1.0),
    ]);

    let z_sound = 1.0 / (2.0 * gamma * rho_ln);
    let z_alfven = 1.0 / (4.0 * av.beta_avg * rho_ln * rho_ln);
    let z = Vector8::from([
        z_sound,
        z_alfven,
        z_sound,
        rho_ln * (gamma - 1.0) / gamma,
        1.0 / (2.0 * av.beta_avg),
        z_sound,
        z_alfven,
        z_sound,
    ]);

    // Eigenvalues use their own averages.
    let a_hat2 = gamma * av.p_arith * av.rho_inv;
    let bh = av.b.component_mul(&av.b_over_rho).map(|x| x.max(0.0));
    let (c_f, c_s) = magnetosonic(a_hat2, bh.x, bh.y + bh.z);
    let c_a = bh.x.sqrt().clamp(c_s, c_f);
    let lambda = Vector8::from([u + c_f, u + c_a, u + c_s, u, u, u - c_s, u - c_a, u - c_f]);

    EigenSystem {
        r,
        z,
        lambda,
        hats: EigenHats {
            c_a,
            c_f,
            c_s,
            a_hat: a_hat2.sqrt(),
            c_f_vec: cf,
            c_s_vec: cs,
            a_bar: a_bar2.sqrt(),
            a_ln: a_ln2.sqrt(),
            a_beta,
            b_bar,
            b_perp,
            beta2,
            beta3,
            alpha_f,
            alpha_s,
            psi_plus_f: psi_f(1.0),
            psi_minus_f: psi_f(-1.0),
            psi_plus_s: psi_s(1.0),
            psi_minus_s: psi_s(-1.0),
            sigma,
        },
    }
}

pub fn eigensystem(m: &InterfaceMeans) -> EigenSystem {
    eigensystem_with(m, MeanPolicy::Entropy)
}

pub fn eigensystem_with(m: &InterfaceMeans, policy: MeanPolicy) -> EigenSystem {
    build_eigensystem(&Averages::new(m, policy))
}

/// Jump of the entropy variables across the interface.
pub fn entropy_jump(m: &InterfaceMeans) -> Vector8 {
    let g = GasModel::new(m.gamma).expect("means carry a valid gamma");
    m.right.entropy_variables(g).0 - m.left.entropy_variables(g).0
}

/// Dissipation operator settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dissipation {
    pub policy: MeanPolicy,
    /// Lower bound on `|lambda|`; zero reproduces the scheme without any
    /// entropy fix.
    pub eigenvalue_floor: f64,
}

impl Dissipation {
    pub fn naive() -> Self {
        Self {
            policy: MeanPolicy::Arithmetic,
            eigenvalue_floor: 0.0,
        }
    }

    /// Characteristic weights `|lambda_k| z_k` and projections `R^T [[v]]`.
    fn weights(&self, m: &InterfaceMeans, dv: &Vector8) -> (EigenSystem, Vector8, Vector8) {
        let es = eigensystem_with(m, self.policy);
        let weights = es
            .lambda
            .map(|l| l.abs().max(self.eigenvalue_floor))
            .component_mul(&es.z);
        let proj = es.r.tr_mul(dv);
        (es, weights, proj)
    }

    /// `R |Lambda| Z R^T [[v]]`.
    pub fn apply(&self, m: &InterfaceMeans, dv: &Vector8) -> Vector8 {
        let (es, weights, proj) = self.weights(m, dv);
        es.r * weights.component_mul(&proj)
    }

    /// `-1/2 [[v]]^T R |Lambda| Z R^T [[v]]`, summed as non-negative terms.
    pub fn rate(&self, m: &InterfaceMeans, dv: &Vector8) -> f64 {
        let (_, weights, proj) = self.weights(m, dv);
        -0.5 * weights.component_mul(&proj.component_mul(&proj)).sum()
    }

    pub fn flux(&self, m: &InterfaceMeans) -> Vector8 {
        kepec_from_means(m) - self.apply(m, &entropy_jump(m)) * 0.5
    }
}

pub fn kepes_flux(ql: &ConservedState, qr: &ConservedState, g: GasModel) -> Result<Vector8, StateError> {
    Ok(Dissipation::default().flux(&interface_means(ql, qr, g)?))
}

pub fn kepes_flux_naive(ql: &ConservedState, qr: &ConservedState, g: GasModel) -> Result<Vector8, StateError> {
    Ok(Dissipation::naive().flux(&interface_means(ql, qr, g)?))
}

pub fn entropy_dissipation_rate(ql: &ConservedState, qr: &ConservedState, g: GasModel) -> Result<f64, StateError> {
    let m = interface_means(ql, qr, g)?;
    Ok(Dissipation::default().rate(&m, &entropy_jump(&m)))
}
