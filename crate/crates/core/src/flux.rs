//! Kinetic-energy-preserving, entropy-conserving (KEPEC) interface flux and
//! the interface discretization of the Janhunen source term.

use crate::means::{avg, InterfaceMeans};
use crate::state::{cons_to_prim, ConservedState, GasModel, StateError, Vector8};

/// KEPEC flux from precomputed interface means.
pub fn kepec_from_means(m: &InterfaceMeans) -> Vector8 {
    let gamma = m.gamma;
    let [u, v, w] = [m.vel_avg.x, m.vel_avg.y, m.vel_avg.z];
    let [b1, b2, b3] = [m.b_avg.x, m.b_avg.y, m.b_avg.z];
    let b_sq_sum = m.b_sq_avg.sum();
    let b1_sq = m.b_sq_avg.x;
    let b1b2 = m.b1_b_avg.y;
    let b1b3 = m.b1_b_avg.z;

    let f1 = m.rho_ln * u;
    let f2 = f1 * u + m.p_bar + 0.5 * b_sq_sum - b1_sq;
    let f3 = f1 * v - b1b2;
    let f4 = f1 * w - b1b3;

    let f5 = 0.5 * u * (m.rho_ln / (m.beta_ln * (gamma - 1.0)) + m.rho_avg / m.beta_avg)
        + 0.5 * f1 * m.vel_sq_bar
        + 0.5 * u * (b_sq_sum + 2.0 * (b2 * b2 + b3 * b3))
        - u * b1_sq
        - v * b1b2
        - w * b1b3
        - v * b1 * b2
        - w * b1 * b3
        + m.vel_b1_b_avg.sum()
        - 0.5 * m.u_b_sq_avg.sum();

    Vector8::from([
        f1,
        f2,
        f3,
        f4,
        f5,
        0.0,
        u * b2 - v * b1,
        u * b3 - w * b1,
    ])
}

pub fn kepec_flux(ql: &ConservedState, qr: &ConservedState, g: GasModel) -> Result<Vector8, StateError> {
    Ok(kepec_from_means(&crate::means::interface_means(ql, qr, g)?))
}

/// Interface source contribution, per unit volume, for cells of widths
/// `dx_l` and `dx_r` on either side.
///
/// When `<dx beta B_i>` vanishes relative to its natural size the ratio
/// `<beta><B_i>/<dx beta B_i>` is replaced by `1/<dx>`.
pub fn janhunen_from_means(m: &InterfaceMeans, dx_l: f64, dx_r: f64) -> Vector8 {
    let mut s = Vector8::zeros();
    let db1 = m.b_jump.x;
    if db1 == 0.0 {
        return s;
    }
    let dx_avg = avg(dx_l, dx_r);
    for i in 0..3 {
        let (bl, br) = (m.left.b[i], m.right.b[i]);
        let den = avg(dx_l * m.beta_l * bl, dx_r * m.beta_r * br);
        let size = dx_avg * m.beta_avg * bl.abs().max(br.abs()).max(1e-300);
        let ratio = if den.abs() <= 1e-12 * size {
            1.0 / dx_avg
        } else {
            m.beta_avg * m.b_avg[i] / den
        };
        s[5 + i] = -db1 * m.vel_avg[i] * ratio;
    }
    s
}

pub fn janhunen_source_interface(
    ql: &ConservedState,
    qr: &ConservedState,
    dx_l: f64,
    dx_r: f64,
    g: GasModel,
) -> Result<Vector8, StateError> {
    Ok(janhunen_from_means(&crate::means::interface_means(ql, qr, g)?, dx_l, dx_r))
}

/// Residual of the discrete entropy conservation condition and the size of
/// the terms that enter it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcResidual {
    pub residual: f64,
    pub scale: f64,
}

/// `[[v]].f - [[v.f]] + <dx v>.s + [[F]]` for a given interface flux and source.
pub fn ec_residual_for(
    ql: &ConservedState,
    qr: &ConservedState,
    dx_l: f64,
    dx_r: f64,
    flux: &Vector8,
    source: &Vector8,
    g: GasModel,
) -> Result<EcResidual, StateError> {
    let (l, r) = (cons_to_prim(ql, g)?, cons_to_prim(qr, g)?);
    let (vl, vr) = (l.entropy_variables(g).0, r.entropy_variables(g).0);
    let (fl, fr) = (l.flux_x(g), r.flux_x(g));
    let (el, er) = (l.entropy_flux_x(g), r.entropy_flux_x(g));
    let dv = vr - vl;
    let dx_v = (vl * dx_l + vr * dx_r) * 0.5;
    let (vfl, vfr) = (vl.dot(&fl), vr.dot(&fr));
    let residual = dv.dot(flux) - (vfr - vfl) + dx_v.dot(source) + (er - el);
    let scale = dv.component_mul(flux).abs().sum()
        + vl.component_mul(&fl).abs().sum()
        + vr.component_mul(&fr).abs().sum()
        + dx_v.component_mul(source).abs().sum()
        + el.abs()
        + er.abs();
    Ok(EcResidual { residual, scale })
}

pub fn ec_condition_residual(
    ql: &ConservedState,
    qr: &ConservedState,
    dx_l: f64,
    dx_r: f64,
    g: GasModel,
) -> Result<f64, StateError> {
    Ok(ec_condition_check(ql, qr, dx_l, dx_r, g)?.residual)
}

/// Residual of the KEPEC flux with the interface source, plus its scale.
pub fn ec_condition_check(
    ql: &ConservedState,
    qr: &ConservedState,
    dx_l: f64,
    dx_r: f64,
    g: GasModel,
) -> Result<EcResidual, StateError> {
    let m = crate::means::interface_means(ql, qr, g)?;
    let f = kepec_from_means(&m);
    let s = janhunen_from_means(&m, dx_l, dx_r);
    ec_residual_for(ql, qr, dx_l, dx_r, &f, &s, g)
}
