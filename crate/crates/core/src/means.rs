//! Two-state averages: jumps, arithmetic means, the logarithmic mean, and the
//! composite averages consumed by the flux, source and dissipation kernels.

use nalgebra::Vector3;

use crate::state::{cons_to_prim, ConservedState, GasModel, PrimitiveState, StateError};

/// Below this value of `f^2` the logarithmic mean switches to the series.
const LOG_MEAN_SERIES_CUTOFF: f64 = 1e-2;

#[inline]
pub fn jump(l: f64, r: f64) -> f64 {
    r - l
}

#[inline]
pub fn avg(l: f64, r: f64) -> f64 {
    0.5 * (l + r)
}

/// Logarithmic mean `(a - b) / (ln a - ln b)` of two positive numbers.
///
/// Near `a = b` the quotient is evaluated through the series of
/// `atanh(f) / f = sum u^k / (2k + 1)` with `f = (a - b) / (a + b)`,
/// `u = f^2` (Ismail and Roe). Eight terms keep the truncation error below
/// `1e-17` over the whole series branch.
pub fn log_mean(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "log_mean needs positive arguments");
    let zeta = a / b;
    let f = (zeta - 1.0) / (zeta + 1.0);
    let u = f * f;
    if u < LOG_MEAN_SERIES_CUTOFF {
        let series = 1.0
            + u * (1.0 / 3.0
                + u * (1.0 / 5.0
                    + u * (1.0 / 7.0
                        + u * (1.0 / 9.0 + u * (1.0 / 11.0 + u * (1.0 / 13.0 + u / 15.0))))));
        (a + b) / (2.0 * series)
    } else {
        (a - b) / zeta.ln()
    }
}

/// Residuals of the product and square rules for the jump operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpResiduals {
    /// `[[ab]] - (<a>[[b]] + <b>[[a]])`
    pub product: f64,
    /// `[[a^2]] - 2<a>[[a]]`
    pub square: f64,
}

pub fn jump_properties_check(a: (f64, f64), b: (f64, f64)) -> JumpResiduals {
    let (al, ar) = a;
    let (bl, br) = b;
    JumpResiduals {
        product: jump(al * bl, ar * br) - (avg(al, ar) * jump(bl, br) + avg(bl, br) * jump(al, ar)),
        square: jump(al * al, ar * ar) - 2.0 * avg(al, ar) * jump(al, ar),
    }
}

/// Every average needed at one interface, computed once and shared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceMeans {
    pub gamma: f64,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub beta_l: f64,
    pub beta_r: f64,

    pub rho_avg: f64,
    pub rho_jump: f64,
    pub rho_ln: f64,
    pub beta_avg: f64,
    pub beta_jump: f64,
    pub beta_ln: f64,
    /// `2<beta>^2 - <beta^2>`
    pub beta_sq_bar: f64,
    pub p_avg: f64,
    pub rho_inv_avg: f64,

    pub vel_avg: Vector3<f64>,
    pub vel_jump: Vector3<f64>,
    /// `<u_i^2>` per component.
    pub vel_sq_avg: Vector3<f64>,
    pub b_avg: Vector3<f64>,
    pub b_jump: Vector3<f64>,
    /// `<B_i^2>` per component.
    pub b_sq_avg: Vector3<f64>,
    /// `<B1 B_i>` per component.
    pub b1_b_avg: Vector3<f64>,
    /// `<u_i B1 B_i>`: `(<u B1^2>, <v B1 B2>, <w B1 B3>)`.
    pub vel_b1_b_avg: Vector3<f64>,
    /// `<u B_i^2>` per component.
    pub u_b_sq_avg: Vector3<f64>,
    /// `<B_i / rho>` per component.
    pub b_over_rho_avg: Vector3<f64>,

    /// `rho_ln / (2 beta_ln)`
    pub p_ln: f64,
    /// `<rho> / (2 <beta>)`
    pub p_bar: f64,
    /// `2 |<u>|^2 - <|u|^2>`
    pub vel_sq_bar: f64,
    /// `p_ln / (gamma - 1) + rho_ln |u|^2-bar / 2`
    pub e_bar: f64,
    /// `p_bar / <rho>`
    pub tau: f64,
}

fn avg3(l: &Vector3<f64>, r: &Vector3<f64>) -> Vector3<f64> {
    (l + r) * 0.5
}

impl InterfaceMeans {
    pub fn new(left: &PrimitiveState, right: &PrimitiveState, g: GasModel) -> Self {
        let gamma = g.gamma();
        let (l, r) = (left, right);
        let beta_l = l.beta();
        let beta_r = r.beta();

        let rho_avg = avg(l.rho, r.rho);
        let rho_ln = log_mean(l.rho, r.rho);
        let beta_avg = avg(beta_l, beta_r);
        let beta_ln = log_mean(beta_l, beta_r);

        let vel_avg = avg3(&l.vel, &r.vel);
        let vel_sq_avg = avg3(&l.vel.component_mul(&l.vel), &r.vel.component_mul(&r.vel));
        let b_avg = avg3(&l.b, &r.b);
        let b_sq_avg = avg3(&l.b.component_mul(&l.b), &r.b.component_mul(&r.b));
        let b1_b_avg = avg3(&(l.b * l.b.x), &(r.b * r.b.x));
        let vel_b1_b_avg = avg3(
            &l.vel.component_mul(&l.b).scale(l.b.x),
            &r.vel.component_mul(&r.b).scale(r.b.x),
        );
        let u_b_sq_avg = avg3(
            &l.b.component_mul(&l.b).scale(l.vel.x),
            &r.b.component_mul(&r.b).scale(r.vel.x),
        );
        let b_over_rho_avg = avg3(&(l.b / l.rho), &(r.b / r.rho));

        let p_ln = rho_ln / (2.0 * beta_ln);
        let p_bar = rho_avg / (2.0 * beta_avg);
        let vel_sq_bar = 2.0 * vel_avg.norm_squared() - vel_sq_avg.sum();
        let e_bar = p_ln / (gamma - 1.0) + 0.5 * rho_ln * vel_sq_bar;

        Self {
            gamma,
            left: *l,
            right: *r,
            beta_l,
            beta_r,
            rho_avg,
            rho_jump: jump(l.rho, r.rho),
            rho_ln,
            beta_avg,
            beta_jump: jump(beta_l, beta_r),
            beta_ln,
            beta_sq_bar: 2.0 * beta_avg * beta_avg - avg(beta_l * beta_l, beta_r * beta_r),
            p_avg: avg(l.p, r.p),
            rho_inv_avg: avg(1.0 / l.rho, 1.0 / r.rho),
            vel_avg,
            vel_jump: r.vel - l.vel,
            vel_sq_avg,
            b_avg,
            b_jump: r.b - l.b,
            b_sq_avg,
            b1_b_avg,
            vel_b1_b_avg,
            u_b_sq_avg,
            b_over_rho_avg,
            p_ln,
            p_bar,
            vel_sq_bar,
            e_bar,
            tau: p_bar / rho_avg,
        }
    }
}

pub fn interface_means(
    ql: &ConservedState,
    qr: &ConservedState,
    g: GasModel,
) -> Result<InterfaceMeans, StateError> {
    let l = cons_to_prim(ql, g)?;
    let r = cons_to_prim(qr, g)?;
    Ok(InterfaceMeans::new(&l, &r, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::testing::random_prim;
    use num_bigint::BigInt;
    use num_traits::{ToPrimitive, Zero};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const BITS: u32 = 256;

    fn fixed(x: f64) -> BigInt {
        // Exact for the argument range used here.
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
        let shift = exp - 1075 + BITS as i64;
        assert!(shift >= 0);
        BigInt::from(mant) << (shift as usize)
    }

    fn atanh_fixed(f: &BigInt) -> BigInt {
        let f2 = (f * f) >> BITS;
        let mut power = f.clone();
        let mut sum = f.clone();
        let mut k = 1u32;
        loop {
            power = (&power * &f2) >> BITS;
            if power.is_zero() {
                return sum;
            }
            sum += &power / BigInt::from(2 * k + 1);
            k += 1;
        }
    }

    /// Logarithmic mean in 256-bit fixed point, about 70 decimal digits.
    fn log_mean_oracle(a: f64, b: f64) -> f64 {
        let (a, b) = if a >= b { (a, b) } else { (b, a) };
        if a == b {
            return a;
        }
        let (big_a, big_b) = (fixed(a), fixed(b));
        let mut e = 0usize;
        while &big_b << (e + 1) <= big_a {
            e += 1;
        }
        let scaled_b = &big_b << e;
        let f = ((&big_a - &scaled_b) << BITS) / (&big_a + &scaled_b);
        let third = (BigInt::from(1) << BITS) / BigInt::from(3);
        let ln2 = atanh_fixed(&third) * 2;
        let ln = atanh_fixed(&f) * 2 + ln2 * BigInt::from(e);
        let l = ((big_a - big_b) << BITS) / ln;
        let hi: BigInt = &l >> BITS;
        let lo: BigInt = &l - (&hi << BITS);
        hi.to_f64().unwrap() + lo.to_f64().unwrap() * 2f64.powi(-(BITS as i32))
    }

    #[test]
    fn oracle_self_check() {
        assert!((log_mean_oracle(1.0, 2.0) - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((log_mean_oracle(1.0, std::f64::consts::E) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn log_mean_examples() {
        assert_eq!(log_mean(1.0, 1.0), 1.0);
        assert!((log_mean(1.0, 2.0) - 1.442_695_040_888_963_4).abs() < 1e-15);
        let b = 1.0 + 1e-13;
        let m = log_mean(1.0, b);
        assert!(m.is_finite() && (1.0..=b).contains(&m));
        assert!((m - log_mean_oracle(1.0, b)).abs() <= 1e-13 * m);
    }

    #[test]
    fn log_mean_matches_oracle_across_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..2000 {
            let a: f64 = 10f64.powf(rng.gen_range(-3.0..3.0));
            let ratio: f64 = 10f64.powf(rng.gen_range(-6.0..6.0));
            let b = a * ratio;
            let exact = log_mean_oracle(a, b);
            assert!((log_mean(a, b) - exact).abs() <= 1e-13 * exact, "{a} {b}");
        }
    }

    #[test]
    fn log_mean_continuous_at_switch() {
        // u = f^2 = 1e-2 at zeta = 11/9.
        let zeta_switch = 11.0 / 9.0;
        for k in -200..=200 {
            let zeta = zeta_switch * (1.0 + k as f64 * 1e-12);
            let exact = log_mean_oracle(1.0, zeta);
            assert!((log_mean(1.0, zeta) - exact).abs() <= 1e-13 * exact, "{zeta}");
            let exact = log_mean_oracle(zeta, 1.0);
            assert!((log_mean(zeta, 1.0) - exact).abs() <= 1e-13 * exact, "{zeta}");
        }
    }

    proptest! {
        #[test]
        fn log_mean_bounded_and_symmetric(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
            let m = log_mean(a, b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(m >= lo * (1.0 - 1e-15) && m <= hi * (1.0 + 1e-15));
            prop_assert!((m - log_mean(b, a)).abs() <= 1e-15 * m);
        }

        #[test]
        fn jump_rules_hold(al in -10f64..10.0, ar in -10f64..10.0, bl in -10f64..10.0, br in -10f64..10.0) {
            let res = jump_properties_check((al, ar), (bl, br));
            let scale = (al.abs() + ar.abs()) * (bl.abs() + br.abs()) + (al * al + ar * ar);
            prop_assert!(res.product.abs() <= 1e-14 * scale.max(1e-300));
            let scale_sq = al * al + ar * ar;
            prop_assert!(res.square.abs() <= 1e-14 * scale_sq.max(1e-300));
        }
    }

    #[test]
    fn jump_rules_hand_example() {
        let res = jump_properties_check((1.0, 3.0), (2.0, 4.0));
        assert_eq!(jump(2.0, 12.0), 10.0);
        assert_eq!(res.product, 0.0);
        let res = jump_properties_check((2.5, 2.5), (-1.0, -1.0));
        assert_eq!(res, JumpResiduals { product: 0.0, square: 0.0 });
    }

    #[test]
    fn equal_states_collapse() {
        let g = GasModel::new(5.0 / 3.0).unwrap();
        let w = PrimitiveState::new(1.3, [0.2, -0.7, 0.4], 0.9, [0.5, 1.1, -0.3]);
        let m = InterfaceMeans::new(&w, &w, g);
        assert_eq!(m.rho_jump, 0.0);
        assert_eq!(m.beta_jump, 0.0);
        assert_eq!(m.vel_jump, Vector3::zeros());
        assert_eq!(m.b_jump, Vector3::zeros());
        assert_eq!(m.rho_ln, w.rho);
        assert_eq!(m.rho_avg, w.rho);
        assert_eq!(m.beta_ln, w.beta());
        assert_eq!(m.vel_avg, w.vel);
        assert_eq!(m.b_avg, w.b);
        assert!((m.vel_sq_bar - w.vel.norm_squared()).abs() <= 1e-15);
        assert!((m.p_bar - w.p).abs() <= 1e-15);
        assert!((m.p_ln - w.p).abs() <= 1e-15);
        assert!((m.tau - w.p / w.rho).abs() <= 1e-15);
    }

    #[test]
    fn briowu_means() {
        let g = GasModel::new(2.0).unwrap();
        let l = PrimitiveState::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0]);
        let r = PrimitiveState::new(0.125, [0.0; 3], 0.1, [0.75, -1.0, 0.0]);
        let m = InterfaceMeans::new(&l, &r, g);
        assert_eq!(m.rho_avg, 0.5625);
        assert_eq!(m.rho_jump, -0.875);
        assert!((m.rho_ln - 0.875 / 8f64.ln()).abs() < 1e-15);
        assert!((m.rho_ln - 0.420_786).abs() < 1e-6);
    }

    #[test]
    fn means_symmetry() {
        let g = GasModel::new(1.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let (l, r) = (random_prim(&mut rng), random_prim(&mut rng));
            let a = InterfaceMeans::new(&l, &r, g);
            let b = InterfaceMeans::new(&r, &l, g);
            assert_eq!(a.rho_avg, b.rho_avg);
            assert_eq!(a.rho_jump, -b.rho_jump);
            assert!((a.rho_ln - b.rho_ln).abs() <= 1e-15 * a.rho_ln);
            assert!((a.beta_ln - b.beta_ln).abs() <= 1e-15 * a.beta_ln);
            assert_eq!(a.vel_avg, b.vel_avg);
            assert_eq!(a.b_jump, -b.b_jump);
            assert!(a.rho_ln >= l.rho.min(r.rho) && a.rho_ln <= l.rho.max(r.rho));
            for i in 0..3 {
                let (lo, hi) = (l.vel[i].min(r.vel[i]), l.vel[i].max(r.vel[i]));
                assert!(a.vel_avg[i] >= lo && a.vel_avg[i] <= hi);
            }
        }
    }
}
