//! Special functions needed by the quantum and thermal modules.

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A function value together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub est_error: f64,
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Generalized Laguerre polynomial `L_n^alpha(x)` by three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(u: f64) -> Result<SpecialValue> {
    let scaled = bessel_k0_scaled(u)?;
    let e = (-u).exp();
    Ok(SpecialValue { value: scaled.value * e, est_error: scaled.est_error * e })
}

/// `exp(u) K0(u)`, finite for large `u`.
pub fn bessel_k0_scaled(u: f64) -> Result<SpecialValue> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain { function: "bessel_k0", arg: u, reason: "requires u > 0" });
    }
    if u <= 2.0 {
        let (k0, err) = k0_series(u);
        let e = u.exp();
        Ok(SpecialValue { value: k0 * e, est_error: err * e })
    } else {
        let v = k0_scaled_cf2(u);
        Ok(SpecialValue { value: v, est_error: 16.0 * f64::EPSILON * v })
    }
}

// K0 = -(ln(u/2) + γ) I0 + Σ_{k≥1} (u²/4)^k / (k!)² H_k
fn k0_series(u: f64) -> (f64, f64) {
    let y = 0.25 * u * u;
    let lead = -((0.5 * u).ln() + EULER_GAMMA);
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut abs_sum = lead.abs();
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        abs_sum += term * (lead.abs() + harmonic);
        if term * (1.0 + harmonic) < 1e-17 * (lead * i0 + tail).abs() {
            break;
        }
    }
    let value = lead * i0 + tail;
    (value, 8.0 * f64::EPSILON * abs_sum)
}

// Steed's continued fraction (Temme's CF2) for order zero, without the exp(-u) factor.
fn k0_scaled_cf2(u: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + u);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    (PI / (2.0 * u)).sqrt() / s
}

/// Tricomi's confluent hypergeometric function `U(-1/2, 0, z)`.
///
/// Seeds `U(1/2, 0, z)` and `U(3/2, 0, z)` from their Laplace-type integrals
/// and steps down once with the contiguous relation
/// `U(a-1, b, z) = (2a - b + z) U(a, b, z) - a (a - b + 1) U(a+1, b, z)`.
pub fn kummer_u_mhalf(z: f64) -> Result<SpecialValue> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain { function: "kummer_u_mhalf", arg: z, reason: "requires z > 0" });
    }
    let (u_half, e_half) = u_seed(0.5, z)?;
    let (u_three_half, e_three_half) = u_seed(1.5, z)?;
    let value = (1.0 + z) * u_half - 0.75 * u_three_half;
    let est_error = (1.0 + z) * e_half + 0.75 * e_three_half + 4.0 * f64::EPSILON * value.abs();
    Ok(SpecialValue { value, est_error })
}

// U(a, 0, z) = Γ(a)⁻¹ ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{-a-1} dt with t = s²
fn u_seed(a: f64, z: f64) -> Result<(f64, f64)> {
    let integrand = |s: f64| {
        let s2 = s * s;
        2.0 * (-z * s2).exp() * s.powf(2.0 * a - 1.0) * (1.0 + s2).powf(-a - 1.0)
    };
    let r = quad::integrate_to_infinity(integrand, 0.0, Tolerance::new(1e-15, 1e-14))?;
    let g = gamma(a);
    Ok((r.value / g, r.error / g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_to_infinity;

    #[test]
    fn laguerre_low_orders() {
        for &(a, x) in &[(0.0, 0.3), (1.5, 2.0), (-0.5, 4.0)] {
            assert_eq!(laguerre(0, a, x), 1.0);
            assert!((laguerre(1, a, x) - (1.0 + a - x)).abs() < 1e-15);
            let l2 = 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0));
            assert!((laguerre(2, a, x) - l2).abs() < 1e-13);
        }
    }

    #[test]
    fn k0_against_cosh_integral() {
        for &u in &[0.1, 0.5, 1.0, 1.99, 2.01, 3.0, 7.5, 20.0] {
            let oracle = integrate_to_infinity(|t: f64| (-u * t.cosh()).exp(), 0.0, Tolerance::new(1e-16, 1e-14))
                .unwrap()
                .value;
            let k = bessel_k0(u).unwrap();
            assert!((k.value - oracle).abs() <= 1e-12 * oracle, "u={u}: {} vs {oracle}", k.value);
            assert!(k.est_error >= 0.0 && k.est_error <= 1e-10 * k.value.abs().max(1.0));
        }
    }

    #[test]
    fn k0_domain() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
        assert!(kummer_u_mhalf(0.0).is_err());
    }

    #[test]
    fn k0_small_argument_limit() {
        let u = 1e-6;
        let k = bessel_k0(u).unwrap().value;
        assert!((k + (u / 2.0).ln() + EULER_GAMMA).abs() < 1e-6);
    }

    #[test]
    fn k0_large_argument_limit() {
        let u = 50.0;
        let k = bessel_k0(u).unwrap().value;
        let asym = (PI / (2.0 * u)).sqrt() * (-u).exp();
        assert!((k / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn kummer_limits() {
        let small = kummer_u_mhalf(1e-9).unwrap().value;
        assert!((small - 1.0 / PI.sqrt()).abs() < 1e-6, "{small}");
        let z = 2.0e4;
        let big = kummer_u_mhalf(z).unwrap().value;
        assert!((big / z.sqrt() - 1.0).abs() < 1e-4, "{}", big / z.sqrt());
    }
}
