//! The full rotor in ZY′Z″ Euler angles `(α, β, γ)`, in dimensionless units,
//! with trap potential `-η² cos β - cos α`, the magnetic terms of a field
//! `(0, B_Y, B_Z)` and optional linear damping on all three angles.
//!
//! The Lagrangian is `½ q̇ᵀ M(β) q̇ + A(α, β)·q̇ - U(α, β)` with
//!
//! ```text
//! M = [[μ sin²β + cos²β, 0, cos β], [0, μ, 0], [cos β, 0, 1]]
//! A = q/2 [(1-ν) sin α sin 2β, 2ν cos α, 2 sin α sin β]
//!   + a q [ν sin²β + cos²β, 0, cos β]
//! ```
//!
//! `det M = μ² sin²β` vanishes at `β = 0`; near it the mass matrix is
//! solved with Tikhonov regularization and the sample is flagged.

use crate::error::{Error, Result};
use crate::model::DimlessParams;
use crate::ode::{self, OdeOptions, OdeStats};
use serde::{Deserialize, Serialize};
use std::cell::Cell;

/// Below this `|sin β|` the mass matrix is regularized.
pub const BETA_MIN: f64 = 1e-4;
pub const TIKHONOV_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FullState {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub gamma_dot: f64,
}

impl FullState {
    pub fn at_rest() -> Self {
        Self::default()
    }

    /// `ż = α̇ + γ̇`
    pub fn zdot(&self) -> f64 {
        self.alpha_dot + self.gamma_dot
    }

    fn to_vec(self) -> [f64; 6] {
        [self.alpha, self.beta, self.gamma, self.alpha_dot, self.beta_dot, self.gamma_dot]
    }

    fn from_slice(t: f64, y: &[f64]) -> Self {
        Self { t, alpha: y[0], beta: y[1], gamma: y[2], alpha_dot: y[3], beta_dot: y[4], gamma_dot: y[5] }
    }

    fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_finite()) && self.t.is_finite()
    }
}

/// Time derivative of a [`FullState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullRate {
    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub gamma_dot: f64,
    pub alpha_ddot: f64,
    pub beta_ddot: f64,
    pub gamma_ddot: f64,
    /// Mass matrix was regularized.
    pub gimbal: bool,
}

impl FullRate {
    pub fn accelerations(&self) -> [f64; 3] {
        [self.alpha_ddot, self.beta_ddot, self.gamma_ddot]
    }
}

pub fn full_eom(state: &FullState, params: &DimlessParams, damping: f64) -> Result<FullRate> {
    if !(damping >= 0.0) {
        return Err(Error::InvalidParameter { name: "gamma_d", reason: format!("must be >= 0, got {damping}") });
    }
    let mut out = [0.0; 6];
    let gimbal = rhs(params, damping, &state.to_vec(), &mut out);
    Ok(FullRate {
        alpha_dot: out[0],
        beta_dot: out[1],
        gamma_dot: out[2],
        alpha_ddot: out[3],
        beta_ddot: out[4],
        gamma_ddot: out[5],
        gimbal,
    })
}

fn rhs(p: &DimlessParams, damping: f64, y: &[f64], dy: &mut [f64]) -> bool {
    let (al, be) = (y[0], y[1]);
    let (ad, bd, gd) = (y[3], y[4], y[5]);
    let (sa, ca) = al.sin_cos();
    let (sb, cb) = be.sin_cos();
    let (s2b, c2b) = (2.0 * be).sin_cos();
    let (mu, nu, q, a) = (p.mu, p.nu, p.q, p.a);

    // antisymmetric field tensor F_kj = ∂_k A_j - ∂_j A_k
    let f_ab = -q * nu * sa - q * (1.0 - nu) * sa * c2b - a * q * (nu - 1.0) * s2b;
    let f_ag = q * ca * sb;
    let f_bg = q * sa * cb - a * q * sb;

    let f_alpha = -(2.0 * (mu - 1.0) * sb * cb * ad - sb * gd) * bd + f_ab * bd + f_ag * gd - sa - damping * ad;
    let f_beta = (mu - 1.0) * sb * cb * ad * ad - sb * ad * gd - f_ab * ad + f_bg * gd - p.eta * p.eta * sb - damping * bd;
    let f_gamma = sb * ad * bd - f_ag * ad - f_bg * bd - damping * gd;

    let m_aa = mu * sb * sb + cb * cb;
    let m_ag = cb;
    let gimbal = sb.abs() < BETA_MIN;
    let (acc_a, acc_g) = if gimbal {
        // (M² + εI) x = M f on the (α, γ) block
        let n11 = m_aa * m_aa + m_ag * m_ag + TIKHONOV_EPS;
        let n12 = m_aa * m_ag + m_ag;
        let n22 = m_ag * m_ag + 1.0 + TIKHONOV_EPS;
        let r1 = m_aa * f_alpha + m_ag * f_gamma;
        let r2 = m_ag * f_alpha + f_gamma;
        let det = n11 * n22 - n12 * n12;
        ((n22 * r1 - n12 * r2) / det, (n11 * r2 - n12 * r1) / det)
    } else {
        let det = m_aa - m_ag * m_ag;
        ((f_alpha - m_ag * f_gamma) / det, (m_aa * f_gamma - m_ag * f_alpha) / det)
    };

    dy[0] = ad;
    dy[1] = bd;
    dy[2] = gd;
    dy[3] = acc_a;
    dy[4] = f_beta / mu;
    dy[5] = acc_g;
    gimbal
}

/// The dimensionless Lagrangian, written out term by term.
pub fn lagrangian(s: &FullState, p: &DimlessParams) -> f64 {
    let (sa, ca) = s.alpha.sin_cos();
    let (sb, cb) = s.beta.sin_cos();
    let (ad, bd, gd) = (s.alpha_dot, s.beta_dot, s.gamma_dot);
    let kinetic = 0.5 * p.mu * (ad * ad * sb * sb + bd * bd) + 0.5 * (ad * cb + gd).powi(2);
    let magnetic = 0.5 * p.q * ((1.0 - p.nu) * ad * sa * (2.0 * s.beta).sin() + 2.0 * p.nu * bd * ca + 2.0 * gd * sa * sb)
        + p.a * p.q * ((p.nu * sb * sb + cb * cb) * ad + gd * cb);
    kinetic + magnetic + p.eta * p.eta * cb + ca
}

/// Jacobi energy `Σ q̇ ∂L/∂q̇ - L`, with the potential shifted to vanish at
/// `α = β = 0`. Velocity-linear magnetic terms drop out.
pub fn jacobi_energy(s: &FullState, p: &DimlessParams) -> f64 {
    let (sb, cb) = s.beta.sin_cos();
    let kinetic = 0.5 * p.mu * (s.alpha_dot.powi(2) * sb * sb + s.beta_dot.powi(2))
        + 0.5 * (s.alpha_dot * cb + s.gamma_dot).powi(2);
    kinetic + p.eta * p.eta * (1.0 - cb) + (1.0 - s.alpha.cos())
}

/// Canonical momentum conjugate to the cyclic angle γ.
pub fn p_gamma(s: &FullState, p: &DimlessParams) -> f64 {
    let (sb, cb) = s.beta.sin_cos();
    s.alpha_dot * cb + s.gamma_dot + p.q * s.alpha.sin() * sb + p.a * p.q * cb
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullOptions {
    /// Absolute and relative tolerance.
    pub tol: f64,
    /// Number of uniform output intervals.
    pub samples: usize,
}

impl Default for FullOptions {
    fn default() -> Self {
        Self { tol: 1e-10, samples: 2000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FullTrajectory {
    pub samples: Vec<FullState>,
    pub energy: Vec<f64>,
    pub p_gamma: Vec<f64>,
    pub gimbal: Vec<bool>,
    pub params: DimlessParams,
    pub damping: f64,
    pub options: FullOptions,
    /// Right-hand-side evaluations that needed regularization.
    pub regularized_evaluations: usize,
    #[serde(skip)]
    pub stats: OdeStats,
}

impl FullTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &FullState {
        self.samples.last().expect("trajectories are never empty")
    }

    /// `max |h - h0| / |h0|`
    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }

    pub fn p_gamma_drift(&self) -> f64 {
        relative_drift(&self.p_gamma)
    }
}

fn relative_drift(series: &[f64]) -> f64 {
    let first = series[0];
    let worst = series.iter().map(|v| (v - first).abs()).fold(0.0, f64::max);
    if first == 0.0 {
        worst
    } else {
        worst / first.abs()
    }
}

/// Integrates from `initial.t` to `initial.t + t_end`.
pub fn integrate_full(
    initial: &FullState,
    params: &DimlessParams,
    damping: f64,
    t_end: f64,
    options: &FullOptions,
) -> Result<FullTrajectory> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter { name: "t_end", reason: format!("must be > 0, got {t_end}") });
    }
    integrate_span(initial, params, damping, initial.t + t_end, options)
}

/// Like [`integrate_full`] but to an absolute end time, which may lie in
/// the past (backward integration).
pub fn integrate_span(
    initial: &FullState,
    params: &DimlessParams,
    damping: f64,
    t_final: f64,
    options: &FullOptions,
) -> Result<FullTrajectory> {
    params.validate()?;
    if !(damping >= 0.0) {
        return Err(Error::InvalidParameter { name: "gamma_d", reason: format!("must be >= 0, got {damping}") });
    }
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be > 0, got {}", options.tol) });
    }
    if !initial.is_finite() {
        return Err(Error::InvalidParameter { name: "initial", reason: "non-finite state".into() });
    }
    let regularized = Cell::new(0usize);
    let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
        if rhs(params, damping, y, dy) {
            regularized.set(regularized.get() + 1);
        }
    };
    let opts = OdeOptions::with_tol(options.tol);
    let (times, states, stats) =
        ode::integrate_uniform(f, initial.t, &initial.to_vec(), t_final, options.samples, &opts)?;
    let samples: Vec<FullState> = times.iter().zip(&states).map(|(t, y)| FullState::from_slice(*t, y)).collect();
    let energy = samples.iter().map(|s| jacobi_energy(s, params)).collect();
    let p_gamma = samples.iter().map(|s| p_gamma(s, params)).collect();
    let gimbal = samples.iter().map(|s| s.beta.sin().abs() < BETA_MIN).collect();
    Ok(FullTrajectory {
        samples,
        energy,
        p_gamma,
        gimbal,
        params: *params,
        damping,
        options: *options,
        regularized_evaluations: regularized.get(),
        stats,
    })
}

/// `ż = α̇ + γ̇` on the trajectory's sampling grid.
pub fn zdot_series(traj: &FullTrajectory) -> Vec<f64> {
    traj.samples.iter().map(FullState::zdot).collect()
}

/// Initial state of the undamped locked-rotation run: `α = β = 0.1`, `γ̇ = 1/q`.
pub fn locked_rotation_initial(q: f64, spin_multiple: f64) -> FullState {
    FullState { alpha: 0.1, beta: 0.1, gamma_dot: spin_multiple / q, ..FullState::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> DimlessParams {
        DimlessParams::symmetric(10.0).unwrap()
    }

    #[test]
    fn equilibrium_has_zero_acceleration() {
        let r = full_eom(&FullState::at_rest(), &fig3(), 0.0).unwrap();
        assert_eq!(r.accelerations(), [0.0; 3]);
        assert!(r.gimbal);
    }

    #[test]
    fn negative_damping_rejected() {
        assert!(full_eom(&FullState::at_rest(), &fig3(), -0.1).is_err());
    }

    #[test]
    fn resting_trajectory_stays_constant() {
        let t = integrate_full(&FullState::at_rest(), &fig3(), 0.0, 10.0, &FullOptions { tol: 1e-10, samples: 50 }).unwrap();
        assert!(t.samples.iter().all(|s| s.to_vec() == [0.0; 6]));
        assert!(zdot_series(&t).iter().all(|z| *z == 0.0));
    }

    #[test]
    fn determinant_vanishes_with_sin_beta() {
        let p = DimlessParams::new(1.7, 1.0, 1.0, 10.0, 0.0).unwrap();
        for beta in [0.3, 0.01, 1e-3] {
            let (sb, cb) = f64::sin_cos(beta);
            let det = p.mu * ((p.mu * sb * sb + cb * cb) - cb * cb);
            assert!((det - p.mu * p.mu * sb * sb).abs() < 1e-15);
        }
    }

    #[test]
    fn gimbal_regularization_is_finite() {
        let s = FullState { beta: 1e-7, alpha: 0.01, gamma_dot: 0.3, alpha_dot: 0.1, ..FullState::default() };
        let r = full_eom(&s, &fig3(), 0.0).unwrap();
        assert!(r.gimbal);
        assert!(r.accelerations().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn beta_pendulum_frequency() {
        // α = γ̇ = 0 decouples β into a pendulum of frequency η/√μ;
        // the tolerance covers the anharmonic phase drift A³ωt/16
        let p = DimlessParams::new(2.0, 0.5, 1.5, 10.0, 0.0).unwrap();
        let s0 = FullState { beta: 1e-3, ..FullState::default() };
        let omega = p.eta / p.mu.sqrt();
        let t = integrate_full(&s0, &p, 0.0, 20.0, &FullOptions { tol: 1e-11, samples: 400 }).unwrap();
        for s in &t.samples {
            assert!((s.beta - 1e-3 * (omega * s.t).cos()).abs() < 3e-9);
            assert_eq!(s.alpha, 0.0);
        }
    }

    #[test]
    fn cyclic_momentum_and_energy_conserved() {
        let p = DimlessParams::new(1.0, 0.8, 1.0, 10.0, 0.2).unwrap();
        let t = integrate_full(&locked_rotation_initial(10.0, 1.0), &p, 0.0, 60.0, &FullOptions { tol: 1e-10, samples: 600 })
            .unwrap();
        assert!(t.energy_drift() < 1e-6, "{}", t.energy_drift());
        assert!(t.p_gamma_drift() < 1e-6, "{}", t.p_gamma_drift());
    }

    #[test]
    fn damping_dissipates_energy() {
        let p = fig3();
        let t = integrate_full(&locked_rotation_initial(10.0, 3.0), &p, 0.05, 40.0, &FullOptions { tol: 1e-9, samples: 200 })
            .unwrap();
        assert!(t.energy.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = FullState::at_rest();
        assert!(integrate_full(&s, &fig3(), 0.0, 0.0, &FullOptions::default()).is_err());
        assert!(integrate_full(&s, &fig3(), 0.0, 1.0, &FullOptions { tol: 0.0, samples: 10 }).is_err());
    }

    /// `∂L/∂q̇` and `∂L/∂q` by central differences. L is quadratic in the
    /// velocities, so a wide velocity step is exact up to rounding.
    fn lagrangian_gradients(s: &FullState, p: &DimlessParams) -> ([f64; 3], [f64; 3]) {
        let y = s.to_vec();
        let l_at = |i: usize, h: f64| {
            let mut z = y;
            z[i] += h;
            lagrangian(&FullState::from_slice(0.0, &z), p)
        };
        let mut dq = [0.0; 3];
        let mut dv = [0.0; 3];
        for i in 0..3 {
            let h = 1e-3;
            dq[i] = (8.0 * (l_at(i, h) - l_at(i, -h)) - (l_at(i, 2.0 * h) - l_at(i, -2.0 * h))) / (12.0 * h);
            dv[i] = (l_at(i + 3, 0.1) - l_at(i + 3, -0.1)) / 0.2;
        }
        (dv, dq)
    }

    #[test]
    fn euler_lagrange_residual() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = DimlessParams::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..1.5), rng.gen_range(0.5..2.0), 10.0, rng.gen_range(-0.5..0.5))
                .unwrap();
            let s = FullState {
                t: 0.0,
                alpha: rng.gen_range(-1.0..1.0),
                beta: rng.gen_range(0.3..1.2),
                gamma: rng.gen_range(-1.0..1.0),
                alpha_dot: rng.gen_range(-1.0..1.0),
                beta_dot: rng.gen_range(-1.0..1.0),
                gamma_dot: rng.gen_range(-1.0..1.0),
            };
            let r = full_eom(&s, &p, 0.0).unwrap();
            let acc = r.accelerations();
            // d/dt ∂L/∂q̇ is the directional derivative along (q̇, q̈)
            let shifted = |d: f64| {
                let mut z = s.to_vec();
                for i in 0..3 {
                    z[i] += d * z[i + 3];
                }
                for i in 0..3 {
                    z[i + 3] += d * acc[i];
                }
                lagrangian_gradients(&FullState::from_slice(0.0, &z), &p).0
            };
            let d = 1e-3;
            let (pp, pm, pp2, pm2) = (shifted(d), shifted(-d), shifted(2.0 * d), shifted(-2.0 * d));
            let (_, dq) = lagrangian_gradients(&s, &p);
            for i in 0..3 {
                let dpdt = (8.0 * (pp[i] - pm[i]) - (pp2[i] - pm2[i])) / (12.0 * d);
                assert!((dpdt - dq[i]).abs() < 1e-8, "component {i}: {}", dpdt - dq[i]);
            }
        }
    }

    #[test]
    fn time_reversal() {
        let p = fig3();
        let opts = FullOptions { tol: 1e-10, samples: 10 };
        let s0 = locked_rotation_initial(10.0, 1.0);
        let fwd = integrate_full(&s0, &p, 0.0, 20.0, &opts).unwrap();
        let back = integrate_span(fwd.last(), &p, 0.0, 0.0, &opts).unwrap();
        let (a, b) = (s0.to_vec(), back.last().to_vec());
        for i in 0..6 {
            assert!((a[i] - b[i]).abs() < 100.0 * opts.tol, "{i}: {}", a[i] - b[i]);
        }
    }
}
