//! The two-degree-of-freedom reduced rotor
//!
//! `H = p_x²/2m1 + (p_z - φ)² / 2(m3 + b²x²/u2) + u1 x²/2`
//!
//! with `x = β` the torsional coordinate and `z = α + γ` the spin angle.
//! `z` is cyclic, so `p_z = l` is conserved, and for `|l| > l_c` the
//! effective potential in `x` is a double well whose minima rotate at the
//! locked speed `sqrt(u1 u2)/b` regardless of `|l|`.

use crate::error::{Error, Result};
use crate::model::{DimlessParams, ModelParams};
use crate::ode::{self, OdeOptions, OdeStats};
use crate::quad::{self, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Validity threshold for the inverse-square form of the potential, `q² x±² > 10`.
pub const INVERSE_SQUARE_VALIDITY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedModel {
    pub m1: f64,
    pub m3: f64,
    pub b: f64,
    pub u1: f64,
    pub u2: f64,
    pub phi: f64,
}

impl From<&ModelParams> for ReducedModel {
    fn from(p: &ModelParams) -> Self {
        Self { m1: p.m1, m3: p.m3, b: p.b(), u1: p.u1, u2: p.u2, phi: p.phi() }
    }
}

impl From<&DimlessParams> for ReducedModel {
    fn from(p: &DimlessParams) -> Self {
        Self { m1: p.m1(), m3: 1.0, b: p.b(), u1: p.u1(), u2: 1.0, phi: p.phi() }
    }
}

impl ReducedModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m1", self.m1), ("m3", self.m3), ("b", self.b), ("u1", self.u1), ("u2", self.u2)] {
            crate::error::require_positive(name, v)?;
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter { name: "phi", reason: "must be finite".into() });
        }
        Ok(())
    }

    /// Same model with a different flux.
    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    /// `m3 + b² x² / u2`
    pub fn inertia(&self, x: f64) -> f64 {
        self.m3 + self.b * self.b * x * x / self.u2
    }

    pub fn l_c(&self) -> f64 {
        self.m3 * (self.u1 * self.u2).sqrt() / self.b
    }

    pub fn q(&self) -> f64 {
        self.b / (self.m3 * self.u2).sqrt()
    }

    pub fn omega1(&self) -> f64 {
        (self.u1 / self.m1).sqrt()
    }

    pub fn locked_speed(&self) -> f64 {
        (self.u1 * self.u2).sqrt() / self.b
    }

    pub fn hamiltonian(&self, s: &ReducedState) -> f64 {
        let l = s.p_z - self.phi;
        s.p_x * s.p_x / (2.0 * self.m1) + l * l / (2.0 * self.inertia(s.x)) + 0.5 * self.u1 * s.x * s.x
    }

    pub fn zdot(&self, s: &ReducedState) -> f64 {
        (s.p_z - self.phi) / self.inertia(s.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReducedState {
    pub t: f64,
    pub x: f64,
    pub p_x: f64,
    /// Unwrapped spin angle.
    pub z: f64,
    pub p_z: f64,
}

impl ReducedState {
    /// Builds the canonical state from velocities, so that runs with
    /// different flux but equal velocities start from the same motion.
    pub fn from_velocities(x: f64, xdot: f64, z: f64, zdot: f64, model: &ReducedModel) -> Self {
        Self { t: 0.0, x, p_x: model.m1 * xdot, z, p_z: model.inertia(x) * zdot + model.phi }
    }

    /// `z` reduced to `[0, 2π)` for display.
    pub fn wrapped_z(&self) -> f64 {
        wrap_angle(self.z)
    }
}

pub fn wrap_angle(z: f64) -> f64 {
    z.rem_euclid(2.0 * PI)
}

/// `V(x) = l² / 2(m3 + b²x²/u2) + u1 x²/2`. With flux, pass `l = p_z - φ`.
pub fn effective_potential(x: f64, l: f64, model: &ReducedModel) -> f64 {
    l * l / (2.0 * model.inertia(x)) + 0.5 * model.u1 * x * x
}

/// `dV/dx`
pub fn effective_force(x: f64, l: f64, model: &ReducedModel) -> f64 {
    let i = model.inertia(x);
    -l * l * model.b * model.b * x / (model.u2 * i * i) + model.u1 * x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WellShape {
    SingleWell,
    DoubleWell,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub l: f64,
    pub l_c: f64,
    pub classification: WellShape,
    pub x_plus: Option<f64>,
    pub x_minus: Option<f64>,
    pub v_min: f64,
    pub v_center: f64,
    pub barrier: f64,
    /// `q² x±² = (|l| - l_c)/l_c`; zero unless double well.
    pub q2_x2: f64,
}

impl PotentialProfile {
    /// Whether the inverse-square approximation of the well holds (`q² x±² > 10`).
    pub fn inverse_square_valid(&self) -> bool {
        self.q2_x2 > INVERSE_SQUARE_VALIDITY
    }
}

pub fn analyze_potential(l: f64, model: &ReducedModel) -> PotentialProfile {
    let lc = model.l_c();
    let al = l.abs();
    let v_center = l * l / (2.0 * model.m3);
    let classification = if (al - lc).abs() <= 1e-12 * lc {
        WellShape::Critical
    } else if al > lc {
        WellShape::DoubleWell
    } else {
        WellShape::SingleWell
    };
    match classification {
        WellShape::DoubleWell => {
            let excess = al - lc;
            let xp = (lc * excess / (model.m3 * model.u1)).sqrt();
            let barrier = excess * excess / (2.0 * model.m3);
            PotentialProfile {
                l,
                l_c: lc,
                classification,
                x_plus: Some(xp),
                x_minus: Some(-xp),
                v_min: (l * l - excess * excess) / (2.0 * model.m3),
                v_center,
                barrier,
                q2_x2: excess / lc,
            }
        }
        _ => PotentialProfile {
            l,
            l_c: lc,
            classification,
            x_plus: None,
            x_minus: None,
            v_min: v_center,
            v_center,
            barrier: 0.0,
            q2_x2: 0.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedOptions {
    pub tol: f64,
    pub samples: usize,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        Self { tol: 1e-10, samples: 2000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedTrajectory {
    pub samples: Vec<ReducedState>,
    pub energy: Vec<f64>,
    pub zdot: Vec<f64>,
    pub model: ReducedModel,
    #[serde(skip)]
    pub stats: OdeStats,
}

impl ReducedTrajectory {
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        let worst = self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
        if e0 == 0.0 {
            worst
        } else {
            worst / e0.abs()
        }
    }

    /// Mean of `ż` as `(z_end - z_0)/(t_end - t_0)`.
    pub fn mean_zdot(&self) -> f64 {
        let (a, b) = (self.samples.first().unwrap(), self.samples.last().unwrap());
        (b.z - a.z) / (b.t - a.t)
    }
}

/// Hamilton's equations for `(x, p_x, z)` at fixed `p_z`.
pub fn integrate_reduced(
    initial: &ReducedState,
    model: &ReducedModel,
    t_end: f64,
    options: &ReducedOptions,
) -> Result<ReducedTrajectory> {
    model.validate()?;
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter { name: "t_end", reason: format!("must be > 0, got {t_end}") });
    }
    let l = initial.p_z - model.phi;
    let m = *model;
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let x = y[0];
        let i = m.inertia(x);
        dy[0] = y[1] / m.m1;
        dy[1] = l * l * m.b * m.b * x / (m.u2 * i * i) - m.u1 * x;
        dy[2] = l / i;
    };
    // pull (x, p_x) back onto the energy surface along grad H after each step
    let h0 = model.hamiltonian(initial);
    let tol = options.tol;
    let project = move |y: &mut [f64]| {
        let s = ReducedState { x: y[0], p_x: y[1], p_z: l + m.phi, ..ReducedState::default() };
        let dh = m.hamiltonian(&s) - h0;
        if dh.abs() <= 4.0 * f64::EPSILON * h0.abs() {
            return false;
        }
        let gx = effective_force(y[0], l, &m);
        let gp = y[1] / m.m1;
        let g2 = gx * gx + gp * gp;
        // near a fixed point grad H vanishes and the step would blow up
        if dh.abs() > 100.0 * tol * g2.sqrt() * (1.0 + y[0].abs() + y[1].abs()) {
            return false;
        }
        y[0] -= dh * gx / g2;
        y[1] -= dh * gp / g2;
        true
    };
    let opts = OdeOptions::with_tol(options.tol);
    let (times, states, stats) = ode::integrate_uniform_projected(
        rhs,
        project,
        initial.t,
        &[initial.x, initial.p_x, initial.z],
        initial.t + t_end,
        options.samples,
        &opts,
    )?;
    let samples: Vec<ReducedState> = times
        .iter()
        .zip(&states)
        .map(|(t, y)| ReducedState { t: *t, x: y[0], p_x: y[1], z: y[2], p_z: initial.p_z })
        .collect();
    let energy = samples.iter().map(|s| model.hamiltonian(s)).collect();
    let zdot = samples.iter().map(|s| model.zdot(s)).collect();
    Ok(ReducedTrajectory { samples, energy, zdot, model: *model, stats })
}

/// Closed-form orbit of the inverse-square approximation
/// `V ≈ l² u2 / 2b²x² + u1 x²/2`:
///
/// `x(t) = u1^{-1/2} [E + sqrt(E² - V±²) sin(2ω1 (t - t0))]^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticOrbit {
    pub energy: f64,
    pub l: f64,
    /// Well minimum of the approximate potential, `|l| sqrt(u1 u2)/b`.
    pub v_min: f64,
    pub amplitude: f64,
    pub omega1: f64,
    pub t0: f64,
    pub u1: f64,
    /// `q² x±² > 10`
    pub valid: bool,
}

impl AnalyticOrbit {
    pub fn x_at(&self, t: f64) -> f64 {
        let w = self.energy + self.amplitude * (2.0 * self.omega1 * (t - self.t0)).sin();
        (w.max(0.0) / self.u1).sqrt()
    }

    /// Period of `x²`, `π/ω1`.
    pub fn period(&self) -> f64 {
        PI / self.omega1
    }
}

pub fn analytic_x(energy: f64, l: f64, model: &ReducedModel, t0: f64) -> Result<AnalyticOrbit> {
    let profile = analyze_potential(l, model);
    if profile.classification != WellShape::DoubleWell {
        return Err(Error::NoDoubleWell { l: l.abs(), lc: model.l_c() });
    }
    let v_min = l.abs() * (model.u1 * model.u2).sqrt() / model.b;
    if energy < v_min {
        return Err(Error::BelowWellMinimum { energy, minimum: v_min });
    }
    Ok(AnalyticOrbit {
        energy,
        l,
        v_min,
        amplitude: (energy * energy - v_min * v_min).max(0.0).sqrt(),
        omega1: model.omega1(),
        t0,
        u1: model.u1,
        valid: profile.inverse_square_valid(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodAverage {
    /// `sign(l) sqrt(u1 u2)/b`
    pub closed_form: f64,
    /// Quadrature of `ż(t)` along the analytic orbit over one period.
    pub numeric: f64,
    pub quad_error: f64,
}

/// Angular velocity averaged over one period of the analytic orbit.
pub fn period_avg_zdot(l: f64, energy: f64, model: &ReducedModel) -> Result<PeriodAverage> {
    let orbit = analytic_x(energy, l, model, 0.0)?;
    let w1 = orbit.omega1;
    let coef = l * model.u1 * model.u2 / (model.b * model.b);
    let r = quad::integrate(
        |t| coef / (orbit.energy + orbit.amplitude * (2.0 * w1 * t).sin()),
        0.0,
        PI / w1,
        Tolerance::new(1e-12, 1e-13),
    )?;
    Ok(PeriodAverage {
        closed_form: l.signum() * model.locked_speed(),
        numeric: w1 / PI * r.value,
        quad_error: w1 / PI * r.error,
    })
}

/// Energy in the massless limit, `½ x² (u1 + b² ż² / u2)`.
pub fn massless_energy(x: f64, zdot: f64, model: &ReducedModel) -> f64 {
    0.5 * x * x * (model.u1 + model.b * model.b * zdot * zdot / model.u2)
}
