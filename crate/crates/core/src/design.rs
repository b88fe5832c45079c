//! Thin hollow-shell particle: from material and trap specifications to
//! `q`, the energy scale `u2`, and the temperature window of the rotating
//! phase.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::thermo;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Headline window quoted for the reference particle, K.
pub const HEADLINE_WINDOW: (f64, f64) = (10e-3, 50e-3);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignInput {
    /// m
    pub radius: f64,
    /// m
    pub thickness: f64,
    /// kg/m³
    pub mass_density: f64,
    /// C/m²
    pub surface_charge_density: f64,
    /// T
    #[serde(rename = "B_Y")]
    pub b_y: f64,
    /// T
    #[serde(rename = "B_Z", default)]
    pub b_z: f64,
    /// Torsional trap frequency, rad/s.
    pub omega2: f64,
}

impl DesignInput {
    /// Hollow h-BN sphere: R = 1 μm, t = 10 nm, 2 g/cm³, 0.025 e/nm², 5 T,
    /// trap at 100 rad/s.
    pub fn reference() -> Self {
        Self {
            radius: 1e-6,
            thickness: 10e-9,
            mass_density: 2000.0,
            surface_charge_density: charge_density_from_e_per_nm2(0.025),
            b_y: 5.0,
            b_z: 0.0,
            omega2: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("radius", self.radius),
            ("thickness", self.thickness),
            ("mass_density", self.mass_density),
            ("surface_charge_density", self.surface_charge_density),
            ("B_Y", self.b_y),
            ("omega2", self.omega2),
        ] {
            crate::error::require_positive(name, v)?;
        }
        if !self.b_z.is_finite() {
            return Err(Error::InvalidParameter { name: "B_Z", reason: "must be finite".into() });
        }
        let limit = self.radius / 10.0;
        if self.thickness >= limit {
            return Err(Error::ThickShell { thickness: self.thickness, limit });
        }
        Ok(())
    }
}

pub fn charge_density_from_e_per_nm2(n: f64) -> f64 {
    n * ELEMENTARY_CHARGE * 1e18
}

/// Temperatures in K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureWindow {
    pub low: f64,
    pub high: f64,
}

impl TemperatureWindow {
    pub fn overlaps(&self, low: f64, high: f64) -> bool {
        self.low < high && low < self.high
    }
}

/// Trap-dependent part of the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapReading {
    pub omega2: f64,
    pub q: f64,
    pub u2_joule: f64,
    pub u2_kelvin: f64,
    /// `(u2/q², u2)`; `None` when `q ≤ 1`.
    pub window: Option<TemperatureWindow>,
    /// `(u2/q², u2/(4u* q²))` clipped to the window.
    pub fluct_window: Option<TemperatureWindow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignReport {
    pub input: DesignInput,
    pub mass: f64,
    pub charge: f64,
    /// C/kg
    pub charge_to_mass: f64,
    /// `B_Y (Q/M) / 2`, rad/s.
    pub omega0: f64,
    /// kg m²
    pub m3: f64,
    /// C m²
    pub e3: f64,
    /// Mean distance between elementary charges, m.
    pub charge_spacing: f64,
    pub u_star: f64,
    /// `omega2` read as rad/s.
    pub trap: TrapReading,
    /// `omega2` read as Hz, i.e. `2π·omega2` rad/s.
    pub trap_if_hz: TrapReading,
    pub headline_window: TemperatureWindow,
}

impl DesignReport {
    pub fn q(&self) -> f64 {
        self.trap.q
    }

    /// Shell parameters as a model: a sphere has `m1 = m3`, `e1 = e3`;
    /// the torsional stiffness is taken equal to `u2`.
    pub fn model_params(&self) -> Result<ModelParams> {
        let i = &self.input;
        ModelParams::new(self.m3, self.m3, self.e3, self.e3, self.trap.u2_joule, self.trap.u2_joule, i.b_y, i.b_z)
    }
}

fn reading(omega2: f64, omega0: f64, m3: f64, u_star: f64) -> TrapReading {
    let q = omega0 / omega2;
    let u2_joule = m3 * omega2 * omega2;
    let u2_kelvin = u2_joule / BOLTZMANN;
    let window = (q > 1.0).then(|| TemperatureWindow { low: u2_kelvin / (q * q), high: u2_kelvin });
    let fluct_window = window.map(|w| TemperatureWindow { low: w.low, high: (u2_kelvin / (4.0 * u_star * q * q)).min(w.high) });
    TrapReading { omega2, q, u2_joule, u2_kelvin, window, fluct_window }
}

pub fn design(input: &DesignInput) -> Result<DesignReport> {
    input.validate()?;
    let area = 4.0 * PI * input.radius * input.radius;
    let mass = area * input.mass_density * input.thickness;
    let charge = area * input.surface_charge_density;
    let m3 = 2.0 / 3.0 * mass * input.radius * input.radius;
    let e3 = 2.0 / 3.0 * charge * input.radius * input.radius;
    let charge_to_mass = input.surface_charge_density / (input.mass_density * input.thickness);
    let omega0 = 0.5 * input.b_y * charge_to_mass;
    let number_density = input.surface_charge_density / ELEMENTARY_CHARGE;
    let u_star = thermo::fluct_threshold()?;
    Ok(DesignReport {
        input: *input,
        mass,
        charge,
        charge_to_mass,
        omega0,
        m3,
        e3,
        charge_spacing: 1.0 / number_density.sqrt(),
        u_star,
        trap: reading(input.omega2, omega0, m3, u_star),
        trap_if_hz: reading(2.0 * PI * input.omega2, omega0, m3, u_star),
        headline_window: TemperatureWindow { low: HEADLINE_WINDOW.0, high: HEADLINE_WINDOW.1 },
    })
}
