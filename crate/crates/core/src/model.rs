//! Parameter types, unit conventions and rigid-body tensors.
//!
//! Dimensionful quantities are SI. The dimensionless convention measures
//! energy in `u2` and time in `1/ω2`, so `m3 = u2 = 1`, `b = q`, `m1 = μ`
//! and the torsional stiffness is `u1 = η²`.

use crate::error::{require_positive, Error, Result};
use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMass {
    pub mass: f64,
    pub position: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointCharge {
    pub charge: f64,
    pub position: Vec3,
}

/// Thin hollow spherical shell centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellSpec {
    /// m
    pub radius: f64,
    /// m
    pub thickness: f64,
    /// kg/m³
    pub mass_density: f64,
    /// C/m²
    pub surface_charge_density: f64,
}

impl ShellSpec {
    /// Points used when the shell is discretized for tensor sums.
    pub const SAMPLES: usize = 4096;

    pub fn area(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.radius * self.radius
    }

    pub fn mass(&self) -> f64 {
        self.area() * self.mass_density * self.thickness
    }

    pub fn charge(&self) -> f64 {
        self.area() * self.surface_charge_density
    }

    /// Fibonacci-lattice points on the sphere, each carrying `1/n` of the shell.
    pub fn lattice(&self, n: usize) -> Vec<Vec3> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * i as f64;
                [self.radius * r * phi.cos(), self.radius * r * phi.sin(), self.radius * z]
            })
            .collect()
    }
}

/// A rigid body as point masses and point charges, optionally plus a shell.
///
/// Positions are stored relative to the centre of mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBody", into = "RawBody")]
pub struct BodySpec {
    point_masses: Vec<PointMass>,
    point_charges: Vec<PointCharge>,
    shell: Option<ShellSpec>,
    shell_center: Vec3,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    #[serde(default)]
    point_masses: Vec<PointMass>,
    #[serde(default)]
    point_charges: Vec<PointCharge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shell: Option<ShellSpec>,
}

impl TryFrom<RawBody> for BodySpec {
    type Error = Error;

    fn try_from(raw: RawBody) -> Result<Self> {
        BodySpec::new(raw.point_masses, raw.point_charges, raw.shell)
    }
}

impl From<BodySpec> for RawBody {
    fn from(b: BodySpec) -> Self {
        // serialize in the recentred frame, with the shell re-expressed as points if displaced
        let mut point_masses = b.point_masses;
        let mut point_charges = b.point_charges;
        let shell = match b.shell {
            Some(s) if b.shell_center != [0.0; 3] => {
                let n = ShellSpec::SAMPLES;
                for r in s.lattice(n) {
                    let p = [r[0] + b.shell_center[0], r[1] + b.shell_center[1], r[2] + b.shell_center[2]];
                    point_masses.push(PointMass { mass: s.mass() / n as f64, position: p });
                    point_charges.push(PointCharge { charge: s.charge() / n as f64, position: p });
                }
                None
            }
            other => other,
        };
        RawBody { point_masses, point_charges, shell }
    }
}

impl BodySpec {
    pub fn new(point_masses: Vec<PointMass>, point_charges: Vec<PointCharge>, shell: Option<ShellSpec>) -> Result<Self> {
        if point_masses.is_empty() && shell.is_none() {
            return Err(Error::DegenerateBody("no point masses and no shell".into()));
        }
        for (i, p) in point_masses.iter().enumerate() {
            if !(p.mass >= 0.0) || p.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::DegenerateBody(format!("point mass {i} is negative or non-finite")));
            }
        }
        if let Some(s) = &shell {
            require_positive("shell.radius", s.radius)?;
            require_positive("shell.thickness", s.thickness)?;
            require_positive("shell.mass_density", s.mass_density)?;
        }
        let shell_mass = shell.map_or(0.0, |s| s.mass());
        let total: f64 = point_masses.iter().map(|p| p.mass).sum::<f64>() + shell_mass;
        if !(total > 0.0) {
            return Err(Error::DegenerateBody("total mass is zero".into()));
        }
        // the shell is centred on the input origin, so it only enters through the total mass
        let mut com = [0.0; 3];
        for p in &point_masses {
            for k in 0..3 {
                com[k] += p.mass * p.position[k] / total;
            }
        }
        let shift = |r: Vec3| [r[0] - com[0], r[1] - com[1], r[2] - com[2]];
        let point_masses = point_masses.into_iter().map(|p| PointMass { position: shift(p.position), ..p }).collect();
        let point_charges = point_charges.into_iter().map(|c| PointCharge { position: shift(c.position), ..c }).collect();
        let shell_center = shift([0.0; 3]);
        Ok(Self { point_masses, point_charges, shell, shell_center })
    }

    pub fn from_points(point_masses: Vec<PointMass>, point_charges: Vec<PointCharge>) -> Result<Self> {
        Self::new(point_masses, point_charges, None)
    }

    pub fn point_masses(&self) -> &[PointMass] {
        &self.point_masses
    }

    pub fn point_charges(&self) -> &[PointCharge] {
        &self.point_charges
    }

    pub fn shell(&self) -> Option<&ShellSpec> {
        self.shell.as_ref()
    }

    /// Shell centre in the centre-of-mass frame.
    pub fn shell_center(&self) -> Vec3 {
        self.shell_center
    }

    pub fn total_mass(&self) -> f64 {
        self.point_masses.iter().map(|p| p.mass).sum::<f64>() + self.shell.map_or(0.0, |s| s.mass())
    }

    pub fn total_charge(&self) -> f64 {
        self.point_charges.iter().map(|p| p.charge).sum::<f64>() + self.shell.map_or(0.0, |s| s.charge())
    }
}

fn accumulate(t: &mut Mat3, weight: f64, r: &Vec3) {
    let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { r2 } else { 0.0 };
            t[i][j] += weight * (delta - r[i] * r[j]);
        }
    }
}

/// Mass and charge second-moment tensors `Σ w (r² δ_ij - r_i r_j)`.
///
/// A shell, if present, is discretized on [`ShellSpec::SAMPLES`] lattice points.
pub fn body_tensors(body: &BodySpec) -> Result<(Mat3, Mat3)> {
    if body.point_masses.is_empty() && body.shell.is_none() {
        return Err(Error::DegenerateBody("empty mass list".into()));
    }
    let mut m = [[0.0; 3]; 3];
    let mut e = [[0.0; 3]; 3];
    for p in &body.point_masses {
        accumulate(&mut m, p.mass, &p.position);
    }
    for c in &body.point_charges {
        accumulate(&mut e, c.charge, &c.position);
    }
    if let Some(shell) = &body.shell {
        let n = ShellSpec::SAMPLES;
        let (dm, dq) = (shell.mass() / n as f64, shell.charge() / n as f64);
        let c = body.shell_center;
        for r in shell.lattice(n) {
            let r = [r[0] + c[0], r[1] + c[1], r[2] + c[2]];
            accumulate(&mut m, dm, &r);
            accumulate(&mut e, dq, &r);
        }
    }
    Ok((m, e))
}

/// Dimensionful model parameters (SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Transverse moment of inertia, kg·m².
    pub m1: f64,
    /// Spin-axis moment of inertia, kg·m².
    pub m3: f64,
    /// Charge quadrupole moments, C·m².
    pub e1: f64,
    pub e3: f64,
    /// Trap stiffness for β and α, J.
    pub u1: f64,
    pub u2: f64,
    /// Magnetic field components, T.
    pub b_y: f64,
    pub b_z: f64,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(m1: f64, m3: f64, e1: f64, e3: f64, u1: f64, u2: f64, b_y: f64, b_z: f64) -> Result<Self> {
        let p = Self { m1, m3, e1, e3, u1, u2, b_y, b_z };
        p.validate()?;
        Ok(p)
    }

    /// Reads `m1` (mean of the two transverse diagonal entries), `m3`,
    /// `e1`, `e3` from the body tensors.
    pub fn from_body(body: &BodySpec, u1: f64, u2: f64, b_y: f64, b_z: f64) -> Result<Self> {
        let (m, e) = body_tensors(body)?;
        Self::new(
            0.5 * (m[0][0] + m[1][1]),
            m[2][2],
            0.5 * (e[0][0] + e[1][1]),
            e[2][2],
            u1,
            u2,
            b_y,
            b_z,
        )
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("m1", self.m1)?;
        require_positive("m3", self.m3)?;
        if self.u1 == 0.0 {
            return Err(Error::UntrappedTorsion);
        }
        require_positive("u1", self.u1)?;
        require_positive("u2", self.u2)?;
        require_positive("B_Y", self.b_y)?;
        if !self.e1.is_finite() || !self.b_z.is_finite() {
            return Err(Error::InvalidParameter { name: "e1/B_Z", reason: "must be finite".into() });
        }
        if !(self.b() > 0.0) {
            return Err(Error::InvalidParameter {
                name: "e3",
                reason: format!("b = B_Y e3 / 2 must be positive, got {}", self.b()),
            });
        }
        Ok(())
    }

    /// Magnetic coupling `b = B_Y e3 / 2`.
    pub fn b(&self) -> f64 {
        0.5 * self.b_y * self.e3
    }

    /// Flux `φ = B_Z e3 / 2`.
    pub fn phi(&self) -> f64 {
        0.5 * self.b_z * self.e3
    }

    pub fn omega1(&self) -> f64 {
        (self.u1 / self.m1).sqrt()
    }

    pub fn omega2(&self) -> f64 {
        (self.u2 / self.m3).sqrt()
    }

    /// Intrinsic frequency `ω0 = b / m3`.
    pub fn omega0(&self) -> f64 {
        self.b() / self.m3
    }

    /// Quality factor `q = b / sqrt(m3 u2)`.
    pub fn q(&self) -> f64 {
        self.b() / (self.m3 * self.u2).sqrt()
    }

    /// Critical angular momentum `l_c = m3 sqrt(u1 u2) / b`.
    pub fn l_c(&self) -> f64 {
        self.m3 * (self.u1 * self.u2).sqrt() / self.b()
    }

    /// Locked rotation speed `sqrt(u1 u2) / b`.
    pub fn locked_speed(&self) -> f64 {
        (self.u1 * self.u2).sqrt() / self.b()
    }

    /// Energy unit `u2` and time unit `1/ω2` of the dimensionless convention.
    pub fn energy_unit(&self) -> f64 {
        self.u2
    }

    pub fn time_unit(&self) -> f64 {
        1.0 / self.omega2()
    }

    /// Angular-momentum unit `u2 / ω2 = sqrt(m3 u2)`.
    pub fn action_unit(&self) -> f64 {
        (self.m3 * self.u2).sqrt()
    }
}

/// The five dimensionless numbers governing all simulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimlessParams {
    /// `m1 / m3`
    pub mu: f64,
    /// `e1 / e3`
    pub nu: f64,
    /// torsional stiffness ratio; the potential is `-η² cos β - cos α`
    pub eta: f64,
    pub q: f64,
    /// `B_Z / B_Y`
    #[serde(default)]
    pub a: f64,
}

impl DimlessParams {
    pub fn new(mu: f64, nu: f64, eta: f64, q: f64, a: f64) -> Result<Self> {
        let p = Self { mu, nu, eta, q, a };
        p.validate()?;
        Ok(p)
    }

    /// `μ = ν = η = 1`, no axial field.
    pub fn symmetric(q: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, q, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("mu", self.mu)?;
        require_positive("eta", self.eta)?;
        require_positive("q", self.q)?;
        if !self.nu.is_finite() || !self.a.is_finite() {
            return Err(Error::InvalidParameter { name: "nu/a", reason: "must be finite".into() });
        }
        Ok(())
    }

    pub fn m1(&self) -> f64 {
        self.mu
    }

    pub fn u1(&self) -> f64 {
        self.eta * self.eta
    }

    pub fn b(&self) -> f64 {
        self.q
    }

    pub fn phi(&self) -> f64 {
        self.a * self.q
    }

    /// `l_c = η / q` in units of `sqrt(m3 u2)`.
    pub fn l_c(&self) -> f64 {
        self.eta / self.q
    }

    pub fn locked_speed(&self) -> f64 {
        self.eta / self.q
    }

    /// A dimensionful set that maps back onto these numbers with
    /// `m3 = u2 = 1`.
    pub fn to_model_params(&self) -> ModelParams {
        ModelParams {
            m1: self.mu,
            m3: 1.0,
            e1: self.nu * 2.0,
            e3: 2.0,
            u1: self.u1(),
            u2: 1.0,
            b_y: self.q,
            b_z: self.a * self.q,
        }
    }
}

pub fn to_dimensionless(params: &ModelParams) -> Result<DimlessParams> {
    params.validate()?;
    DimlessParams::new(
        params.m1 / params.m3,
        params.e1 / params.e3,
        (params.u1 / params.u2).sqrt(),
        params.q(),
        params.b_z / params.b_y,
    )
}
