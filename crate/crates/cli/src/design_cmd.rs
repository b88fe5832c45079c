//! Hollow-shell design report and parameter sweeps.

use crate::output::{write_report, write_table, Cell, Meta, Table};
use crate::settings::merge;
use crate::thermal::logspace;
use crate::{Ctx, Failure};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tcrystal_core::design::{self, charge_density_from_e_per_nm2, DesignInput, TemperatureWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepField {
    Radius,
    Thickness,
    MassDensity,
    SurfaceChargeDensity,
    BY,
    Omega2,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignArgs {
    /// shell radius, m [default: 1e-6]
    #[arg(long)]
    pub radius: Option<f64>,
    /// shell thickness, m [default: 1e-8]
    #[arg(long)]
    pub thickness: Option<f64>,
    /// kg/m^3 [default: 2000]
    #[arg(long)]
    pub mass_density: Option<f64>,
    /// C/m^2 [default: 0.025 e/nm^2]
    #[arg(long)]
    pub surface_charge_density: Option<f64>,
    /// alternative to --surface-charge-density, elementary charges per nm^2
    #[arg(long, conflicts_with = "surface_charge_density")]
    pub charges_per_nm2: Option<f64>,
    /// T [default: 5]
    #[arg(long)]
    pub b_y: Option<f64>,
    /// T [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub b_z: Option<f64>,
    /// torsional trap frequency, rad/s [default: 100]
    #[arg(long)]
    pub omega2: Option<f64>,
    /// emit a CSV sweep instead of the JSON report
    #[arg(long)]
    pub table: bool,
    /// field to sweep [default: omega2]
    #[arg(long, value_enum)]
    pub sweep: Option<SweepField>,
    #[arg(long)]
    pub sweep_min: Option<f64>,
    #[arg(long)]
    pub sweep_max: Option<f64>,
    /// log-spaced values [default: 50]
    #[arg(long)]
    pub sweep_points: Option<usize>,
}

impl DesignArgs {
    fn input(&self) -> Result<DesignInput, Failure> {
        if self.surface_charge_density.is_some() && self.charges_per_nm2.is_some() {
            return Err(Failure::Config("give surface_charge_density or charges_per_nm2, not both".into()));
        }
        let r = DesignInput::reference();
        Ok(DesignInput {
            radius: self.radius.unwrap_or(r.radius),
            thickness: self.thickness.unwrap_or(r.thickness),
            mass_density: self.mass_density.unwrap_or(r.mass_density),
            surface_charge_density: self
                .surface_charge_density
                .or(self.charges_per_nm2.map(charge_density_from_e_per_nm2))
                .unwrap_or(r.surface_charge_density),
            b_y: self.b_y.unwrap_or(r.b_y),
            b_z: self.b_z.unwrap_or(r.b_z),
            omega2: self.omega2.unwrap_or(r.omega2),
        })
    }
}

fn with_field(mut i: DesignInput, f: SweepField, v: f64) -> DesignInput {
    match f {
        SweepField::Radius => i.radius = v,
        SweepField::Thickness => i.thickness = v,
        SweepField::MassDensity => i.mass_density = v,
        SweepField::SurfaceChargeDensity => i.surface_charge_density = v,
        SweepField::BY => i.b_y = v,
        SweepField::Omega2 => i.omega2 = v,
    }
    i
}

fn window_cells(w: Option<TemperatureWindow>) -> [Cell; 2] {
    match w {
        Some(w) => [w.low.into(), w.high.into()],
        None => [Cell::S(String::new()), Cell::S(String::new())],
    }
}

pub fn design(ctx: &Ctx, flags: &DesignArgs) -> Result<(), Failure> {
    let a: DesignArgs = merge(flags, &ctx.loaded.run)?;
    let input = a.input()?;
    if !a.table {
        let report = design::design(&input)?;
        let meta = Meta::new("design", json!({ "input": input }));
        return write_report(&meta, &report, ctx.out.as_deref());
    }
    let field = a.sweep.unwrap_or(SweepField::Omega2);
    let base = match field {
        SweepField::Radius => input.radius,
        SweepField::Thickness => input.thickness,
        SweepField::MassDensity => input.mass_density,
        SweepField::SurfaceChargeDensity => input.surface_charge_density,
        SweepField::BY => input.b_y,
        SweepField::Omega2 => input.omega2,
    };
    let lo = a.sweep_min.unwrap_or(base / 10.0);
    let hi = a.sweep_max.unwrap_or(base * 10.0);
    let n = a.sweep_points.unwrap_or(50);
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(Failure::Config(format!("sweep: need 0 < min <= max and points >= 1, got ({lo}, {hi}, {n})")));
    }
    let mut t = Table::new(vec![
        ("value", "swept field value, SI"),
        ("charge_to_mass", "Q/M, C/kg"),
        ("omega0", "B_Y (Q/M)/2, rad/s"),
        ("q", "omega0/omega2"),
        ("u2_K", "m3 omega2^2 / k_B, K"),
        ("T_low", "u2/q^2, K (empty if q <= 1)"),
        ("T_high", "u2, K (empty if q <= 1)"),
        ("T_fluct_high", "upper bound with relative fluctuation below one, K"),
    ]);
    for v in logspace(lo, hi, n) {
        let r = design::design(&with_field(input, field, v))?;
        let [wl, wh] = window_cells(r.trap.window);
        let fh = r.trap.fluct_window.map_or(Cell::S(String::new()), |w| w.high.into());
        t.push(vec![v.into(), r.charge_to_mass.into(), r.omega0.into(), r.trap.q.into(), r.trap.u2_kelvin.into(), wl, wh, fh]);
    }
    let sweep = json!({ "field": field, "min": lo, "max": hi, "points": n });
    t.note("sweep", sweep.to_string());
    let meta = Meta::new("design", json!({ "input": input, "sweep": sweep }));
    write_table(&meta, &t, ctx.out.as_deref(), ctx.format)
}
