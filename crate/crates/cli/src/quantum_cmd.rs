//! Spectrum, flux scan and semiclassical levels (ħ = m1 = ω1 = 1).

use crate::output::{write_table, Meta, Table};
use crate::settings::{merge, quality};
use crate::{Ctx, Failure};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tcrystal_core::quantum::{self, EigenSolution, Parity, QuantumGrid};

fn grid(points: Option<usize>, x_max: Option<f64>) -> QuantumGrid {
    QuantumGrid { points: points.unwrap_or(4096), x_max }
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumArgs {
    /// [default: model q, else 10]
    #[arg(long)]
    pub q: Option<f64>,
    /// l runs over 0..=l_max [default: 30]
    #[arg(long)]
    pub l_max: Option<i64>,
    /// [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// levels per parity sector [default: 3]
    #[arg(long)]
    pub levels: Option<usize>,
    /// coarse grid points; the fine grid doubles them [default: 4096]
    #[arg(long)]
    pub points: Option<usize>,
    /// Dirichlet wall [default: from the highest level]
    #[arg(long)]
    pub x_max: Option<f64>,
}

pub fn spectrum_rows(q: f64, ls: &[i64], phi: f64, levels: usize, grid: &QuantumGrid) -> Result<Vec<EigenSolution>, Failure> {
    let jobs: Vec<(i64, Parity)> = ls.iter().flat_map(|&l| [(l, Parity::Symmetric), (l, Parity::Antisymmetric)]).collect();
    let parts: Vec<Vec<EigenSolution>> = jobs
        .par_iter()
        .map(|&(l, p)| quantum::eigensolve(q, l, phi, p, levels, grid))
        .collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn spectrum(ctx: &Ctx, flags: &SpectrumArgs) -> Result<(), Failure> {
    let mut a: SpectrumArgs = merge(flags, &ctx.loaded.run)?;
    let q = *a.q.get_or_insert(quality(a.q, &ctx.loaded.model)?);
    let l_max = *a.l_max.get_or_insert(30);
    let phi = *a.phi.get_or_insert(0.0);
    let levels = *a.levels.get_or_insert(3);
    if l_max < 0 {
        return Err(Failure::Config("l_max must be >= 0".into()));
    }
    let ls: Vec<i64> = (0..=l_max).collect();
    let sols = spectrum_rows(q, &ls, phi, levels, &grid(a.points, a.x_max))?;
    let mut t = Table::new(vec![
        ("l", "angular momentum quantum number"),
        ("parity", "symmetric or antisymmetric in x"),
        ("n", "radial quantum number within the parity sector"),
        ("global_n", "2n for symmetric, 2n+1 for antisymmetric"),
        ("E_numeric", "energy, units hbar omega1"),
        ("E_analytic", "2n + 1 + sqrt(sigma + 1/4), inverse-square potential"),
        ("zdot_numeric", "<zdot> = (l - phi) <1/(1 + q^2 x^2)>"),
        ("zdot_analytic", "sign(l - phi) (1/q)/sqrt(1 + 1/(4 sigma))"),
    ]);
    for s in &sols {
        t.push(vec![
            s.l.into(),
            s.parity.as_str().into(),
            s.n.into(),
            s.global_n().into(),
            s.energy.into(),
            quantum::analytic_spectrum(s.n, s.l, s.phi, q).into(),
            s.zdot.into(),
            quantum::analytic_zdot(s.l, s.phi, q).into(),
        ]);
    }
    let meta = Meta::new("spectrum", json!({ "run": a }));
    write_table(&meta, &t, ctx.out.as_deref(), ctx.format)
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxArgs {
    /// [default: model q, else 10]
    #[arg(long)]
    pub q: Option<f64>,
    /// [default: -1.5]
    #[arg(long, allow_hyphen_values = true)]
    pub phi_min: Option<f64>,
    /// [default: 1.5]
    #[arg(long, allow_hyphen_values = true)]
    pub phi_max: Option<f64>,
    /// [default: 61]
    #[arg(long)]
    pub phi_points: Option<usize>,
    /// [default: floor(phi_min) - 2]
    #[arg(long, allow_hyphen_values = true)]
    pub l_min: Option<i64>,
    /// [default: ceil(phi_max) + 2]
    #[arg(long, allow_hyphen_values = true)]
    pub l_max: Option<i64>,
    /// coarse grid points; the fine grid doubles them [default: 4096]
    #[arg(long)]
    pub points: Option<usize>,
    /// Dirichlet wall [default: from the highest level]
    #[arg(long)]
    pub x_max: Option<f64>,
}

pub fn flux_table(q: f64, phis: &[f64], l_min: i64, l_max: i64, grid: &QuantumGrid) -> Result<Table, Failure> {
    let pts = quantum::flux_scan(q, phis, l_min..=l_max, grid)?;
    let mut t = Table::new(vec![
        ("phi", "magnetic flux, units of the angular momentum quantum"),
        ("l_min", "minimizing angular momentum"),
        ("parity", "parity of the ground state"),
        ("E0", "ground-state energy, units hbar omega1"),
        ("zdot", "ground-state <zdot>"),
    ]);
    for p in pts {
        t.push(vec![p.phi.into(), p.l_min.into(), p.parity.as_str().into(), p.energy.into(), p.zdot.into()]);
    }
    Ok(t)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn flux_scan(ctx: &Ctx, flags: &FluxArgs) -> Result<(), Failure> {
    let mut a: FluxArgs = merge(flags, &ctx.loaded.run)?;
    let q = *a.q.get_or_insert(quality(a.q, &ctx.loaded.model)?);
    let lo = *a.phi_min.get_or_insert(-1.5);
    let hi = *a.phi_max.get_or_insert(1.5);
    let n = *a.phi_points.get_or_insert(61);
    let l_min = *a.l_min.get_or_insert(lo.floor() as i64 - 2);
    let l_max = *a.l_max.get_or_insert(hi.ceil() as i64 + 2);
    if n == 0 || hi < lo || l_max < l_min {
        return Err(Failure::Config("need phi_points >= 1, phi_min <= phi_max, l_min <= l_max".into()));
    }
    let t = flux_table(q, &linspace(lo, hi, n), l_min, l_max, &grid(a.points, a.x_max))?;
    write_table(&Meta::new("flux-scan", json!({ "run": a })), &t, ctx.out.as_deref(), ctx.format)
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemiclassicalArgs {
    /// [default: model q, else 10]
    #[arg(long)]
    pub q: Option<f64>,
    /// angular momentum [default: 20]
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<i64>,
    /// [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// [default: 5]
    #[arg(long)]
    pub levels: Option<usize>,
}

pub fn semiclassical(ctx: &Ctx, flags: &SemiclassicalArgs) -> Result<(), Failure> {
    let mut a: SemiclassicalArgs = merge(flags, &ctx.loaded.run)?;
    let q = *a.q.get_or_insert(quality(a.q, &ctx.loaded.model)?);
    let l = *a.l.get_or_insert(20);
    let phi = *a.phi.get_or_insert(0.0);
    let levels = *a.levels.get_or_insert(5);
    let mut t = Table::new(vec![
        ("n", "radial quantum number"),
        ("E_semiclassical", "Bohr-Sommerfeld energy, units hbar omega1"),
        ("V_min", "well minimum sqrt(sigma) of the inverse-square potential"),
        ("E_ladder", "V_min + 2n + 1"),
        ("E_analytic", "2n + 1 + sqrt(sigma + 1/4)"),
    ]);
    for n in 0..levels {
        let s = quantum::semiclassical_spectrum(l as f64 - phi, q, n)?;
        t.push(vec![
            n.into(),
            s.energy.into(),
            s.v_min.into(),
            (s.v_min + 2.0 * n as f64 + 1.0).into(),
            quantum::analytic_spectrum(n, l, phi, q).into(),
        ]);
    }
    write_table(&Meta::new("semiclassical", json!({ "run": a })), &t, ctx.out.as_deref(), ctx.format)
}
