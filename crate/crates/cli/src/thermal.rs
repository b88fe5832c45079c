//! Thermal statistics and the phase diagram (T in units of u2).

use crate::output::{write_table, Cell, Meta, Table};
use crate::settings::{merge, quality};
use crate::{Ctx, Failure};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tcrystal_core::thermo::{self, ThermalStats};

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

fn check_range(name: &str, lo: f64, hi: f64, n: usize) -> Result<(), Failure> {
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(Failure::Config(format!("{name}: need 0 < min <= max and points >= 1, got ({lo}, {hi}, {n})")));
    }
    Ok(())
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalArgs {
    /// [default: model q, else 10]
    #[arg(long)]
    pub q: Option<f64>,
    /// [default: 1e-4]
    #[arg(long)]
    pub t_min: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// log-spaced temperatures [default: 64]
    #[arg(long)]
    pub points: Option<usize>,
    /// use the quadrature oracle instead of the closed forms
    #[arg(long)]
    pub oracle: bool,
    /// add a seeded Monte Carlo estimate with this many samples
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Monte Carlo seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn thermal(ctx: &Ctx, flags: &ThermalArgs) -> Result<(), Failure> {
    let mut a: ThermalArgs = merge(flags, &ctx.loaded.run)?;
    let q = *a.q.get_or_insert(quality(a.q, &ctx.loaded.model)?);
    let lo = *a.t_min.get_or_insert(1e-4);
    let hi = *a.t_max.get_or_insert(1.0);
    let n = *a.points.get_or_insert(64);
    check_range("temperature", lo, hi, n)?;
    let seed = *a.seed.get_or_insert(1);
    let mc = a.mc_samples;
    let oracle = a.oracle;
    let temps = logspace(lo, hi, n);
    let rows: Vec<(ThermalStats, thermo::PhaseClassification, Option<thermo::MonteCarloStats>)> = temps
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let s = if oracle { thermo::quadrature_oracle(t, q)? } else { thermo::closed_form_stats(t, q)? };
            let phase = thermo::classify_phase(t, q)?;
            // one stream per row keeps results independent of scheduling
            let m = mc.map(|k| thermo::monte_carlo_stats(t, q, k, seed.wrapping_add(i as u64))).transpose()?;
            Ok((s, phase, m))
        })
        .collect::<Result<_, tcrystal_core::Error>>()?;
    let mut cols = vec![
        ("T", "temperature, units u2 (k_B = 1)"),
        ("u", "scaling variable 1/(4 q^2 T)"),
        ("Z", "partition function"),
        ("mean_abs_zdot", "<|zdot|>"),
        ("mean_sq_zdot", "<zdot^2>"),
        ("rel_variance", "(<zdot^2> - <|zdot|>^2)/<|zdot|>^2"),
        ("rel_std", "sqrt(rel_variance)"),
        ("phase", "melt, time-crystal, frozen or no-time-crystal"),
        ("low_fluctuation", "1 if u > u*, i.e. rel_variance < 1"),
        ("source", "closed-form or quadrature"),
    ];
    if mc.is_some() {
        cols.extend([
            ("mc_mean_abs_zdot", "Monte Carlo <|zdot|>"),
            ("mc_err_mean_abs", "one-sigma error of mc_mean_abs_zdot"),
            ("mc_rel_variance", "Monte Carlo relative variance"),
        ]);
    }
    let mut table = Table::new(cols);
    for (s, p, m) in rows {
        let mut row: Vec<Cell> = vec![
            s.t.into(),
            s.u.into(),
            s.z.into(),
            s.mean_abs_zdot.into(),
            s.mean_sq_zdot.into(),
            s.rel_variance.into(),
            s.rel_std().into(),
            p.label.as_str().into(),
            p.low_fluctuation.into(),
            s.source.as_str().into(),
        ];
        if let Some(m) = m {
            row.extend([m.stats.mean_abs_zdot.into(), m.err_mean_abs.into(), m.stats.rel_variance.into()]);
        }
        table.push(row);
    }
    table.note("u_star", crate::output::fmt_f64(thermo::fluct_threshold()?));
    write_table(&Meta::new("thermal", json!({ "run": a })), &table, ctx.out.as_deref(), ctx.format)
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseArgs {
    /// [default: 1e-4]
    #[arg(long)]
    pub t_min: Option<f64>,
    /// [default: 10]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// [default: 60]
    #[arg(long)]
    pub t_points: Option<usize>,
    /// [default: 0.3]
    #[arg(long)]
    pub q_min: Option<f64>,
    /// [default: 30]
    #[arg(long)]
    pub q_max: Option<f64>,
    /// [default: 60]
    #[arg(long)]
    pub q_points: Option<usize>,
}

impl PhaseArgs {
    pub fn fill(&mut self) {
        self.t_min.get_or_insert(1e-4);
        self.t_max.get_or_insert(10.0);
        self.t_points.get_or_insert(60);
        self.q_min.get_or_insert(0.3);
        self.q_max.get_or_insert(30.0);
        self.q_points.get_or_insert(60);
    }
}

/// Both axes log-spaced; rows run over q within T.
pub fn phase_table(a: &PhaseArgs) -> Result<Table, Failure> {
    let (tl, th, tn) = (a.t_min.unwrap(), a.t_max.unwrap(), a.t_points.unwrap());
    let (ql, qh, qn) = (a.q_min.unwrap(), a.q_max.unwrap(), a.q_points.unwrap());
    check_range("temperature", tl, th, tn)?;
    check_range("q", ql, qh, qn)?;
    let qs = logspace(ql, qh, qn);
    let grid: Vec<(f64, f64)> = logspace(tl, th, tn).into_iter().flat_map(|t| qs.iter().map(move |&q| (t, q))).collect();
    let labels: Vec<thermo::PhaseClassification> =
        grid.par_iter().map(|&(t, q)| thermo::classify_phase(t, q)).collect::<Result<_, _>>()?;
    let mut table = Table::new(vec![
        ("T", "temperature, units u2"),
        ("q", "quality factor"),
        ("u", "1/(4 q^2 T)"),
        ("phase", "melt, time-crystal, frozen or no-time-crystal"),
        ("low_fluctuation", "1 if u > u*"),
    ]);
    for ((t, q), p) in grid.iter().zip(labels) {
        table.push(vec![(*t).into(), (*q).into(), thermo::scaling_variable(*t, *q).into(), p.label.as_str().into(), p.low_fluctuation.into()]);
    }
    table.note("boundaries", "melt T >= u2; frozen T <= u2/q^2; no time crystal for q <= 1");
    Ok(table)
}

pub fn phase_diagram(ctx: &Ctx, flags: &PhaseArgs) -> Result<(), Failure> {
    let mut a: PhaseArgs = merge(flags, &ctx.loaded.run)?;
    a.fill();
    let t = phase_table(&a)?;
    write_table(&Meta::new("phase-diagram", json!({ "run": a })), &t, ctx.out.as_deref(), ctx.format)
}
