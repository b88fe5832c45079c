//! Fixed-parameter runs behind the published figures. Config model keys are
//! ignored here; the output destination and format still apply.

use crate::classical::{full_table, run_full, SimFullArgs};
use crate::output::{write_table, Meta, Table};
use crate::quantum_cmd::{flux_table, linspace, spectrum_rows};
use crate::thermal::{logspace, phase_table, PhaseArgs};
use crate::{Ctx, Failure};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tcrystal_core::config::ResolvedModel;
use tcrystal_core::quantum::{self, QuantumGrid};
use tcrystal_core::{thermo, DimlessParams};

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// phase labels on the (T, q) plane
    Fig2b,
    /// undamped full-model run, q = 10
    Fig3,
    /// damped run with a fast initial spin
    Fig4,
    /// ground state against flux, q = 10
    Fig5,
    /// spectrum and <zdot> for l = 0..30, n = 0..5
    Fig6,
    /// relative fluctuation against u
    Fig7,
}

#[derive(Debug, clap::Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub fig: Figure,
}

const Q: f64 = 10.0;

fn full_run(gamma_d: f64, zdot0: f64, t_end: f64, tol: f64, samples: usize) -> Result<(Table, serde_json::Value), Failure> {
    let model = ResolvedModel { physical: None, dimless: DimlessParams::symmetric(Q)? };
    let mut a = SimFullArgs {
        gamma_d: Some(gamma_d),
        t_end: Some(t_end),
        tol: Some(tol),
        samples: Some(samples),
        gamma_dot0: Some(zdot0),
        ..Default::default()
    };
    a.fill(Q);
    let traj = run_full(&model, &a)?;
    Ok((full_table(&traj), json!({ "model": model, "run": a })))
}

fn fig6() -> Result<Table, Failure> {
    let ls: Vec<i64> = (0..=30).collect();
    let grid = QuantumGrid { points: 4096, x_max: None };
    let mut sols = spectrum_rows(Q, &ls, 0.0, 3, &grid)?;
    sols.sort_by_key(|s| (s.l, s.global_n()));
    let mut t = Table::new(vec![
        ("l", "angular momentum quantum number"),
        ("n", "global radial index; even n symmetric, odd n antisymmetric"),
        ("parity", "symmetric or antisymmetric in x"),
        ("energy", "numeric energy, units hbar omega1"),
        ("zdot", "numeric <zdot>, units omega1"),
        ("zdot_analytic", "closed form for the inverse-square potential"),
    ]);
    for s in &sols {
        t.push(vec![
            s.l.into(),
            s.global_n().into(),
            s.parity.as_str().into(),
            s.energy.into(),
            s.zdot.into(),
            quantum::analytic_zdot(s.l, s.phi, Q).into(),
        ]);
    }
    Ok(t)
}

fn fig7() -> Result<Table, Failure> {
    let us = logspace(1e-3, 1e2, 101);
    let rv: Vec<f64> = us.par_iter().map(|&u| thermo::rel_variance_of_u(u)).collect::<Result<_, _>>()?;
    let mut t = Table::new(vec![
        ("u", "1/(4 q^2 T)"),
        ("rel_variance", "(<zdot^2> - <|zdot|>^2)/<|zdot|>^2"),
        ("rel_std", "sqrt(rel_variance)"),
    ]);
    for (u, v) in us.iter().zip(rv) {
        t.push(vec![(*u).into(), v.into(), v.sqrt().into()]);
    }
    t.note("u_star", crate::output::fmt_f64(thermo::fluct_threshold()?));
    Ok(t)
}

pub fn reproduce(ctx: &Ctx, a: &ReproduceArgs) -> Result<(), Failure> {
    let (table, run) = match a.fig {
        Figure::Fig2b => {
            let mut p = PhaseArgs::default();
            p.fill();
            (phase_table(&p)?, json!({ "run": p }))
        }
        Figure::Fig3 => full_run(0.0, 1.0 / Q, 200.0, 1e-10, 2000)?,
        Figure::Fig4 => full_run(0.05, 10.0 / Q, 260.0, 1e-9, 2600)?,
        Figure::Fig5 => {
            let phis = linspace(-1.5, 1.5, 61);
            let grid = QuantumGrid { points: 4096, x_max: None };
            let run = json!({ "q": Q, "phi_min": -1.5, "phi_max": 1.5, "phi_points": 61, "l_min": -4, "l_max": 4 });
            (flux_table(Q, &phis, -4, 4, &grid)?, run)
        }
        Figure::Fig6 => (fig6()?, json!({ "q": Q, "l_max": 30, "levels_per_parity": 3 })),
        Figure::Fig7 => (fig7()?, json!({ "u_min": 1e-3, "u_max": 1e2, "points": 101 })),
    };
    let meta = Meta::new("reproduce", json!({ "figure": a.fig, "config": run }));
    write_table(&meta, &table, ctx.out.as_deref(), ctx.format)
}
