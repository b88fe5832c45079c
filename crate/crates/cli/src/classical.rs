//! Body tensors, full and reduced integration, effective potential.

use crate::output::{write_report, write_table, Meta, Table};
use crate::settings::{merge, resolve_model, ModelArgs};
use crate::{Ctx, Failure};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use tcrystal_core::config::ResolvedModel;
use tcrystal_core::full::{self, FullOptions, FullState, FullTrajectory};
use tcrystal_core::model::body_tensors;
use tcrystal_core::reduced::{self, ReducedModel, ReducedOptions, ReducedState, WellShape};
use tcrystal_core::ModelParams;

pub fn tensors(ctx: &Ctx) -> Result<(), Failure> {
    let cfg = &ctx.loaded.model;
    let body = cfg.body.as_ref().ok_or_else(|| Failure::Config("tensors needs a `body` block in --config".into()))?;
    let (m, e) = body_tensors(body)?;
    let mut report = json!({
        "inertia_tensor": m,
        "charge_tensor": e,
        "total_mass": body.total_mass(),
        "total_charge": body.total_charge(),
    });
    if let (Some(f), Some(t)) = (cfg.fields, cfg.trap) {
        let p = ModelParams::from_body(body, t.u1, t.u2, f.b_y, f.b_z)?;
        let d = tcrystal_core::model::to_dimensionless(&p)?;
        report["params"] = json!(p);
        report["derived"] = json!({
            "b": p.b(), "phi": p.phi(), "omega1": p.omega1(), "omega2": p.omega2(),
            "q": p.q(), "l_c": p.l_c(),
        });
        report["dimensionless"] = json!(d);
    }
    write_report(&Meta::new("tensors", json!({ "model": cfg })), &report, ctx.out.as_deref())
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimFullArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub model: ModelArgs,
    /// linear damping coefficient
    #[arg(long)]
    pub gamma_d: Option<f64>,
    /// run length in units of 1/omega2 [default: 200]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// integrator tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// uniform output intervals [default: 2000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// [default: 0.1]
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// [default: 0.1]
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub alpha_dot0: Option<f64>,
    #[arg(long)]
    pub beta_dot0: Option<f64>,
    /// [default: 1/q]
    #[arg(long)]
    pub gamma_dot0: Option<f64>,
}

impl SimFullArgs {
    pub fn fill(&mut self, q: f64) {
        self.gamma_d.get_or_insert(0.0);
        self.t_end.get_or_insert(200.0);
        self.tol.get_or_insert(1e-10);
        self.samples.get_or_insert(2000);
        self.alpha0.get_or_insert(0.1);
        self.beta0.get_or_insert(0.1);
        self.gamma0.get_or_insert(0.0);
        self.alpha_dot0.get_or_insert(0.0);
        self.beta_dot0.get_or_insert(0.0);
        self.gamma_dot0.get_or_insert(1.0 / q);
    }

    fn initial(&self) -> FullState {
        FullState {
            t: 0.0,
            alpha: self.alpha0.unwrap_or_default(),
            beta: self.beta0.unwrap_or_default(),
            gamma: self.gamma0.unwrap_or_default(),
            alpha_dot: self.alpha_dot0.unwrap_or_default(),
            beta_dot: self.beta_dot0.unwrap_or_default(),
            gamma_dot: self.gamma_dot0.unwrap_or_default(),
        }
    }
}

pub fn full_table(traj: &FullTrajectory) -> Table {
    let mut t = Table::new(vec![
        ("t", "time, units 1/omega2"),
        ("alpha", "Euler angle alpha, rad"),
        ("beta", "Euler angle beta (torsional x), rad"),
        ("gamma", "Euler angle gamma, rad"),
        ("alpha_dot", "d alpha/dt, units omega2"),
        ("beta_dot", "d beta/dt, units omega2"),
        ("gamma_dot", "d gamma/dt, units omega2"),
        ("zdot", "rotation speed alpha_dot + gamma_dot, units omega2"),
        ("energy", "Jacobi energy, units u2, zero at rest"),
        ("p_gamma", "momentum conjugate to gamma"),
        ("gimbal_flag", "1 where |sin beta| < 1e-4 and the mass matrix is regularized"),
        ("z", "rotation angle alpha + gamma, unwrapped, rad"),
    ]);
    for (i, s) in traj.samples.iter().enumerate() {
        t.push(vec![
            s.t.into(),
            s.alpha.into(),
            s.beta.into(),
            s.gamma.into(),
            s.alpha_dot.into(),
            s.beta_dot.into(),
            s.gamma_dot.into(),
            s.zdot().into(),
            traj.energy[i].into(),
            traj.p_gamma[i].into(),
            traj.gimbal[i].into(),
            (s.alpha + s.gamma).into(),
        ]);
    }
    t.note("energy_drift", crate::output::fmt_f64(traj.energy_drift()));
    t.note("p_gamma_drift", crate::output::fmt_f64(traj.p_gamma_drift()));
    t.note("regularized_evaluations", traj.regularized_evaluations.to_string());
    t
}

pub fn run_full(model: &ResolvedModel, a: &SimFullArgs) -> Result<FullTrajectory, Failure> {
    let opts = FullOptions { tol: a.tol.unwrap_or(1e-10), samples: a.samples.unwrap_or(2000) };
    if opts.samples == 0 {
        return Err(Failure::Config("samples must be >= 1".into()));
    }
    Ok(full::integrate_full(&a.initial(), &model.dimless, a.gamma_d.unwrap_or(0.0), a.t_end.unwrap_or(200.0), &opts)?)
}

pub fn simulate_full(ctx: &Ctx, flags: &SimFullArgs) -> Result<(), Failure> {
    let model = resolve_model(&ctx.loaded.model, &flags.model)?;
    let mut a: SimFullArgs = merge(flags, &ctx.loaded.run)?;
    a.fill(model.dimless.q);
    let traj = run_full(&model, &a)?;
    let meta = Meta::new("simulate-full", json!({ "model": model, "run": a }));
    write_table(&meta, &full_table(&traj), ctx.out.as_deref(), ctx.format)
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimReducedArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub model: ModelArgs,
    /// kinetic angular momentum p_z - phi [default: 2 l_c]
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<f64>,
    /// flux; overrides a*q from the model
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// [default: x+ for a double well, else 0.1]
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub px0: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// [default: 200]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// [default: 2000]
    #[arg(long)]
    pub samples: Option<usize>,
}

fn reduced_model(model: &ResolvedModel, phi: Option<f64>) -> ReducedModel {
    let m = ReducedModel::from(&model.dimless);
    match phi {
        Some(p) => m.with_phi(p),
        None => m,
    }
}

pub fn simulate_reduced(ctx: &Ctx, flags: &SimReducedArgs) -> Result<(), Failure> {
    let model = resolve_model(&ctx.loaded.model, &flags.model)?;
    let mut a: SimReducedArgs = merge(flags, &ctx.loaded.run)?;
    let m = reduced_model(&model, a.phi);
    let l = *a.l.get_or_insert(2.0 * m.l_c());
    a.phi = Some(m.phi);
    let profile = reduced::analyze_potential(l, &m);
    a.x0.get_or_insert(profile.x_plus.unwrap_or(0.1));
    a.px0.get_or_insert(0.0);
    a.z0.get_or_insert(0.0);
    a.t_end.get_or_insert(200.0);
    a.tol.get_or_insert(1e-10);
    a.samples.get_or_insert(2000);
    let s0 = ReducedState { t: 0.0, x: a.x0.unwrap(), p_x: a.px0.unwrap(), z: a.z0.unwrap(), p_z: l + m.phi };
    let opts = ReducedOptions { tol: a.tol.unwrap(), samples: a.samples.unwrap() };
    if opts.samples == 0 {
        return Err(Failure::Config("samples must be >= 1".into()));
    }
    let traj = reduced::integrate_reduced(&s0, &m, a.t_end.unwrap(), &opts)?;
    let mut t = Table::new(vec![
        ("t", "time, units 1/omega2"),
        ("x", "torsional coordinate (beta), rad"),
        ("p_x", "momentum conjugate to x"),
        ("z", "rotation angle, unwrapped, rad"),
        ("z_wrapped", "z reduced to [0, 2 pi)"),
        ("zdot", "rotation speed (p_z - phi)/(m3 + b^2 x^2/u2)"),
        ("energy", "reduced Hamiltonian"),
    ]);
    for (i, s) in traj.samples.iter().enumerate() {
        t.push(vec![s.t.into(), s.x.into(), s.p_x.into(), s.z.into(), s.wrapped_z().into(), traj.zdot[i].into(), traj.energy[i].into()]);
    }
    t.note("energy_drift", crate::output::fmt_f64(traj.energy_drift()));
    t.note("mean_zdot", crate::output::fmt_f64(traj.mean_zdot()));
    t.note("locked_speed", crate::output::fmt_f64(l.signum() * m.locked_speed()));
    let meta = Meta::new("simulate-reduced", json!({ "model": model, "run": a }));
    write_table(&meta, &t, ctx.out.as_deref(), ctx.format)
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub model: ModelArgs,
    /// kinetic angular momentum [default: 2 l_c]
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<f64>,
    /// grid half-width [default: max(2.5 x+, 0.5)]
    #[arg(long)]
    pub x_max: Option<f64>,
    /// [default: 401]
    #[arg(long)]
    pub points: Option<usize>,
    /// also write the profile as JSON here
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

pub fn potential(ctx: &Ctx, flags: &PotentialArgs) -> Result<(), Failure> {
    let model = resolve_model(&ctx.loaded.model, &flags.model)?;
    let mut a: PotentialArgs = merge(flags, &ctx.loaded.run)?;
    let m = ReducedModel::from(&model.dimless);
    let l = *a.l.get_or_insert(2.0 * m.l_c());
    let p = reduced::analyze_potential(l, &m);
    let x_max = *a.x_max.get_or_insert((2.5 * p.x_plus.unwrap_or(0.0)).max(0.5));
    let n = *a.points.get_or_insert(401);
    if n < 2 || !(x_max > 0.0) {
        return Err(Failure::Config("need points >= 2 and x_max > 0".into()));
    }
    let mut t = Table::new(vec![("x", "torsional coordinate, rad"), ("V", "effective potential l^2/(2(m3 + b^2 x^2/u2)) + u1 x^2/2")]);
    for i in 0..n {
        let x = -x_max + 2.0 * x_max * i as f64 / (n - 1) as f64;
        t.push(vec![x.into(), reduced::effective_potential(x, l, &m).into()]);
    }
    let class = match p.classification {
        WellShape::SingleWell => "single-well",
        WellShape::DoubleWell => "double-well",
        WellShape::Critical => "critical",
    };
    t.note("classification", class);
    t.note("profile", serde_json::to_string(&p).expect("json"));
    let meta = Meta::new("potential", json!({ "model": model, "run": a }));
    if let Some(path) = &a.profile {
        write_report(&meta, &p, Some(path))?;
    }
    write_table(&meta, &t, ctx.out.as_deref(), ctx.format)
}
