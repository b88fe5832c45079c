//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every verdict is printed; exits nonzero if any criterion fails.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::time::{Duration, Instant};
use tcrystal_core::design::{design, DesignInput};
use tcrystal_core::full::{self, FullOptions, FullState};
use tcrystal_core::quantum::{self, Parity, QuantumGrid};
use tcrystal_core::reduced::{integrate_reduced, ReducedModel, ReducedOptions, ReducedState};
use tcrystal_core::specfun::laguerre;
use tcrystal_core::thermo::{self, PhaseLabel};
use tcrystal_core::DimlessParams;

struct Verdict {
    passed: bool,
    summary: String,
}

fn verdict(passed: bool, summary: impl Into<String>) -> Verdict {
    Verdict { passed, summary: summary.into() }
}

/// Composite Simpson rule, the in-test quadrature oracle.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn fig3_initial() -> FullState {
    FullState { alpha: 0.1, beta: 0.1, gamma_dot: 0.1, ..FullState::default() }
}

fn std_dev(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn c01_locked_rotation() -> Verdict {
    let m = ReducedModel::from(&DimlessParams::symmetric(10.0).unwrap());
    let l = 0.2;
    // equilibrium from dV/dx = 0 with V written out here
    let v = |x: f64| l * l / (2.0 * (1.0 + 100.0 * x * x)) + 0.5 * x * x;
    let dv = |x: f64| (v(x + 1e-6) - v(x - 1e-6)) / 2e-6;
    let xp = bisect(dv, 0.01, 1.0);
    let expect = 1.0 / 10.0;
    let s0 = ReducedState { x: xp, p_z: l, ..ReducedState::default() };
    match integrate_reduced(&s0, &m, 200.0, &ReducedOptions { tol: 1e-10, samples: 2000 }) {
        Ok(t) => {
            let worst = t.zdot.iter().map(|z| (z - expect).abs()).fold(0.0, f64::max);
            verdict(worst < 1e-6, format!("max |zdot - 0.1| = {worst:.3e} over t in [0, 200] (x+ = {xp:.6})"))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c02_fig3() -> Verdict {
    let p = DimlessParams::symmetric(10.0).unwrap();
    let s0 = fig3_initial();
    let t_end = 200.0;
    match full::integrate_full(&s0, &p, 0.0, t_end, &FullOptions { tol: 1e-10, samples: 2000 }) {
        Ok(t) => {
            let last = t.last();
            let mean = ((last.alpha + last.gamma) - (s0.alpha + s0.gamma)) / t_end;
            let alpha: Vec<f64> = t.samples.iter().map(|s| s.alpha).collect();
            let beta: Vec<f64> = t.samples.iter().map(|s| s.beta).collect();
            let (sa, sb) = (std_dev(&alpha), std_dev(&beta));
            let ok = (mean / 0.1 - 1.0).abs() <= 0.01 && sa < 0.02 && sb < 0.02;
            verdict(ok, format!("mean zdot = {mean:.5}, std alpha = {sa:.2e}, std beta = {sb:.2e}"))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c03_fig4() -> Verdict {
    let p = DimlessParams::symmetric(10.0).unwrap();
    let s0 = FullState { gamma_dot: 10.0 / p.q, ..fig3_initial() };
    let t = match full::integrate_full(&s0, &p, 0.05, 260.0, &FullOptions { tol: 1e-9, samples: 2600 }) {
        Ok(t) => t,
        Err(e) => return verdict(false, e.to_string()),
    };
    let zdot = full::zdot_series(&t);
    // rotation has ceased from the first sample after which |ż| stays below 0.01
    let settled = zdot.iter().rposition(|z| z.abs() >= 0.01).map_or(0, |i| i + 1);
    if settled >= zdot.len() {
        return verdict(false, format!("no cessation by t = 260 (final zdot = {:.4})", zdot[zdot.len() - 1]));
    }
    let t_stop = t.samples[settled].t;
    let before = &zdot[..settled];
    let on_plateau: Vec<usize> = (0..settled).filter(|&i| (before[i] / 0.1 - 1.0).abs() <= 0.02).collect();
    let fraction = on_plateau.len() as f64 / settled.max(1) as f64;
    let span = on_plateau.first().zip(on_plateau.last()).map(|(a, b)| (t.samples[*a].t, t.samples[*b].t));
    verdict(
        fraction >= 0.3,
        format!("plateau 0.1 +- 2% on {:.0}% of the run before cessation at t = {t_stop:.1} (plateau span {span:.1?})", 100.0 * fraction),
    )
}

fn c04_gauge() -> Verdict {
    let tol = 1e-10;
    let opts = FullOptions { tol, samples: 500 };
    let p0 = DimlessParams::symmetric(10.0).unwrap();
    let p3 = DimlessParams { a: 0.3, ..p0 };
    match (full::integrate_full(&fig3_initial(), &p0, 0.0, 50.0, &opts), full::integrate_full(&fig3_initial(), &p3, 0.0, 50.0, &opts)) {
        (Ok(a), Ok(b)) => {
            let worst = a
                .samples
                .iter()
                .zip(&b.samples)
                .map(|(x, y)| {
                    [x.alpha - y.alpha, x.beta - y.beta, x.gamma - y.gamma, x.alpha_dot - y.alpha_dot, x.beta_dot - y.beta_dot, x.gamma_dot - y.gamma_dot]
                        .iter()
                        .fold(0.0f64, |m, d| m.max(d.abs()))
                })
                .fold(0.0, f64::max);
            verdict(worst <= 10.0 * tol, format!("max pointwise difference a = 0 vs a = 0.3 over t in [0, 50]: {worst:.3e} (limit {:.0e})", 10.0 * tol))
        }
        (Err(e), _) | (_, Err(e)) => verdict(false, e.to_string()),
    }
}

fn c05_conservation() -> Verdict {
    let p = DimlessParams::new(1.0, 0.8, 1.0, 10.0, 0.2).unwrap();
    match full::integrate_full(&fig3_initial(), &p, 0.0, 200.0 * PI, &FullOptions { tol: 1e-10, samples: 4000 }) {
        Ok(t) => {
            let (de, dp) = (t.energy_drift(), t.p_gamma_drift());
            verdict(de < 1e-6 && dp < 1e-6, format!("relative drift: energy {de:.2e}, p_gamma {dp:.2e} over t = 200 pi"))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c06_antisymmetric_closed_forms() -> Verdict {
    let q = 10.0;
    let grid = QuantumGrid::default();
    let rows: Result<Vec<(i64, usize, f64, f64)>, _> = (1..=30i64)
        .into_par_iter()
        .map(|l| {
            let sols = quantum::eigensolve(q, l, 0.0, Parity::Antisymmetric, 3, &grid)?;
            Ok::<_, tcrystal_core::Error>(
                sols.iter()
                    .map(|s| {
                        // closed forms evaluated here, independently of the library
                        let sigma = (l * l) as f64 / (q * q);
                        let e = 2.0 * s.n as f64 + 1.0 + (sigma + 0.25).sqrt();
                        let z = (1.0 / q) / (1.0 + 1.0 / (4.0 * sigma)).sqrt();
                        (l, s.n, (s.energy / e - 1.0).abs(), (s.zdot / z - 1.0).abs())
                    })
                    .collect::<Vec<_>>(),
            )
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|v| v.into_iter().flatten().collect());
    match rows {
        Ok(rows) => {
            let we = rows.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
            let wz = rows.iter().max_by(|a, b| a.3.total_cmp(&b.3)).unwrap();
            verdict(
                we.2 <= 1e-3 && wz.3 <= 1e-3,
                format!("worst relative error: E {:.2e} at (l={}, n={}), zdot {:.2e} at (l={}, n={})", we.2, we.0, we.1, wz.3, wz.0, wz.1),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn ground_zdot_curve(q: f64, l_max: i64) -> Result<Vec<f64>, tcrystal_core::Error> {
    (0..=l_max)
        .into_par_iter()
        .map(|l| quantum::eigensolve(q, l, 0.0, Parity::Symmetric, 1, &QuantumGrid::default()).map(|s| s[0].zdot))
        .collect()
}

fn c07_hump() -> Verdict {
    let (c10, c20) = match (ground_zdot_curve(10.0, 30), ground_zdot_curve(20.0, 40)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return verdict(false, e.to_string()),
    };
    let argmax = |c: &[f64]| (0..c.len()).max_by(|a, b| c[*a].total_cmp(&c[*b])).unwrap();
    let (l10, l20) = (argmax(&c10), argmax(&c20));
    let (h10, h20) = (c10[l10], c20[l20]);
    let ok = (3..=8).contains(&l10) && h20 > h10;
    verdict(
        ok,
        format!(
            "q=10 peak at l={l10} ({h10:.4}); q=20 peak at l={l20} ({h20:.4}); in units of 1/q: {:.3} vs {:.3}",
            h10 * 10.0,
            h20 * 20.0
        ),
    )
}

fn c08_flux_scan() -> Verdict {
    let phis: Vec<f64> = (-30..=30).map(|k| k as f64 * 0.05).collect();
    let pts = match quantum::flux_scan(10.0, &phis, -3..=3, &QuantumGrid::default()) {
        Ok(p) => p,
        Err(e) => return verdict(false, e.to_string()),
    };
    let at = |phi: f64| pts.iter().position(|p| (p.phi - phi).abs() < 1e-9);
    let mut period = 0.0f64;
    for p in &pts {
        if let Some(j) = at(p.phi + 1.0) {
            period = period.max((pts[j].energy - p.energy).abs());
            let half = (p.phi.fract().abs() - 0.5).abs() < 1e-9;
            if !half {
                period = period.max((pts[j].zdot - p.zdot).abs());
            }
        }
    }
    let integers: Vec<usize> = [-1.0, 0.0, 1.0].iter().filter_map(|&p| at(p)).collect();
    let zero_at_int = integers.iter().map(|&i| pts[i].zdot.abs()).fold(0.0, f64::max);
    let mut jumps = true;
    for h in [-0.5, 0.5] {
        let (a, b) = (at(h - 0.05).unwrap(), at(h + 0.05).unwrap());
        jumps &= pts[a].zdot < 0.0 && pts[b].zdot > 0.0;
    }
    let minima: Vec<f64> = (1..pts.len() - 1)
        .filter(|&i| pts[i].energy < pts[i - 1].energy && pts[i].energy < pts[i + 1].energy)
        .map(|i| pts[i].phi)
        .collect();
    let minima_ok = minima.len() == 3 && minima.iter().all(|m| (m - m.round()).abs() < 1e-9);
    let ok = period < 1e-8 && zero_at_int < 1e-10 && jumps && minima_ok;
    let i05 = at(0.45).unwrap();
    verdict(
        ok,
        format!(
            "period mismatch {period:.1e}, max |zdot| at integers {zero_at_int:.1e}, sign jumps at +-1/2: {jumps}, E minima at {minima:?}; zdot(0.45) = {:.4}",
            pts[i05].zdot
        ),
    )
}

fn c09_hellmann_feynman() -> Verdict {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let cases: Vec<(i64, f64, Parity)> = (0..20)
        .map(|_| {
            let parity = if rng.gen_bool(0.5) { Parity::Symmetric } else { Parity::Antisymmetric };
            (rng.gen_range(-10..=10), rng.gen_range(-1.5..1.5), parity)
        })
        .collect();
    let d = 1e-4;
    let grid = QuantumGrid::default();
    let errs: Result<Vec<f64>, tcrystal_core::Error> = cases
        .par_iter()
        .map(|&(l, phi, parity)| {
            let s = quantum::eigensolve(10.0, l, phi, parity, 1, &grid)?[0].zdot;
            let ep = quantum::eigensolve(10.0, l, phi + d, parity, 1, &grid)?[0].energy;
            let em = quantum::eigensolve(10.0, l, phi - d, parity, 1, &grid)?[0].energy;
            Ok((s + (ep - em) / (2.0 * d)).abs())
        })
        .collect();
    match errs {
        Ok(e) => {
            let worst = e.iter().cloned().fold(0.0, f64::max);
            verdict(worst < 1e-5, format!("max |zdot + dE/dphi| over 20 random (l, phi) = {worst:.2e}"))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c10_laguerre_identity() -> Verdict {
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.5, 3.2] {
        for n in 0..=6usize {
            // x = s²: ∫ x^{α-1} e^{-x} L² dx = ∫ 2 s^{2α-1} e^{-s²} L(s²)² ds
            let v = simpson(|s| 2.0 * s.powf(2.0 * alpha - 1.0) * (-s * s).exp() * laguerre(n, alpha, s * s).powi(2), 0.0, 12.0, 40_000);
            let nf: f64 = (1..=n).map(|k| k as f64).product();
            let expect = statrs::function::gamma::gamma(n as f64 + alpha + 1.0) / (nf * alpha);
            worst = worst.max((v / expect - 1.0).abs());
        }
    }
    verdict(worst < 1e-8, format!("max relative deviation {worst:.2e} for n <= 6, alpha in {{0.5, 1.5, 3.2}}"))
}

/// `(Z, <|ż|>, rel_variance)` from the two position integrals.
fn thermal_oracle(t: f64, q: f64) -> (f64, f64, f64) {
    let k = 2.0 * q * q * t;
    let s = (2.0 * t).sqrt();
    let n = 200_000;
    let i = s * simpson(|y| (1.0 + k * y * y).sqrt() * (-y * y).exp(), -10.0, 10.0, n);
    let j = s * simpson(|y| (-y * y).exp() / (1.0 + k * y * y).sqrt(), -10.0, 10.0, n);
    let mean = 2.0 * t / i;
    (4.0 * PI * PI * t * i, mean, t * j / i / (mean * mean) - 1.0)
}

fn c11_thermal() -> Verdict {
    let q = 10.0;
    let us: Vec<f64> = (0..50).map(|k| 10f64.powf(-3.0 + 5.0 * k as f64 / 49.0)).collect();
    let worst = us
        .par_iter()
        .map(|&u| {
            let t = 1.0 / (4.0 * q * q * u);
            let c = thermo::closed_form_stats(t, q).expect("closed form");
            let (z, m, r) = thermal_oracle(t, q);
            [(c.z / z - 1.0).abs(), (c.mean_abs_zdot / m - 1.0).abs(), (c.rel_variance / r - 1.0).abs()]
                .into_iter()
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let (u0, u1) = (1e-6, 1e4);
    let t0 = 1.0 / (4.0 * q * q * u0);
    let t1 = 1.0 / (4.0 * q * q * u1);
    let lim0 = (thermo::closed_form_stats(t0, q).unwrap().mean_abs_zdot * q - 1.0).abs();
    let lim1 = (thermo::closed_form_stats(t1, q).unwrap().mean_abs_zdot / (2.0 * t1 / PI).sqrt() - 1.0).abs();
    verdict(
        worst < 1e-6 && lim0 < 1e-3 && lim1 < 1e-3,
        format!("max relative deviation from quadrature {worst:.2e} on u in [1e-3, 1e2]; limits: u=1e-6 {lim0:.1e}, u=1e4 {lim1:.1e}"),
    )
}

fn c12_threshold() -> Verdict {
    match thermo::fluct_threshold() {
        Ok(u) => {
            let bound = 1.0 / (4.0 * u);
            verdict((0.045..=0.049).contains(&u) && (bound - 5.3).abs() <= 0.2, format!("u* = {u:.6}, q^2 T < {bound:.4} u2"))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c13_floor() -> Verdict {
    let t = 1.0 / (4.0 * 100.0 * 1e4);
    match thermo::closed_form_stats(t, 10.0) {
        Ok(s) => {
            let d = (s.rel_variance - (PI / 2.0 - 1.0)).abs();
            verdict(d < 1e-3, format!("rel_variance(u = 1e4) = {:.8}, pi/2 - 1 = {:.8}, difference {d:.2e}", s.rel_variance, PI / 2.0 - 1.0))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c14_phases() -> Verdict {
    let cases = [
        (0.5, 10.0, PhaseLabel::TimeCrystal),
        (2.0, 10.0, PhaseLabel::Melt),
        (0.005, 10.0, PhaseLabel::Frozen),
        (0.5, 0.5, PhaseLabel::NoTimeCrystal),
    ];
    let got: Vec<String> = cases
        .iter()
        .map(|(t, q, want)| match thermo::classify_phase(*t, *q) {
            Ok(c) if c.label == *want => format!("({t}, {q}) {}", c.label.as_str()),
            Ok(c) => format!("({t}, {q}) {} != {}", c.label.as_str(), want.as_str()),
            Err(e) => format!("({t}, {q}) error {e}"),
        })
        .collect();
    verdict(got.iter().all(|g| !g.contains("!=") && !g.contains("error")), got.join("; "))
}

fn c15_design() -> Verdict {
    let r = match design(&DesignInput::reference()) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    // thin shell by hand: Q/M = σ/(ρ t), spacing = (e/σ)^{1/2}, ω0 = B Q/(2M)
    let sigma: f64 = 0.025 * 1.602_176_634e-19 * 1e18;
    let qm = sigma / (2000.0 * 10e-9);
    let spacing = (1.602_176_634e-19 / sigma).sqrt();
    let w0 = 5.0 * qm / 2.0;
    let consistent = (r.charge_to_mass / qm - 1.0).abs() < 1e-12 && (r.charge_spacing / spacing - 1.0).abs() < 1e-12 && (r.omega0 / w0 - 1.0).abs() < 1e-12;
    let ratio = r.omega0 / 1000.0;
    let window = r.trap.window;
    let ok = consistent
        && (qm / 200.0 - 1.0).abs() <= 0.05
        && (spacing / 6e-9 - 1.0).abs() <= 0.10
        && (1.0 / 3.0..=3.0).contains(&ratio)
        && window.is_some_and(|w| w.low < w.high && w.overlaps(10e-3, 50e-3));
    verdict(
        ok,
        format!(
            "Q/M = {:.1} C/kg, spacing = {:.2} nm, omega0 = {:.1} rad/s ({:.2}x 1e3), q = {:.3}, window = {}",
            r.charge_to_mass,
            r.charge_spacing * 1e9,
            r.omega0,
            ratio,
            r.q(),
            window.map_or("empty".into(), |w| format!("({:.2} mK, {:.1} mK)", w.low * 1e3, w.high * 1e3))
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict, u64); 15] = [
        (1, "reduced locked rotation", c01_locked_rotation, 1),
        (2, "undamped full-model run", c02_fig3, 5),
        (3, "damped plateau and cessation", c03_fig4, 10),
        (4, "gauge invariance", c04_gauge, 5),
        (5, "conservation", c05_conservation, 10),
        (6, "antisymmetric sector vs closed forms", c06_antisymmetric_closed_forms, 60),
        (7, "hump position and growth", c07_hump, 120),
        (8, "flux scan", c08_flux_scan, 120),
        (9, "Hellmann-Feynman", c09_hellmann_feynman, 30),
        (10, "Laguerre normalization identity", c10_laguerre_identity, 5),
        (11, "thermal closed forms vs quadrature", c11_thermal, 10),
        (12, "fluctuation threshold", c12_threshold, 1),
        (13, "relative-variance floor", c13_floor, 1),
        (14, "phase classifier", c14_phases, 1),
        (15, "experiment design", c15_design, 1),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (id, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let slow = if took > Duration::from_secs(budget) { format!(" [over {budget} s budget]") } else { String::new() };
        println!(
            "criterion {id:>2} {:<4} {name}: {} ({:.2} s){slow}",
            if v.passed { "PASS" } else { "FAIL" },
            v.summary,
            took.as_secs_f64()
        );
        if !v.passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
