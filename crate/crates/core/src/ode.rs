//! Dormand–Prince 5(4) integrator with adaptive step control and cubic
//! Hermite resampling onto a uniform output grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// One accepted step, enough for cubic Hermite interpolation.
pub struct StepView<'a> {
    pub t0: f64,
    pub y0: &'a [f64],
    pub f0: &'a [f64],
    pub t1: f64,
    pub y1: &'a [f64],
    pub f1: &'a [f64],
}

impl StepView<'_> {
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        for i in 0..out.len() {
            out[i] = h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction), calling
/// `on_step` after every accepted step. Returns the state at `t1`.
pub fn integrate<F, O>(f: F, t0: f64, y0: &[f64], t1: f64, opts: &OdeOptions, on_step: O) -> Result<(Vec<f64>, OdeStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(&StepView<'_>),
{
    integrate_projected(f, |_| false, t0, y0, t1, opts, on_step)
}

/// Like [`integrate`], but every accepted state is passed to `project`,
/// which may move it back onto an invariant manifold and returns whether
/// it did.
pub fn integrate_projected<F, P, O>(
    mut f: F,
    mut project: P,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    mut on_step: O,
) -> Result<(Vec<f64>, OdeStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    P: FnMut(&mut [f64]) -> bool,
    O: FnMut(&StepView<'_>),
{
    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok((y, stats));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    f(t0, &y, &mut k1);
    stats.evaluations += 1;

    let mut h = match opts.h_init {
        Some(h) => h.abs().min(span),
        None => initial_step(&mut f, t0, &y, &k1, dir, opts, &mut tmp, &mut k2, &mut stats).min(span),
    }
    .min(opts.h_max);
    let mut t = t0;
    let mut last_rejected = false;

    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 0.0 {
            break;
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let mut hs = h.min(remaining);
        // avoid a sliver of a final step
        if remaining - hs < 1e-12 * span {
            hs = remaining;
        }
        if hs <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepUnderflow { t, h: hs, state: y });
        }
        let hd = dir * hs;

        for i in 0..n {
            tmp[i] = y[i] + hd * A21 * k1[i];
        }
        f(t + C2 * hd, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + hd * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hd, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + hd * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hd, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + hd * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hd, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + hd * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if hs == remaining { t1 } else { t + hd };
        f(t + hd, &tmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + hd * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &y_new, &mut k7);
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e = hd * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if !err.is_finite() {
            stats.rejected += 1;
            h = hs * 0.2;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            stats.accepted += 1;
            if project(&mut y_new) {
                f(t_new, &y_new, &mut k7);
                stats.evaluations += 1;
            }
            on_step(&StepView { t0: t, y0: &y, f0: &k1, t1: t_new, y1: &y_new, f1: &k7 });
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            let mut factor = 0.9 * err.max(1e-10).powf(-0.2);
            factor = factor.clamp(0.2, 5.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            h = (hs * factor).min(opts.h_max);
            last_rejected = false;
            if t == t1 {
                break;
            }
        } else {
            stats.rejected += 1;
            h = hs * (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Ok((y, stats))
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    dir: f64,
    opts: &OdeOptions,
    tmp: &mut [f64],
    f1: &mut [f64],
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    // Hairer, Nørsett & Wanner, II.4
    let n = y0.len() as f64;
    let sc = |i: usize| opts.atol + opts.rtol * y0[i].abs();
    let d0 = (y0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    for i in 0..y0.len() {
        tmp[i] = y0[i] + dir * h0 * f0[i];
    }
    f(t0 + dir * h0, tmp, f1);
    stats.evaluations += 1;
    let d2 = (f1
        .iter()
        .zip(f0)
        .enumerate()
        .map(|(i, (a, b))| ((a - b) / sc(i)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Integrates and resamples onto `n_intervals + 1` uniformly spaced times
/// from `t0` to `t1` inclusive. The last sample is the integrator's own
/// endpoint, not an interpolant.
pub fn integrate_uniform<F>(
    f: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    n_intervals: usize,
    opts: &OdeOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, OdeStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_uniform_projected(f, |_| false, t0, y0, t1, n_intervals, opts)
}

/// [`integrate_uniform`] with a projection after every accepted step and
/// on every interpolated sample.
pub fn integrate_uniform_projected<F, P>(
    f: F,
    project: P,
    t0: f64,
    y0: &[f64],
    t1: f64,
    n_intervals: usize,
    opts: &OdeOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, OdeStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    P: Fn(&mut [f64]) -> bool,
{
    let n_intervals = n_intervals.max(1);
    let dt = (t1 - t0) / n_intervals as f64;
    let mut times = Vec::with_capacity(n_intervals + 1);
    let mut states = Vec::with_capacity(n_intervals + 1);
    times.push(t0);
    states.push(y0.to_vec());
    let mut next = 1usize;
    let dir = (t1 - t0).signum();
    let (y_end, stats) = integrate_projected(f, &project, t0, y0, t1, opts, |step| {
        while next < n_intervals {
            let ts = t0 + dt * next as f64;
            if dir * (ts - step.t1) > 0.0 {
                break;
            }
            let mut out = vec![0.0; step.y0.len()];
            step.interpolate(ts, &mut out);
            project(&mut out);
            times.push(ts);
            states.push(out);
            next += 1;
        }
    })?;
    times.push(t1);
    states.push(y_end);
    Ok((times, states, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::with_tol(1e-12);
        let (y, _) = integrate(|_, y, d| d[0] = -y[0], 0.0, &[1.0], 5.0, &opts, |_| {}).unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let opts = OdeOptions::with_tol(1e-12);
        let rhs = |_: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        let (y, _) = integrate(rhs, 0.0, &[1.0, 0.0], 10.0, &opts, |_| {}).unwrap();
        let (back, _) = integrate(rhs, 10.0, &y, 0.0, &opts, |_| {}).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-9 && back[1].abs() < 1e-9);
    }

    #[test]
    fn uniform_sampling_hits_grid() {
        let opts = OdeOptions::with_tol(1e-11);
        let (t, y, _) =
            integrate_uniform(|_, y, d| { d[0] = y[1]; d[1] = -y[0]; }, 0.0, &[0.0, 1.0], 6.0, 60, &opts).unwrap();
        assert_eq!(t.len(), 61);
        assert_eq!(*t.last().unwrap(), 6.0);
        for (ti, yi) in t.iter().zip(&y) {
            assert!((yi[0] - ti.sin()).abs() < 1e-8, "t={ti} {} vs {}", yi[0], ti.sin());
        }
    }
}
