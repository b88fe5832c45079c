//! Canonical ensemble of the reduced rotor (`k_B = 1`, energies in `u2`).
//!
//! With `μ = η = 1` every normalized statistic depends on `T` and `q`
//! only through `u = 1/(4q²T)`.

use crate::error::{Error, Result};
use crate::model::DimlessParams;
use crate::quad::{self, Tolerance};
use crate::specfun::{bessel_k0_scaled, kummer_u_mhalf};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatsSource {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl StatsSource {
    pub fn as_str(self) -> &'static str {
        match self {
            StatsSource::ClosedForm => "closed-form",
            StatsSource::Quadrature => "quadrature",
            StatsSource::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalStats {
    pub t: f64,
    pub q: f64,
    pub u: f64,
    pub z: f64,
    pub mean_abs_zdot: f64,
    pub mean_sq_zdot: f64,
    /// `(⟨ż²⟩ - ⟨|ż|⟩²) / ⟨|ż|⟩²`
    pub rel_variance: f64,
    pub source: StatsSource,
}

impl ThermalStats {
    /// Square root of `rel_variance`, i.e. `Δ|ż| / ⟨|ż|⟩`.
    pub fn rel_std(&self) -> f64 {
        self.rel_variance.max(0.0).sqrt()
    }

    fn assemble(t: f64, q: f64, z: f64, mean_abs: f64, mean_sq: f64, source: StatsSource) -> Self {
        Self {
            t,
            q,
            u: scaling_variable(t, q),
            z,
            mean_abs_zdot: mean_abs,
            mean_sq_zdot: mean_sq,
            rel_variance: mean_sq / (mean_abs * mean_abs) - 1.0,
            source,
        }
    }
}

pub fn scaling_variable(t: f64, q: f64) -> f64 {
    1.0 / (4.0 * q * q * t)
}

fn check_tq(t: f64, q: f64) -> Result<()> {
    crate::error::require_positive("T", t)?;
    crate::error::require_positive("q", q)
}

/// `(√π/2) e^u K0(u) U(-½, 0, 2u) - 1`
pub fn rel_variance_of_u(u: f64) -> Result<f64> {
    crate::error::require_positive("u", u)?;
    let k = bessel_k0_scaled(u)?.value;
    let w = kummer_u_mhalf(2.0 * u)?.value;
    Ok(0.5 * PI.sqrt() * k * w - 1.0)
}

/// Closed forms at `μ = η = 1`.
pub fn closed_form_stats(t: f64, q: f64) -> Result<ThermalStats> {
    check_tq(t, q)?;
    let u = scaling_variable(t, q);
    let w = kummer_u_mhalf(2.0 * u)?.value;
    let k = bessel_k0_scaled(u)?.value;
    let sp = PI.sqrt();
    let z = 8.0 * PI.powf(2.5) * q * t * t * w;
    let mean_abs = 1.0 / (q * sp * w);
    let mean_sq = k / (2.0 * q * q * sp * w);
    let mut s = ThermalStats::assemble(t, q, z, mean_abs, mean_sq, StatsSource::ClosedForm);
    s.rel_variance = 0.5 * sp * k * w - 1.0;
    Ok(s)
}

const ORACLE_TOL: Tolerance = Tolerance::new(0.0, 1e-12);

/// Direct phase-space integration at `μ = η = 1`.
pub fn quadrature_oracle(t: f64, q: f64) -> Result<ThermalStats> {
    quadrature_oracle_general(t, &DimlessParams::new(1.0, 1.0, 1.0, q, 0.0)?)
}

/// Phase-space integration for general `μ, η`.
///
/// The momenta are integrated analytically, leaving
/// `I = ∫ sqrt(1+q²x²) e^{-η²x²/2T} dx` and `J = ∫ e^{-η²x²/2T} / sqrt(1+q²x²) dx`:
/// `Z = 4π² T sqrt(μ) I`, `⟨|ż|⟩ = 2T / (η I)`, `⟨ż²⟩ = T J / I`.
pub fn quadrature_oracle_general(t: f64, params: &DimlessParams) -> Result<ThermalStats> {
    params.validate()?;
    let q = params.q;
    check_tq(t, q)?;
    // x = w y with w the Gaussian width
    let w = t.sqrt() / params.eta;
    let i = 2.0 * w * quad::integrate_to_infinity(|y| (1.0 + q * q * w * w * y * y).sqrt() * (-0.5 * y * y).exp(), 0.0, ORACLE_TOL)?.value;
    let j = 2.0 * w * quad::integrate_to_infinity(|y| (-0.5 * y * y).exp() / (1.0 + q * q * w * w * y * y).sqrt(), 0.0, ORACLE_TOL)?.value;
    let z = 4.0 * PI * PI * t * params.mu.sqrt() * i;
    Ok(ThermalStats::assemble(t, q, z, 2.0 * t / (params.eta * i), t * j / i, StatsSource::Quadrature))
}

/// Signed `⟨ż⟩`, integrating `p_z` numerically over the whole line.
pub fn signed_mean_zdot(t: f64, q: f64) -> Result<quad::QuadResult> {
    check_tq(t, q)?;
    let w = t.sqrt();
    let inner = |y: f64| -> f64 {
        let a = 1.0 + q * q * w * w * y * y;
        let s = (t * a).sqrt();
        quad::integrate_real_line(|p| p * s / a * (-0.5 * p * p).exp() * s, Tolerance::new(1e-14, 1e-12))
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
            * (-0.5 * y * y).exp()
            * w
    };
    let num = quad::integrate_real_line(inner, Tolerance::new(1e-13, 1e-10))?;
    if !num.value.is_finite() {
        return Err(Error::Quadrature { estimate: num.value, error: num.error });
    }
    let den = quad::integrate_real_line(|y| (1.0 + q * q * w * w * y * y).sqrt() * (-0.5 * y * y).exp() * w * (2.0 * PI * t).sqrt(), ORACLE_TOL)?;
    Ok(quad::QuadResult { value: num.value / den.value, error: num.error / den.value })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloStats {
    pub stats: ThermalStats,
    pub samples: usize,
    pub seed: u64,
    /// One-sigma errors of `⟨|ż|⟩` and `⟨ż²⟩`.
    pub err_mean_abs: f64,
    pub err_mean_sq: f64,
}

/// Importance-sampled estimate at `μ = η = 1`: `x ~ N(0, T)`,
/// `p_z ~ N(0, T(1+q²x²))`, weight `sqrt(1+q²x²)`.
pub fn monte_carlo_stats(t: f64, q: f64, samples: usize, seed: u64) -> Result<MonteCarloStats> {
    check_tq(t, q)?;
    if samples < 2 {
        return Err(Error::InvalidParameter { name: "samples", reason: "need at least 2".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = t.sqrt();
    let (mut sw, mut sa, mut ss) = (0.0, 0.0, 0.0);
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = st * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let a = 1.0 + q * q * x * x;
        let pz = (t * a).sqrt() * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let zd = pz / a;
        let wt = a.sqrt();
        sw += wt;
        sa += wt * zd.abs();
        ss += wt * zd * zd;
        rows.push((wt, zd));
    }
    let n = samples as f64;
    let mean_abs = sa / sw;
    let mean_sq = ss / sw;
    let wbar = sw / n;
    // delta-method errors of the ratio estimators
    let (mut va, mut vs) = (0.0, 0.0);
    for (wt, zd) in &rows {
        va += (wt * (zd.abs() - mean_abs)).powi(2);
        vs += (wt * (zd * zd - mean_sq)).powi(2);
    }
    let scale = 1.0 / (wbar * wbar * n * (n - 1.0));
    let z = 4.0 * PI * PI * t * (2.0 * PI * t).sqrt() * wbar;
    Ok(MonteCarloStats {
        stats: ThermalStats::assemble(t, q, z, mean_abs, mean_sq, StatsSource::MonteCarlo),
        samples,
        seed,
        err_mean_abs: (va * scale).sqrt(),
        err_mean_sq: (vs * scale).sqrt(),
    })
}

/// Root of `rel_variance(u) = 1` on `[1e-3, 1]`.
pub fn fluct_threshold() -> Result<f64> {
    let f = |u: f64| rel_variance_of_u(u).map(|r| r - 1.0);
    let (mut lo, mut hi) = (1e-3, 1.0);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::Root(format!("no sign change on [{lo}, {hi}]: {flo}, {fhi}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn cached_threshold() -> f64 {
    static U_STAR: OnceLock<f64> = OnceLock::new();
    *U_STAR.get_or_init(|| fluct_threshold().expect("threshold bracket is fixed"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseLabel {
    Melt,
    TimeCrystal,
    Frozen,
    NoTimeCrystal,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Melt => "melt",
            PhaseLabel::TimeCrystal => "time-crystal",
            PhaseLabel::Frozen => "frozen",
            PhaseLabel::NoTimeCrystal => "no-time-crystal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseClassification {
    pub label: PhaseLabel,
    /// `u > u*`: relative fluctuation of `|ż|` below one.
    pub low_fluctuation: bool,
}

/// Regions of the `(T, q)` plane with `T` in units of `u2`.
/// Points on `T = 1` count as melted and points on `T = 1/q²` as frozen.
pub fn classify_phase(t: f64, q: f64) -> Result<PhaseClassification> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter { name: "T", reason: format!("must be >= 0, got {t}") });
    }
    crate::error::require_positive("q", q)?;
    let label = if q <= 1.0 {
        PhaseLabel::NoTimeCrystal
    } else if t >= 1.0 {
        PhaseLabel::Melt
    } else if t <= 1.0 / (q * q) {
        PhaseLabel::Frozen
    } else {
        PhaseLabel::TimeCrystal
    };
    let low_fluctuation = t == 0.0 || scaling_variable(t, q) > cached_threshold();
    Ok(PhaseClassification { label, low_fluctuation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn closed_form_matches_oracle_at_reference_point() {
        let c = closed_form_stats(0.1, 10.0).unwrap();
        let o = quadrature_oracle(0.1, 10.0).unwrap();
        assert!(rel(c.z, o.z) < 1e-9, "{c:?} {o:?}");
        assert!(rel(c.mean_abs_zdot, o.mean_abs_zdot) < 1e-9);
        assert!(rel(c.mean_sq_zdot, o.mean_sq_zdot) < 1e-9);
        assert!(rel(c.rel_variance, o.rel_variance) < 1e-8);
        assert!((c.u * 4.0 * 100.0 * 0.1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn depends_on_u_alone() {
        let a = closed_form_stats(0.01, 10.0).unwrap();
        let b = closed_form_stats(0.04, 5.0).unwrap();
        assert!((a.rel_variance - b.rel_variance).abs() < 1e-10);
        assert!((a.mean_abs_zdot * 10.0 - b.mean_abs_zdot * 5.0).abs() < 1e-12);
    }

    #[test]
    fn general_oracle_reduces_and_equipartitions() {
        let p = DimlessParams::new(2.0, 1.0, 1.5, 10.0, 0.0).unwrap();
        let s = quadrature_oracle_general(1e-7, &p).unwrap();
        // q²x² negligible: free rotor with unit inertia
        assert!(rel(s.mean_sq_zdot, 1e-7) < 1e-4);
        assert!(rel(s.mean_abs_zdot, (2.0 * 1e-7 / PI).sqrt()) < 1e-4);
    }

    #[test]
    fn signed_mean_vanishes() {
        let r = signed_mean_zdot(0.3, 10.0).unwrap();
        assert!(r.value.abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn monte_carlo_agrees_within_errors() {
        let mc = monte_carlo_stats(0.05, 10.0, 200_000, 7).unwrap();
        let c = closed_form_stats(0.05, 10.0).unwrap();
        assert!((mc.stats.mean_abs_zdot - c.mean_abs_zdot).abs() < 5.0 * mc.err_mean_abs);
        assert!((mc.stats.mean_sq_zdot - c.mean_sq_zdot).abs() < 5.0 * mc.err_mean_sq);
        assert!(rel(mc.stats.z, c.z) < 0.01);
        let again = monte_carlo_stats(0.05, 10.0, 200_000, 7).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn threshold_is_a_root() {
        let u = fluct_threshold().unwrap();
        assert!((rel_variance_of_u(u).unwrap() - 1.0).abs() < 1e-10);
        assert!(rel_variance_of_u(2.0 * u).unwrap() < 1.0);
    }

    #[test]
    fn rel_variance_decreases() {
        let mut prev = f64::INFINITY;
        for k in 0..60 {
            let u = 10f64.powf(-3.0 + k as f64 * 0.1);
            let r = rel_variance_of_u(u).unwrap();
            assert!(r < prev && r > PI / 2.0 - 1.0);
            prev = r;
        }
    }

    #[test]
    fn phase_boundaries() {
        let lab = |t, q| classify_phase(t, q).unwrap().label;
        assert_eq!(lab(0.5, 10.0), PhaseLabel::TimeCrystal);
        assert_eq!(lab(2.0, 10.0), PhaseLabel::Melt);
        assert_eq!(lab(0.005, 10.0), PhaseLabel::Frozen);
        assert_eq!(lab(0.5, 0.5), PhaseLabel::NoTimeCrystal);
        assert_eq!(lab(1.0, 10.0), PhaseLabel::Melt);
        assert_eq!(lab(0.01, 10.0), PhaseLabel::Frozen);
        assert_eq!(lab(0.5, 1.0), PhaseLabel::NoTimeCrystal);
        assert!(classify_phase(0.02, 10.0).unwrap().low_fluctuation);
        assert!(!classify_phase(0.5, 10.0).unwrap().low_fluctuation);
        assert!(classify_phase(-1.0, 10.0).is_err());
    }

    #[test]
    fn bad_arguments() {
        assert!(closed_form_stats(0.0, 10.0).is_err());
        assert!(quadrature_oracle(1.0, -1.0).is_err());
        assert!(monte_carlo_stats(1.0, 1.0, 1, 0).is_err());
    }
}
