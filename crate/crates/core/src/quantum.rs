//! Quantum rotor in units `ħ = m1 = ω1 = 1`.
//!
//! Separating `Ψ = e^{ilz} ψ(x)` leaves the radial problem
//!
//! `-½ψ'' + [(l - φ)² / 2(1 + q²x²) + x²/2] ψ = E ψ`
//!
//! on the half-line, split into sectors by the parity of `ψ` about `x = 0`.
//! The numeric solver keeps the exact potential; the closed forms belong to
//! its inverse-square approximation.

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::{laguerre, ln_gamma};
use crate::tridiag::SymTridiagonal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::RangeInclusive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        }
    }

    /// Level index across both sectors: even for symmetric, odd for antisymmetric.
    pub fn global_n(self, n: usize) -> usize {
        match self {
            Parity::Symmetric => 2 * n,
            Parity::Antisymmetric => 2 * n + 1,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" | "sym" | "even" => Ok(Parity::Symmetric),
            "antisymmetric" | "anti" | "odd" => Ok(Parity::Antisymmetric),
            _ => Err(Error::InvalidParameter { name: "parity", reason: format!("unknown parity `{s}`") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumGrid {
    /// Interior points of the coarse grid; the fine grid has twice as many.
    pub points: usize,
    /// Dirichlet wall. `None` picks a default from the requested levels.
    pub x_max: Option<f64>,
}

impl Default for QuantumGrid {
    fn default() -> Self {
        Self { points: 4096, x_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    /// Radial quantum number within the parity sector.
    pub n: usize,
    pub l: i64,
    pub phi: f64,
    pub q: f64,
    pub parity: Parity,
    /// Richardson extrapolation of the coarse and fine grid values.
    pub energy: f64,
    pub zdot: f64,
    /// `|E_extrapolated - E_fine|`, the change a further refinement would bring.
    pub grid_change: f64,
    pub x_max: f64,
    /// Fine-grid abscissae.
    pub x: Vec<f64>,
    /// Fine-grid amplitudes, `Σ h ψ² = 1`.
    pub psi: Vec<f64>,
}

impl EigenSolution {
    pub fn global_n(&self) -> usize {
        self.parity.global_n(self.n)
    }

    pub fn spacing(&self) -> f64 {
        match self.parity {
            Parity::Antisymmetric => self.x[0],
            Parity::Symmetric => 2.0 * self.x[0],
        }
    }

    pub fn norm(&self) -> f64 {
        self.spacing() * self.psi.iter().map(|p| p * p).sum::<f64>()
    }

    pub fn sigma(&self) -> f64 {
        sigma(self.l as f64 - self.phi, self.q)
    }
}

/// `σ = (l - φ)² / q²`
pub fn sigma(l_eff: f64, q: f64) -> f64 {
    l_eff * l_eff / (q * q)
}

pub fn radial_potential(x: f64, l_eff: f64, q: f64) -> f64 {
    l_eff * l_eff / (2.0 * (1.0 + q * q * x * x)) + 0.5 * x * x
}

/// Default wall: ten oscillator lengths, or seven beyond the classical
/// turning point of the highest requested level.
pub fn default_x_max(q: f64, l_eff: f64, parity: Parity, n_count: usize) -> f64 {
    let top = parity.global_n(n_count.saturating_sub(1));
    let e_est = top as f64 + 1.5 + sigma(l_eff, q).sqrt();
    (2.0 * e_est).sqrt().max(0.0) + 7.0
}

struct Level {
    energy: f64,
    zdot: f64,
    x: Vec<f64>,
    psi: Vec<f64>,
}

fn solve_grid(q: f64, l_eff: f64, parity: Parity, n_count: usize, points: usize, x_max: f64) -> Vec<Level> {
    let (h, x): (f64, Vec<f64>) = match parity {
        Parity::Antisymmetric => {
            let h = x_max / (points as f64 + 1.0);
            (h, (1..=points).map(|i| i as f64 * h).collect())
        }
        Parity::Symmetric => {
            // cell-centred so that the mirror ghost ψ0 = ψ1 sits at -h/2
            let h = x_max / (points as f64 + 0.5);
            (h, (1..=points).map(|i| (i as f64 - 0.5) * h).collect())
        }
    };
    let k = 1.0 / (h * h);
    let mut diag: Vec<f64> = x.iter().map(|&xi| k + radial_potential(xi, l_eff, q)).collect();
    if parity == Parity::Symmetric {
        diag[0] -= 0.5 * k;
    }
    let off = vec![-0.5 * k; points - 1];
    let t = SymTridiagonal::new(diag, off);
    t.lowest_eigenpairs(n_count)
        .into_iter()
        .map(|(energy, v)| {
            let scale = 1.0 / h.sqrt();
            let psi: Vec<f64> = v.iter().map(|c| c * scale).collect();
            let zdot = l_eff * h * x.iter().zip(&psi).map(|(xi, p)| p * p / (1.0 + q * q * xi * xi)).sum::<f64>();
            Level { energy, zdot, x: x.clone(), psi }
        })
        .collect()
}

/// Lowest `n_count` radial eigenstates of one parity sector.
///
/// Energies and `⟨ż⟩` are extrapolated from `points` and `2·points`
/// grids. On either grid `⟨ż⟩ = -∂E/∂φ` holds exactly, so the extrapolated
/// pair keeps that relation to fourth order in the spacing.
pub fn eigensolve(
    q: f64,
    l: i64,
    phi: f64,
    parity: Parity,
    n_count: usize,
    grid: &QuantumGrid,
) -> Result<Vec<EigenSolution>> {
    crate::error::require_positive("q", q)?;
    if !phi.is_finite() {
        return Err(Error::InvalidParameter { name: "phi", reason: "must be finite".into() });
    }
    if n_count == 0 {
        return Err(Error::InvalidParameter { name: "n_count", reason: "must be >= 1".into() });
    }
    if grid.points < 16 {
        return Err(Error::InvalidParameter { name: "points", reason: format!("need >= 16, got {}", grid.points) });
    }
    let l_eff = l as f64 - phi;
    let x_max = match grid.x_max {
        Some(x) => {
            crate::error::require_positive("x_max", x)?;
            x
        }
        None => default_x_max(q, l_eff, parity, n_count).max(10.0),
    };
    if n_count > grid.points / 8 {
        return Err(Error::GridTooSmall { level: n_count - 1, energy: f64::NAN, x_max });
    }
    let coarse = solve_grid(q, l_eff, parity, n_count, grid.points, x_max);
    let fine = solve_grid(q, l_eff, parity, n_count, 2 * grid.points, x_max);
    let mut out = Vec::with_capacity(n_count);
    for (n, (c, f)) in coarse.into_iter().zip(fine).enumerate() {
        if (2.0 * f.energy).sqrt() + 5.0 > x_max {
            return Err(Error::GridTooSmall { level: n, energy: f.energy, x_max });
        }
        let energy = (4.0 * f.energy - c.energy) / 3.0;
        let zdot = (4.0 * f.zdot - c.zdot) / 3.0;
        out.push(EigenSolution {
            n,
            l,
            phi,
            q,
            parity,
            energy,
            zdot,
            grid_change: (energy - f.energy).abs(),
            x_max,
            x: f.x,
            psi: f.psi,
        });
    }
    Ok(out)
}

/// `E = 2n + 1 + sqrt(σ + ¼)`, exact for the inverse-square potential.
pub fn analytic_spectrum(n: usize, l: i64, phi: f64, q: f64) -> f64 {
    2.0 * n as f64 + 1.0 + (sigma(l as f64 - phi, q) + 0.25).sqrt()
}

/// `⟨ż⟩ = sign(l - φ) (1/q) / sqrt(1 + 1/4σ)`
pub fn analytic_zdot(l: i64, phi: f64, q: f64) -> f64 {
    let d = l as f64 - phi;
    if d == 0.0 {
        return 0.0;
    }
    let s = sigma(d, q);
    d.signum() / q / (1.0 + 0.25 / s).sqrt()
}

/// `s = (1 + sqrt(1 + 4σ)) / 4`
pub fn wavefunction_exponent(sigma: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * sigma).sqrt()) / 4.0
}

/// Normalized eigenfunction of the inverse-square problem,
/// `ψ = sqrt(2 n! / Γ(n + 2s + ½)) ρ^s e^{-ρ/2} L_n^{2s-½}(ρ)` with `ρ = x²`.
pub fn wavefunction_analytic(n: usize, sigma: f64, x: f64) -> f64 {
    let s = wavefunction_exponent(sigma);
    let rho = x * x;
    let a = 2.0 * s - 0.5;
    let ln_norm = 0.5 * (2f64.ln() + ln_gamma(n as f64 + 1.0) - ln_gamma(n as f64 + a + 1.0));
    if rho == 0.0 {
        return 0.0;
    }
    (ln_norm + s * rho.ln() - 0.5 * rho).exp() * laguerre(n, a, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemiclassicalLevel {
    pub n: usize,
    pub energy: f64,
    /// Well minimum `sqrt(σ)` of the inverse-square potential.
    pub v_min: f64,
}

/// `∮ p dx` for `V = σ/2x² + x²/2` at energy `E`.
pub fn bohr_sommerfeld_action(energy: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::NoTurningPoints(format!("sigma = {sigma} leaves no inner turning point")));
    }
    let v_min = sigma.sqrt();
    if energy < v_min {
        return Err(Error::NoTurningPoints(format!("energy {energy} below well minimum {v_min}")));
    }
    let disc = (energy * energy - sigma).max(0.0).sqrt();
    let x1 = (energy - disc).max(0.0).sqrt();
    let x2 = (energy + disc).sqrt();
    if x2 - x1 <= 0.0 {
        return Ok(0.0);
    }
    let (mid, half) = (0.5 * (x1 + x2), 0.5 * (x2 - x1));
    let r = quad::integrate(
        |th| {
            let x = mid - half * th.cos();
            let v = 0.5 * sigma / (x * x) + 0.5 * x * x;
            (2.0 * (energy - v)).max(0.0).sqrt() * half * th.sin()
        },
        0.0,
        PI,
        Tolerance::new(1e-13, 1e-12),
    )?;
    Ok(2.0 * r.value)
}

/// Bohr-Sommerfeld level `∮ p dx = 2π(n + ½)` for effective momentum `l - φ`.
pub fn semiclassical_spectrum(l_eff: f64, q: f64, n: usize) -> Result<SemiclassicalLevel> {
    crate::error::require_positive("q", q)?;
    let s = sigma(l_eff, q);
    let v_min = s.sqrt();
    let target = 2.0 * PI * (n as f64 + 0.5);
    let f = |e: f64| bohr_sommerfeld_action(e, s).map(|a| a - target);
    let mut lo = v_min;
    let mut hi = v_min + 1.0;
    while f(hi)? < 0.0 {
        hi = v_min + 2.0 * (hi - v_min);
        if hi > 1e12 {
            return Err(Error::Root("action never reaches target".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(SemiclassicalLevel { n, energy: 0.5 * (lo + hi), v_min })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxPoint {
    pub phi: f64,
    pub l_min: i64,
    pub parity: Parity,
    pub energy: f64,
    pub zdot: f64,
}

/// Ground state over `l_range` and both parities at each flux value.
/// Results come back in grid order whatever the thread count.
pub fn flux_scan(q: f64, phi_grid: &[f64], l_range: RangeInclusive<i64>, grid: &QuantumGrid) -> Result<Vec<FluxPoint>> {
    if l_range.is_empty() {
        return Err(Error::InvalidParameter { name: "l_range", reason: "empty".into() });
    }
    phi_grid.par_iter().map(|&phi| flux_point(q, phi, l_range.clone(), grid)).collect()
}

fn flux_point(q: f64, phi: f64, l_range: RangeInclusive<i64>, grid: &QuantumGrid) -> Result<FluxPoint> {
    let (lo, hi) = (*l_range.start(), *l_range.end());
    let mut best: Option<FluxPoint> = None;
    for l in l_range {
        for parity in [Parity::Symmetric, Parity::Antisymmetric] {
            let s = &eigensolve(q, l, phi, parity, 1, grid)?[0];
            if best.map_or(true, |b| s.energy < b.energy) {
                best = Some(FluxPoint { phi, l_min: l, parity, energy: s.energy, zdot: s.zdot });
            }
        }
    }
    let best = best.expect("non-empty range");
    if hi > lo && (best.l_min == lo || best.l_min == hi) {
        return Err(Error::LRangeTooNarrow { l: best.l_min, phi });
    }
    Ok(best)
}

/// `(⟨z(0)²⟩, ⟨z(0)⟩⟨ż(0)⟩)` for a plane wave in `z ∈ [0, 2π)`.
pub fn correlation_slope(sol: &EigenSolution) -> (f64, f64) {
    (4.0 * PI * PI / 3.0, PI * sol.zdot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> QuantumGrid {
        QuantumGrid { points: 2000, x_max: None }
    }

    #[test]
    fn free_oscillator_levels() {
        let sym = eigensolve(10.0, 0, 0.0, Parity::Symmetric, 3, &quick()).unwrap();
        let anti = eigensolve(10.0, 0, 0.0, Parity::Antisymmetric, 3, &quick()).unwrap();
        for n in 0..3 {
            assert!((sym[n].energy - (2 * n) as f64 - 0.5).abs() < 1e-8, "{}", sym[n].energy);
            assert!((anti[n].energy - (2 * n) as f64 - 1.5).abs() < 1e-8, "{}", anti[n].energy);
            assert_eq!(sym[n].zdot, 0.0);
        }
    }

    #[test]
    fn normalization_and_boundary_conditions() {
        let sym = eigensolve(10.0, 4, 0.3, Parity::Symmetric, 2, &quick()).unwrap();
        let anti = eigensolve(10.0, 4, 0.3, Parity::Antisymmetric, 2, &quick()).unwrap();
        for s in sym.iter().chain(&anti) {
            assert!((s.norm() - 1.0).abs() < 1e-10);
        }
        // ghost-point mirror: the one-sided slope at the wall shrinks linearly with h
        let slope = |g: usize| {
            let s = &eigensolve(10.0, 4, 0.3, Parity::Symmetric, 1, &QuantumGrid { points: g, x_max: None }).unwrap()[0];
            (s.psi[1] - s.psi[0]) / s.spacing()
        };
        let ratio = slope(1000) / slope(2000);
        assert!((ratio - 2.0).abs() < 0.05, "{ratio}");
        // linear extrapolation of the antisymmetric state to 0
        let a = &anti[0];
        let at0 = 2.0 * a.psi[0] - a.psi[1];
        assert!(at0.abs() < 1e-5, "{at0}");
        assert!(sym[0].energy < sym[1].energy && anti[0].energy < anti[1].energy);
    }

    #[test]
    fn analytic_spectrum_values() {
        assert_eq!(analytic_spectrum(0, 0, 0.0, 10.0), 1.5);
        assert!((analytic_spectrum(1, 10, 0.0, 10.0) - (3.0 + 1.25f64.sqrt())).abs() < 1e-15);
        assert_eq!(analytic_spectrum(2, 5, 0.25, 7.0), analytic_spectrum(2, 6, 1.25, 7.0));
    }

    #[test]
    fn analytic_zdot_values() {
        assert_eq!(analytic_zdot(3, 3.0, 10.0), 0.0);
        assert!((analytic_zdot(1, 0.0, 10.0) - 0.1 / 26f64.sqrt()).abs() < 1e-15);
        assert!((analytic_zdot(1_000_000, 0.0, 10.0) - 0.1).abs() < 1e-11);
        assert!(analytic_zdot(-2, 0.0, 10.0) < 0.0);
        let mut prev = 0.0;
        for l in 1..60 {
            let z = analytic_zdot(l, 0.0, 10.0);
            assert!(z > prev && z < 0.1);
            prev = z;
        }
    }

    #[test]
    fn wavefunction_ground_state_without_barrier() {
        // σ = 0, n = 0 is the first odd oscillator state on the half-line
        let c = (4.0 / PI.sqrt()).sqrt();
        for x in [0.1, 0.7, 2.0] {
            let want = c * x * (-0.5 * x * x).exp();
            assert!((wavefunction_analytic(0, 0.0, x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn wavefunction_normalization_and_inverse_square_moment() {
        for (n, s) in [(0, 0.3), (2, 1.0), (4, 7.5)] {
            let norm = quad::integrate_to_infinity(|x| wavefunction_analytic(n, s, x).powi(2), 0.0, Tolerance::default())
                .unwrap()
                .value;
            assert!((norm - 1.0).abs() < 1e-8, "{n} {s} {norm}");
            let m = quad::integrate_to_infinity(
                |x| if x == 0.0 { 0.0 } else { wavefunction_analytic(n, s, x).powi(2) / (x * x) },
                0.0,
                Tolerance::default(),
            )
            .unwrap()
            .value;
            assert!((m - 2.0 / (1.0 + 4.0 * s).sqrt()).abs() < 1e-8, "{n} {s} {m}");
        }
    }

    #[test]
    fn semiclassical_ladder() {
        for n in 0..4 {
            let lvl = semiclassical_spectrum(30.0, 10.0, n).unwrap();
            assert!((lvl.energy - lvl.v_min - (2 * n + 1) as f64).abs() < 1e-9, "{lvl:?}");
        }
        assert_eq!(bohr_sommerfeld_action(3.0, 9.0).unwrap(), 0.0);
        assert!(matches!(bohr_sommerfeld_action(1.0, 0.0), Err(Error::NoTurningPoints(_))));
        assert!(matches!(semiclassical_spectrum(0.0, 10.0, 0), Err(Error::NoTurningPoints(_))));
    }

    #[test]
    fn correlation_slope_is_pi_zdot() {
        let s = &eigensolve(10.0, 2, 0.0, Parity::Symmetric, 1, &quick()).unwrap()[0];
        let (off, slope) = correlation_slope(s);
        assert_eq!(off, 4.0 * PI * PI / 3.0);
        assert_eq!(slope / PI, s.zdot);
    }

    #[test]
    fn flux_scan_narrow_range_is_rejected() {
        let r = flux_scan(10.0, &[0.2], 0..=1, &quick());
        assert!(matches!(r, Err(Error::LRangeTooNarrow { l: 0, .. })));
    }

    #[test]
    fn grid_too_small_is_reported() {
        let g = QuantumGrid { points: 2000, x_max: Some(4.0) };
        assert!(matches!(eigensolve(10.0, 0, 0.0, Parity::Symmetric, 2, &g), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn parity_labels() {
        assert_eq!(Parity::Symmetric.global_n(2), 4);
        assert_eq!(Parity::Antisymmetric.global_n(0), 1);
        assert_eq!("odd".parse::<Parity>().unwrap(), Parity::Antisymmetric);
        assert!("sideways".parse::<Parity>().is_err());
    }
}
