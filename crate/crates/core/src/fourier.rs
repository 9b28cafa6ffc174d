//! Fourier-side evaluation of S_{α,t} for radial functions (m = 1), used as an
//! independent oracle for the space-side averages.
//!
//! With f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx,
//!
//!   S_{α,t} f(x) = C_{n,α} ∫ f̂(ξ) m_α(tξ) e^{2πi x·ξ} dξ,
//!   m_α(ξ) = J_{n/2-α}(2π|ξ|) / |ξ|^{n/2-α},
//!   C_{n,α} = 2π^α Γ(1-α) / (ω_{n-1} B(n/2, 1-α)),
//!
//! and C_{n,α} m_α(0) = 1, so constants are reproduced.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{usage, Result};
use crate::field::{Field, FieldKind};
use crate::lp::fit_line;
use crate::quadrature::{gauss_legendre, panel_edges, JacobiRule};
use crate::special::{bessel_j_scaled, check_alpha, ln_beta, ln_gamma, ln_sphere_measure};

/// Spectra are truncated where |f̂| falls below this fraction of f̂(0).
pub const SPECTRAL_FLOOR: f64 = 1e-13;
pub const MAX_CUTOFF: f64 = 400.0;

/// Panel layout in ρ for spectra and the inverse transform.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralGrid {
    /// Fixed cutoff; `None` extends panels until the spectrum has decayed.
    pub cutoff: Option<f64>,
    pub panel_width: f64,
    pub order: usize,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        SpectralGrid { cutoff: None, panel_width: 0.25, order: 16 }
    }
}

/// f̂ of a radial field sampled at Gauss–Legendre nodes of the ρ panels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSpectrum {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub cutoff: f64,
}

impl RadialSpectrum {
    /// f̂(0) = ∫ f.
    pub fn mass(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// (2π)^ν · J_ν(z)/z^ν at z = 2πv, i.e. J_ν(2πv)/v^ν.
fn scaled_kernel(nu: f64, v: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    two_pi.powf(nu) * bessel_j_scaled(nu, two_pi * v)
}

/// Radius beyond which the profile is negligible in double precision, and
/// extra panel edges for profiles that are not analytic up to their support.
fn effective_radius(field: &Field, support: f64) -> (f64, Vec<f64>) {
    match field.kind() {
        // exp(-42) is below 1e-18
        FieldKind::Gaussian { scale, .. } => ((6.5 * scale).min(support), vec![]),
        // geometric grading toward the essential singularity at the rim; the
        // bump is below 1e-27 beyond R(1 - 2^-7)
        FieldKind::Bump { radius, .. } => {
            let edges = (1..7).map(|k| radius * (1.0 - 0.5f64.powi(k))).collect();
            (radius * (1.0 - 0.5f64.powi(7)), edges)
        }
        _ => (support, vec![]),
    }
}

struct RadialTransform {
    n: usize,
    edges: Vec<f64>,
    legendre: JacobiRule,
    nu: f64,
}

impl RadialTransform {
    fn new(field: &Field) -> Result<Self> {
        let info = match field.radial() {
            Some(info) if info.center.iter().all(|&c| c == 0.0) => info,
            _ => return usage(format!("radial_fourier needs a radial field centered at the origin, got {field}")),
        };
        let (support, grading) = match info.support {
            Some(s) => effective_radius(field, s),
            None => return usage(format!("radial_fourier needs an integrable field, got {field}")),
        };
        let n = field.dim();
        if n < 2 {
            return usage("radial_fourier needs n >= 2");
        }
        let edges = panel_edges(0.0, support, info.kinks.iter().copied().chain(grading));
        Ok(RadialTransform { n, edges, legendre: gauss_legendre(24)?, nu: n as f64 / 2.0 - 1.0 })
    }

    /// f̂(ρ) = (2π)^{n/2} ∫ f(r) r^{n-1} Ĵ(2πρr) dr with Ĵ(z) = J_{n/2-1}(z)/z^{n/2-1},
    /// that is 2π ∫ f(r) r^{n-1} J_{n/2-1}(2πρr)/(ρr)^{n/2-1} dr.
    fn eval(&self, field: &Field, rho: f64) -> f64 {
        let mut acc = 0.0;
        // about one oscillation per sub-panel
        let width = 1.0 / rho.max(1.0);
        for w in self.edges.windows(2) {
            let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / pieces as f64;
            for j in 0..pieces {
                let a = w[0] + j as f64 * h;
                for (&u, &wt) in self.legendre.nodes.iter().zip(&self.legendre.weights) {
                    let r = a + h * u;
                    let f = field.profile(r);
                    if f != 0.0 {
                        acc += h * wt * f * r.powi(self.n as i32 - 1) * scaled_kernel(self.nu, rho * r);
                    }
                }
            }
        }
        2.0 * std::f64::consts::PI * acc
    }
}

/// f̂ of a radial field on the panels of `grid`.
pub fn radial_fourier(field: &Field, grid: &SpectralGrid) -> Result<RadialSpectrum> {
    if !(grid.panel_width > 0.0) || grid.order == 0 {
        return usage("spectral grid needs a positive panel width and order");
    }
    let n = field.dim();
    let rule = gauss_legendre(grid.order)?;
    if field.is_zero() {
        let cutoff = grid.cutoff.unwrap_or(grid.panel_width);
        return Ok(RadialSpectrum { n, nodes: vec![0.0], weights: vec![0.0], values: vec![0.0], cutoff });
    }
    let tr = RadialTransform::new(field)?;
    let f0 = tr.eval(field, 0.0);
    let panel = |k: usize| -> Vec<(f64, f64, f64)> {
        let a = k as f64 * grid.panel_width;
        let h = grid.panel_width;
        let nodes: Vec<(f64, f64)> =
            rule.nodes.iter().zip(&rule.weights).map(|(&u, &w)| (a + h * u, h * w)).collect();
        nodes.par_iter().map(|&(rho, w)| (rho, w, tr.eval(field, rho))).collect()
    };
    // the first entry carries ρ = 0 with zero weight so that `mass` is exact
    let mut out = vec![(0.0, 0.0, f0)];
    let mut k = 0;
    let mut quiet = 0;
    loop {
        let end = (k + 1) as f64 * grid.panel_width;
        if let Some(c) = grid.cutoff {
            if k as f64 * grid.panel_width >= c - 1e-12 {
                break;
            }
        }
        let p = panel(k);
        let small = p.iter().all(|q| q.2.abs() <= SPECTRAL_FLOOR * f0.abs());
        out.extend(p);
        k += 1;
        if grid.cutoff.is_none() {
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 4 {
                break;
            }
            if end >= MAX_CUTOFF {
                return usage(format!(
                    "spectrum of {field} has not decayed below {SPECTRAL_FLOOR:e} of its mass by rho = {MAX_CUTOFF}; give an explicit cutoff"
                ));
            }
        }
    }
    let cutoff = k as f64 * grid.panel_width;
    Ok(RadialSpectrum {
        n,
        nodes: out.iter().map(|q| q.0).collect(),
        weights: out.iter().map(|q| q.1).collect(),
        values: out.iter().map(|q| q.2).collect(),
        cutoff,
    })
}

/// m_α(ρ) = J_{n/2-α}(2πρ)/ρ^{n/2-α}, continuous at ρ = 0.
pub fn multiplier(alpha: f64, n: usize, rho: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return usage("dimension must be positive");
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return usage(format!("multiplier needs a finite rho >= 0, got {rho}"));
    }
    Ok(scaled_kernel(n as f64 / 2.0 - alpha, rho))
}

/// 2π^α Γ(1-α) / (ω_{n-1} B(n/2, 1-α)).
pub fn fourier_prefactor(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let pi = std::f64::consts::PI;
    Ok((std::f64::consts::LN_2 + alpha * pi.ln() + ln_gamma(1.0 - alpha)
        - ln_sphere_measure(n)
        - ln_beta(n as f64 / 2.0, 1.0 - alpha))
    .exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierValue {
    pub value: f64,
    /// Contribution of the last fifth of the spectrum, a proxy for truncation.
    pub error_estimate: f64,
}

/// S_{α,t} f(x) from the spectrum of a radial f; only |x| matters.
pub fn s_alpha_fourier(spectrum: &RadialSpectrum, alpha: f64, t: f64, x: &[f64]) -> Result<FourierValue> {
    check_alpha(alpha)?;
    if !(t > 0.0) || !t.is_finite() {
        return usage(format!("scale t must be finite and positive, got {t}"));
    }
    if x.len() != spectrum.n {
        return usage(format!("point has dimension {}, spectrum has {}", x.len(), spectrum.n));
    }
    let n = spectrum.n;
    let u = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nu_m = n as f64 / 2.0 - alpha;
    let nu_x = n as f64 / 2.0 - 1.0;
    let c = fourier_prefactor(n, alpha)?;
    let tail_from = 0.8 * spectrum.cutoff;
    let (mut total, mut tail) = (0.0, 0.0);
    for ((&rho, &w), &f) in spectrum.nodes.iter().zip(&spectrum.weights).zip(&spectrum.values) {
        // ∫_{S^{n-1}} e^{2πi ρu θ₁} dσ = (2π)^{n/2} Ĵ_{n/2-1}(2πρu)
        let angular = 2.0 * std::f64::consts::PI * scaled_kernel(nu_x, rho * u);
        let v = w * f * scaled_kernel(nu_m, t * rho) * angular * rho.powi(n as i32 - 1);
        total += v;
        if rho >= tail_from {
            tail += v;
        }
    }
    Ok(FourierValue { value: c * total, error_estimate: (c * tail).abs() })
}

/// Log-log fit of the local maxima of |m_α| over [ρ_lo, ρ_hi].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub alpha: f64,
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    /// -((n+1)/2 - α).
    pub target: f64,
    pub maxima: usize,
}

pub fn envelope_slope(alpha: f64, n: usize, rho_lo: f64, rho_hi: f64) -> Result<EnvelopeFit> {
    check_alpha(alpha)?;
    if !(rho_lo > 0.0) || !(rho_hi > rho_lo) {
        return usage(format!("envelope range must satisfy 0 < lo < hi, got [{rho_lo}, {rho_hi}]"));
    }
    let h = 1.0 / 64.0;
    let count = ((rho_hi - rho_lo) / h).ceil() as usize;
    let vals: Vec<f64> = (0..=count)
        .into_par_iter()
        .map(|i| multiplier(alpha, n, rho_lo + i as f64 * h).map(f64::abs))
        .collect::<Result<_>>()?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 1..count {
        let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
        if b > a && b >= c {
            // vertex of the parabola through the three samples
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let peak = b - 0.25 * (a - c) * shift;
            xs.push((rho_lo + (i as f64 + shift) * h).ln());
            ys.push(peak.ln());
        }
    }
    if xs.len() < 2 {
        return usage("envelope range too short to contain two maxima");
    }
    let (slope, intercept) = fit_line(&xs, &ys);
    Ok(EnvelopeFit { alpha, n, slope, intercept, target: -((n as f64 + 1.0) / 2.0 - alpha), maxima: xs.len() })
}
