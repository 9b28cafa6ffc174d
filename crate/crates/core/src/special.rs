//! Gamma, Beta and Bessel functions together with the sphere/ball measure
//! constants and the normalizations of the weighted ball averages.
//!
//! Everything that involves products of Gamma values is assembled in log
//! space and exponentiated once, so ambient dimensions up to a few hundred
//! stay finite.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) without argument checks; `x` must be positive.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx), with 1-x > 1/2
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln Γ(x) for x > 0.
pub fn gamma_ln(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_ln requires a finite positive argument, got {x}"));
    }
    Ok(ln_gamma(x))
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!("beta requires positive arguments, got ({a}, {b})"));
    }
    Ok(ln_beta(a, b).exp())
}

/// Surface measure of S^{κ-1} and volume of the unit ball in R^κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureConstants {
    pub kappa: usize,
    pub omega: f64,
    pub vol: f64,
}

pub(crate) fn ln_sphere_measure(kappa: usize) -> f64 {
    let h = kappa as f64 / 2.0;
    std::f64::consts::LN_2 + h * PI.ln() - ln_gamma(h)
}

pub(crate) fn ln_ball_volume(kappa: usize) -> f64 {
    let h = kappa as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0)
}

pub fn measure_constants(kappa: usize) -> Result<MeasureConstants> {
    if kappa == 0 {
        return domain("measure_constants requires kappa >= 1");
    }
    Ok(MeasureConstants {
        kappa,
        omega: ln_sphere_measure(kappa).exp(),
        vol: ln_ball_volume(kappa).exp(),
    })
}

/// Normalization c_{mn,α} = 2 / (ω_{mn-1} B(mn/2, 1-α)) of the weighted
/// ball average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstant {
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub value: f64,
}

pub(crate) fn ln_norm_constant(kappa: usize, alpha: f64) -> f64 {
    std::f64::consts::LN_2 - ln_sphere_measure(kappa) - ln_beta(kappa as f64 / 2.0, 1.0 - alpha)
}

pub fn norm_constant(m: usize, n: usize, alpha: f64) -> Result<NormConstant> {
    if m == 0 || n == 0 {
        return domain("norm_constant requires m, n >= 1");
    }
    check_alpha(alpha)?;
    Ok(NormConstant {
        m,
        n,
        alpha,
        value: ln_norm_constant(m * n, alpha).exp(),
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return domain(format!(
            "alpha must lie in [0, 1) (B(mn/2, 1-alpha) has a pole at alpha = 1), got {alpha}"
        ));
    }
    Ok(())
}

/// ln ‖φ‖_{L¹(R^{(m-1)n})} for φ(y) = (1-|y|²)_+^{n/2-α}.
pub(crate) fn ln_majorant_l1(kappa_blocks: usize, n: usize, alpha: f64) -> f64 {
    let k = kappa_blocks * n;
    ln_sphere_measure(k) - std::f64::consts::LN_2
        + ln_beta(k as f64 / 2.0, n as f64 / 2.0 + 1.0 - alpha)
}

/// ‖φ‖_{L¹} for φ(y) = (1-|y|²)_+^{n/2-α} on R^{blocks·n}.
pub fn majorant_l1(blocks: usize, n: usize, alpha: f64) -> Result<f64> {
    if blocks == 0 || n == 0 {
        return domain("majorant_l1 requires blocks, n >= 1");
    }
    if !(n as f64 / 2.0 + 1.0 - alpha > 0.0) {
        return domain("majorant exponent n/2 - alpha must exceed -1");
    }
    Ok(ln_majorant_l1(blocks, n, alpha).exp())
}

/// Residual |c_{mn,α} · c_{n,α}^{-1} · ‖φ‖_{L¹} − 1| of the slicing normalization.
pub fn slicing_identity_check(m: usize, n: usize, alpha: f64) -> Result<f64> {
    if m < 2 || n < 2 {
        return domain("slicing_identity_check requires m >= 2 and n >= 2");
    }
    check_alpha(alpha)?;
    let ln_product = ln_norm_constant(m * n, alpha) - ln_norm_constant(n, alpha)
        + ln_majorant_l1(m - 1, n, alpha);
    Ok(ln_product.exp_m1().abs())
}

/// Regularized incomplete beta I_x(a, b), by the Lentz continued fraction
/// on whichever tail converges fast.
pub(crate) fn reg_inc_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(1.0 - x, b, a) / b
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..400 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        d = if d.abs() < TINY { 1.0 / TINY } else { 1.0 / d };
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        d = if d.abs() < TINY { 1.0 / TINY } else { 1.0 / d };
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Bessel functions of the first kind

/// Below this argument the ascending series is used.
pub const BESSEL_SERIES_MAX: f64 = 12.0;

/// Arguments at or above `max(20, ν²)` use the Hankel asymptotic expansion.
pub fn bessel_asymptotic_min(nu: f64) -> f64 {
    (nu * nu).max(20.0)
}

/// J_ν(z) for ν ∈ [0, 40], z ∈ [0, 10⁴].
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    if !(0.0..=40.0).contains(&nu) {
        return domain(format!("bessel_j order must lie in [0, 40], got {nu}"));
    }
    if !(0.0..=1.0e4).contains(&z) {
        return domain(format!("bessel_j argument must lie in [0, 1e4], got {z}"));
    }
    Ok(bessel_j_unchecked(nu, z))
}

pub(crate) fn bessel_j_unchecked(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if z <= BESSEL_SERIES_MAX {
        (nu * (0.5 * z).ln() - ln_gamma(nu + 1.0)).exp() * series_sum(nu, z)
    } else if z >= bessel_asymptotic_min(nu) {
        hankel_asymptotic(nu, z)
    } else {
        steed(nu, z)
    }
}

/// J_ν(z) / z^ν, continuous at z = 0 where it equals 1 / (2^ν Γ(ν+1)).
pub fn bessel_j_scaled(nu: f64, z: f64) -> f64 {
    if z <= BESSEL_SERIES_MAX {
        (-nu * std::f64::consts::LN_2 - ln_gamma(nu + 1.0)).exp() * series_sum(nu, z)
    } else {
        bessel_j_unchecked(nu, z) / z.powf(nu)
    }
}

/// Σ_k (−z²/4)^k / (k! (ν+1)_k).
fn series_sum(nu: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf * kf > -q {
            break;
        }
    }
    sum
}

fn hankel_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * z);
        let size = term.abs();
        if size > prev {
            break;
        }
        prev = size;
        // a_k/z^k enters P with sign (-1)^{k/2} for even k, Q with (-1)^{(k-1)/2} for odd k
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if size < 1e-17 {
            break;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Continued-fraction evaluation (CF1 for J'/J, downward recurrence, and
/// the complex CF2 of Steed) for x >= 2.
fn steed(nu: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 1_000_000;

    let nl = (nu - x + 1.5).floor().max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1 (modified Lentz) for f_ν = J'_ν / J_ν
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    // downward recurrence from ν to μ with unnormalized values
    let mut rjl = isign * 1e-30;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq = (J'_μ + iY'_μ) / (J_μ + iY_μ)
    let mut a = 0.25 - xmu * xmu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fct = a * xi / (p * p + q * q);
    let mut cr = br + q * fct;
    let mut ci = bi + p * fct;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fct = a / (cr * cr + ci * ci);
        cr = br + cr * fct;
        ci = bi - ci * fct;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    rjl1 * (rjmu / rjl)
}
