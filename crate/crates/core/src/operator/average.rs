//! Fixed-scale averages built from a ring profile.
//!
//! With κ = mn and I_α(t) = ∫₀¹ G(tr) r^{κ-1} (1-r²)^{-α} dr,
//!
//!   S_{α,t} = 2 I_α(t) / B(κ/2, 1-α),   M_t = (ω_{κ-1}/v_κ) I_0(t),   S_{1,t} = G(t).

use serde::Serialize;

use super::profile::RingProfile;
use crate::error::{domain, usage, Result};
use crate::quadrature::{gauss_legendre, jacobi_rule, panel_edges, stretched_panel, JacobiRule};
use crate::special::{check_alpha, ln_ball_volume, ln_beta, ln_sphere_measure};

/// Which average of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "operator", content = "alpha", rename_all = "snake_case")]
pub enum Operator {
    /// The ball average M_t.
    HardyLittlewood,
    /// The weighted ball average S_{α,t}, 0 ≤ α < 1.
    Alpha(f64),
    /// The sphere average S_{1,t}.
    Spherical,
}

impl Operator {
    /// α = 1 maps to the spherical average.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            return Ok(Operator::Spherical);
        }
        check_alpha(alpha)?;
        Ok(Operator::Alpha(alpha))
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Operator::HardyLittlewood => 0.0,
            Operator::Alpha(a) => *a,
            Operator::Spherical => 1.0,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return usage(format!("scale t must be finite and positive, got {t}"));
    }
    Ok(())
}

/// S^m_{1,t} = G_x(t).
pub fn spherical_average(profile: &RingProfile, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(profile.eval(t))
}

/// Jacobi rule matching `alpha_average` for this profile.
pub fn alpha_rule(profile: &RingProfile, alpha: f64, order: usize) -> Result<JacobiRule> {
    check_alpha(alpha)?;
    jacobi_rule(order, -alpha, (profile.kappa() as f64 - 2.0) / 2.0)
}

fn check_rule(rule: &JacobiRule, a: f64, b: f64) -> Result<()> {
    if (rule.exponent_a - a).abs() > 1e-14 || (rule.exponent_b - b).abs() > 1e-14 {
        return usage(format!(
            "radial rule has exponents ({}, {}), expected ({a}, {b})",
            rule.exponent_a, rule.exponent_b
        ));
    }
    Ok(())
}

/// S^m_{α,t} = (1/B(κ/2, 1-α)) ∫₀¹ G(t√(1-u)) (1-u)^{(κ-2)/2} u^{-α} du by
/// the Gauss–Jacobi rule with exponents (-α, (κ-2)/2).
pub fn alpha_average(profile: &RingProfile, alpha: f64, t: f64, radial_rule: &JacobiRule) -> Result<f64> {
    check_alpha(alpha)?;
    check_t(t)?;
    let kappa = profile.kappa() as f64;
    check_rule(radial_rule, -alpha, (kappa - 2.0) / 2.0)?;
    let sum = radial_rule.integrate(|u| profile.eval(t * (1.0 - u).sqrt()));
    Ok(sum / ln_beta(kappa / 2.0, 1.0 - alpha).exp())
}

/// M^m_t = (1/v_κ) ∫_{B^κ} G(t|y|) dy, written in the same variable as
/// `alpha_average` (rule exponents (0, (κ-2)/2)) but normalized by the ball
/// volume: ∫_{B^κ} g(|y|) dy = (ω_{κ-1}/2) ∫₀¹ g(√(1-u)) (1-u)^{(κ-2)/2} du.
pub fn hl_average(profile: &RingProfile, t: f64, radial_rule: &JacobiRule) -> Result<f64> {
    check_t(t)?;
    let kappa = profile.kappa();
    check_rule(radial_rule, 0.0, (kappa as f64 - 2.0) / 2.0)?;
    let sum = radial_rule.integrate(|u| profile.eval(t * (1.0 - u).sqrt()));
    let scale = (ln_sphere_measure(kappa) - ln_ball_volume(kappa)).exp() / 2.0;
    Ok(scale * sum)
}

/// Panel quadrature for I_α(t) that splits [0, 1] at r = k/t for every kink
/// k of the profile, uses cosine-stretched Legendre panels in the interior and
/// a Gauss–Jacobi panel carrying (1-r)^{-α} at the right end.
#[derive(Debug, Clone)]
pub struct RadialPanels {
    alpha: f64,
    legendre: JacobiRule,
    end: JacobiRule,
}

impl RadialPanels {
    pub fn new(alpha: f64, order: usize) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(RadialPanels { alpha, legendre: gauss_legendre(order)?, end: jacobi_rule(order, 0.0, -alpha)? })
    }

    /// Panels for ∫₀¹ G(tr) r^{κ-1} (1-r²)^e dr with any exponent e > -1.
    pub fn weighted(exponent: f64, order: usize) -> Result<Self> {
        if !(exponent > -1.0) || !exponent.is_finite() {
            return domain(format!("weight exponent must be finite and exceed -1, got {exponent}"));
        }
        Ok(RadialPanels { alpha: -exponent, legendre: gauss_legendre(order)?, end: jacobi_rule(order, 0.0, exponent)? })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.legendre.order
    }

    /// I_α(t).
    pub fn integral(&self, profile: &RingProfile, t: f64) -> f64 {
        if profile.is_zero() {
            return 0.0;
        }
        let kappa = profile.kappa() as i32;
        let alpha = self.alpha;
        let (lo, hi) = profile.support();
        let ra = lo / t;
        if ra >= 1.0 {
            return 0.0;
        }
        let rb = (hi / t).min(1.0);
        let weight = |r: f64| r.powi(kappa - 1) * (1.0 - r * r).powf(-alpha);
        let mut edges = panel_edges(ra, rb, profile.kinks().iter().map(|k| k / t));
        let mut tail = 0.0;
        if rb == 1.0 {
            let last = edges[edges.len() - 2];
            let mid = 0.5 * (last + 1.0);
            let n = edges.len();
            edges[n - 1] = mid;
            let h = 1.0 - mid;
            let scale = h.powf(1.0 - alpha);
            tail = scale
                * self.end.integrate(|v| {
                    let r = mid + h * v;
                    profile.eval(t * r) * r.powi(kappa - 1) * (1.0 + r).powf(-alpha)
                });
        }
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b < 1.0 && 1.0 - b < b - a {
                // nearly singular at b: in w = ln(1 - r) the weight is smooth
                for (w, wt) in stretched_panel((1.0 - b).ln(), (1.0 - a).ln(), &self.legendre) {
                    let r = 1.0 - w.exp();
                    acc += wt * w.exp() * profile.eval(t * r) * weight(r);
                }
            } else {
                for (r, wt) in stretched_panel(a, b, &self.legendre) {
                    acc += wt * profile.eval(t * r) * weight(r);
                }
            }
        }
        acc + tail
    }

    /// S_{α,t} from I_α(t).
    pub fn alpha_average(&self, profile: &RingProfile, t: f64) -> f64 {
        let kappa = profile.kappa() as f64;
        2.0 * self.integral(profile, t) / ln_beta(kappa / 2.0, 1.0 - self.alpha).exp()
    }

    /// M_t from I_0(t); requires α = 0 panels.
    pub fn hl_average(&self, profile: &RingProfile, t: f64) -> f64 {
        debug_assert_eq!(self.alpha, 0.0);
        let kappa = profile.kappa();
        (ln_sphere_measure(kappa) - ln_ball_volume(kappa)).exp() * self.integral(profile, t)
    }
}

/// Evaluates any member of the family at fixed t with panel quadrature.
#[derive(Debug, Clone)]
pub struct Averager {
    op: Operator,
    panels: Option<RadialPanels>,
}

impl Averager {
    pub fn new(op: Operator, order: usize) -> Result<Self> {
        let panels = match op {
            Operator::HardyLittlewood => Some(RadialPanels::new(0.0, order)?),
            Operator::Alpha(a) => {
                if !(0.0..1.0).contains(&a) {
                    return domain(format!("alpha must lie in [0, 1), got {a}"));
                }
                Some(RadialPanels::new(a, order)?)
            }
            Operator::Spherical => None,
        };
        Ok(Averager { op, panels })
    }

    pub fn operator(&self) -> Operator {
        self.op
    }

    pub fn value(&self, profile: &RingProfile, t: f64) -> f64 {
        match (&self.op, &self.panels) {
            (Operator::Spherical, _) => profile.eval(t),
            (Operator::HardyLittlewood, Some(p)) => p.hl_average(profile, t),
            (Operator::Alpha(_), Some(p)) => p.alpha_average(profile, t),
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, FieldTuple};
    use crate::operator::profile::ProfileOptions;

    fn profile(tuple: &FieldTuple, x: &[f64]) -> RingProfile {
        RingProfile::new(tuple, x, ProfileOptions::default()).unwrap()
    }

    fn disk() -> FieldTuple {
        FieldTuple::repeat(Field::unit_ball(2), 1).unwrap()
    }

    #[test]
    fn spherical_examples() {
        let ones = FieldTuple::repeat(Field::constant(1.0, 2).unwrap(), 2).unwrap();
        assert!((spherical_average(&profile(&ones, &[1.0, 1.0]), 2.0).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(spherical_average(&profile(&disk(), &[0.0, 0.0]), 0.5).unwrap(), 1.0);
        let g = FieldTuple::repeat(Field::gaussian(1.0, vec![0.0, 0.0]).unwrap(), 1).unwrap();
        let p = profile(&g, &[0.0, 0.0]);
        for t in [0.3, 1.0, 2.0] {
            assert!((spherical_average(&p, t).unwrap() - (-t * t).exp()).abs() < 1e-14);
        }
        assert!(spherical_average(&p, 0.0).is_err());
    }

    #[test]
    fn alpha_average_disk_examples() {
        let p = profile(&disk(), &[0.0, 0.0]);
        for alpha in [0.0, 0.3, 0.5, 0.9] {
            let rule = alpha_rule(&p, alpha, 64).unwrap();
            for t in [0.2, 0.7, 1.0] {
                let v = alpha_average(&p, alpha, t, &rule).unwrap();
                assert!((v - 1.0).abs() < 1e-13, "alpha={alpha} t={t}: {v}");
            }
        }
        // t = √2, α = 0.5: 1 - (1 - 1/t²)^{1-α}
        let want = 1.0 - 0.5f64.sqrt();
        let panels = RadialPanels::new(0.5, 32).unwrap();
        let got = panels.alpha_average(&p, 2f64.sqrt());
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        let rule = alpha_rule(&p, 0.5, 64).unwrap();
        let rough = alpha_average(&p, 0.5, 2f64.sqrt(), &rule).unwrap();
        assert!((rough - want).abs() < 2e-2);
    }

    #[test]
    fn alpha_average_dense_oracle() {
        // closed-form antiderivative check against a midpoint sum of r(1-r²)^{-α} on [0, 1/t]
        let p = profile(&disk(), &[0.0, 0.0]);
        let (alpha, t) = (0.3, 1.7);
        let k = 2_000_000;
        let b = 1.0 / t;
        let h = b / k as f64;
        let dense: f64 = (0..k).map(|i| {
            let r = (i as f64 + 0.5) * h;
            r * (1.0 - r * r).powf(-alpha)
        }).sum::<f64>() * h;
        let want = 2.0 * dense * (1.0 - alpha);
        let got = RadialPanels::new(alpha, 32).unwrap().alpha_average(&p, t);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn constants_average_to_one() {
        let ones = FieldTuple::repeat(Field::constant(1.0, 3).unwrap(), 2).unwrap();
        let p = profile(&ones, &[0.0, 0.2, 0.0]);
        for alpha in [0.0, 0.5, 0.99] {
            let rule = alpha_rule(&p, alpha, 16).unwrap();
            assert!((alpha_average(&p, alpha, 3.0, &rule).unwrap() - 1.0).abs() < 1e-13);
            let panels = RadialPanels::new(alpha, 16).unwrap();
            assert!((panels.alpha_average(&p, 3.0) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn hl_examples() {
        let p = profile(&disk(), &[0.0, 0.0]);
        let panels = RadialPanels::new(0.0, 32).unwrap();
        for t in [1.0, 1.5, 4.0] {
            assert!((panels.hl_average(&p, t) - 1.0 / (t * t)).abs() < 1e-14);
        }
        let two = FieldTuple::repeat(Field::unit_ball(2), 2).unwrap();
        let q = profile(&two, &[0.0, 0.0]);
        let rule = jacobi_rule(32, 0.0, 1.0).unwrap();
        for t in [0.4, 1.0] {
            assert!((hl_average(&q, t, &rule).unwrap() - 1.0).abs() < 1e-13);
        }
        assert!(hl_average(&q, 1.0, &jacobi_rule(32, 0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn alpha_zero_collapse() {
        let tuples = [
            FieldTuple::repeat(Field::gaussian(1.0, vec![0.3, 0.0]).unwrap(), 2).unwrap(),
            FieldTuple::repeat(Field::unit_ball(2), 2).unwrap(),
        ];
        for tuple in &tuples {
            let p = profile(tuple, &[0.5, -0.2]);
            let a = alpha_rule(&p, 0.0, 64).unwrap();
            for t in [0.3, 1.0, 2.5] {
                let s0 = alpha_average(&p, 0.0, t, &a).unwrap();
                let m = hl_average(&p, t, &a).unwrap();
                assert!((s0 - m).abs() <= 1e-12 * m.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = profile(&disk(), &[0.0, 0.0]);
        let rule = alpha_rule(&p, 0.5, 8).unwrap();
        assert!(alpha_average(&p, 0.3, 1.0, &rule).is_err());
        assert!(alpha_average(&p, 1.5, 1.0, &rule).is_err());
        assert!(alpha_average(&p, 0.5, -1.0, &rule).is_err());
        assert!(Operator::from_alpha(1.2).is_err());
        assert_eq!(Operator::from_alpha(1.0).unwrap(), Operator::Spherical);
    }
}
