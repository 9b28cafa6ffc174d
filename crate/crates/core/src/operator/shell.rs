//! Shell averages A(r) = ⨍_{S^{n-1}} f(x - rθ) dσ(θ) of a single field.

use std::f64::consts::PI;
use std::sync::Arc;

use super::interp::{knots_with, Pchip};
use crate::error::Result;
use crate::field::{Field, FieldKind};
use crate::quadrature::{gauss_legendre, panel_edges, sphere_rule, JacobiRule, SphereRule};
use crate::special::{ln_beta, reg_inc_beta};

#[derive(Debug, Clone)]
pub(crate) struct ShellOptions {
    pub angular_order: usize,
    pub memo_samples: usize,
    pub grid_sphere_degree: usize,
}

#[derive(Debug, Clone)]
enum Kind {
    Constant(f64),
    Ball { d: f64, radius: f64 },
    /// n = 1: the average of the two points x ± r.
    Pair,
    Radial { d: f64, legendre: JacobiRule, ln_norm: f64, profile_kinks: Vec<f64>, support: f64 },
    Sphere(Arc<SphereRule>),
}

#[derive(Debug, Clone)]
pub(crate) struct Shell {
    field: Field,
    x: Vec<f64>,
    n: usize,
    kind: Kind,
    /// A vanishes outside [lo, hi].
    pub lo: f64,
    pub hi: f64,
    /// Radii where A is not smooth (support edges included).
    pub kinks: Vec<f64>,
    memo: Option<Pchip>,
}

impl Shell {
    /// Shell average of `field` about `x`; memoized up to `r_top` when the
    /// direct evaluation is a quadrature.
    pub fn new(field: &Field, x: &[f64], r_top: f64, opts: &ShellOptions) -> Result<Self> {
        let n = field.dim();
        let dist = |c: &[f64]| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let (kind, lo, hi, kinks) = match field.kind() {
            FieldKind::Constant { .. } => {
                let v = field.value(x);
                (Kind::Constant(v), 0.0, f64::INFINITY, vec![])
            }
            FieldKind::Grid(_) => {
                let (c, rb) = field.support_ball().unwrap();
                let d = dist(&c);
                let kind = if n == 1 {
                    Kind::Pair
                } else {
                    Kind::Sphere(Arc::new(sphere_rule(n, opts.grid_sphere_degree)?))
                };
                (kind, (d - rb).max(0.0), d + rb, vec![])
            }
            _ => {
                let info = field.radial().unwrap();
                let d = dist(info.center);
                let support = info.support.unwrap();
                let mut kinks: Vec<f64> = info.kinks.iter().flat_map(|&k| [(d - k).abs(), d + k]).collect();
                kinks.extend([(d - support).abs(), d + support]);
                let kind = match field.kind() {
                    FieldKind::BallIndicator { radius, .. } if field.cap().map_or(true, |c| c >= 1.0) => {
                        Kind::Ball { d, radius: *radius }
                    }
                    _ if n == 1 => Kind::Pair,
                    _ => Kind::Radial {
                        d,
                        legendre: gauss_legendre(opts.angular_order)?,
                        ln_norm: ln_beta((n as f64 - 1.0) / 2.0, 0.5),
                        profile_kinks: info.kinks.clone(),
                        support,
                    },
                };
                (kind, (d - support).max(0.0), d + support, kinks)
            }
        };
        let mut kinks: Vec<f64> = kinks.into_iter().filter(|k| k.is_finite()).collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        let mut shell = Shell { field: field.clone(), x: x.to_vec(), n, kind, lo, hi, kinks, memo: None };
        // centered radial fields need a single profile value per radius
        let centered = matches!(shell.kind, Kind::Radial { d, .. } if d == 0.0);
        if matches!(shell.kind, Kind::Radial { .. } | Kind::Sphere(_)) && !centered {
            let top = hi.min(r_top);
            if top > lo {
                let xs = knots_with(lo, top, opts.memo_samples, &shell.kinks);
                let ys = xs.iter().map(|&r| shell.direct(r)).collect();
                shell.memo = Some(Pchip::new(xs, ys));
            }
        }
        Ok(shell)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r < self.lo || r > self.hi {
            return 0.0;
        }
        match &self.memo {
            Some(p) if r <= p.hi() => p.eval(r),
            _ => self.direct(r),
        }
    }

    /// A(r) without memoization.
    pub fn direct(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Constant(v) => *v,
            Kind::Ball { d, radius } => ball_shell_fraction(*d, *radius, r, self.n),
            Kind::Pair => {
                let a = self.field.value(&[self.x[0] - r]);
                let b = self.field.value(&[self.x[0] + r]);
                0.5 * (a + b)
            }
            Kind::Radial { d, legendre, ln_norm, profile_kinks, support } => {
                self.radial_direct(*d, r, legendre, *ln_norm, profile_kinks, *support)
            }
            Kind::Sphere(rule) => {
                let mut y = vec![0.0; self.n];
                let total = rule.integrate(|th| {
                    for (a, yv) in y.iter_mut().enumerate() {
                        *yv = self.x[a] - r * th[a];
                    }
                    self.field.value(&y)
                });
                total / rule.weights.iter().sum::<f64>()
            }
        }
    }

    /// (1/Z) ∫₀^π φ(ρ(θ)) sin^{n-2}θ dθ with ρ² = d² + r² - 2dr cos θ, split
    /// at the angles where ρ crosses a kink radius of the profile.
    fn radial_direct(
        &self,
        d: f64,
        r: f64,
        legendre: &JacobiRule,
        ln_norm: f64,
        profile_kinks: &[f64],
        support: f64,
    ) -> f64 {
        let f = &self.field;
        if r == 0.0 || d <= 1e-15 * r {
            return f.profile((d * d + r * r).sqrt());
        }
        let theta_at = |k: f64| crossing_angle(d, r, k);
        let hi = match theta_at(support) {
            Crossing::Angle(t) => t,
            Crossing::Never => 0.0,
            Crossing::Always => PI,
        };
        if hi <= 0.0 {
            return 0.0;
        }
        let cuts = profile_kinks.iter().filter_map(|&k| match theta_at(k) {
            Crossing::Angle(t) => Some(t),
            _ => None,
        });
        let edges = panel_edges(0.0, hi, cuts);
        let power = self.n as i32 - 2;
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            for (&v, &wt) in legendre.nodes.iter().zip(&legendre.weights) {
                let th = a + (b - a) * v;
                let rho2 = d * d + r * r - 2.0 * d * r * th.cos();
                acc += 2.0 * half * wt * f.profile(rho2.max(0.0).sqrt()) * th.sin().powi(power);
            }
        }
        acc / ln_norm.exp()
    }
}

enum Crossing {
    Angle(f64),
    /// ρ(θ) ≤ k for every θ.
    Always,
    /// ρ(θ) > k for every θ > 0.
    Never,
}

/// Angle θ* ∈ (0, π) with ρ(θ*) = k, computed from the factored forms of
/// 1 ∓ cos θ* to keep thin caps accurate.
fn crossing_angle(d: f64, r: f64, k: f64) -> Crossing {
    let one_minus = (k - d + r) * (k + d - r) / (2.0 * d * r);
    let one_plus = (d + r - k) * (d + r + k) / (2.0 * d * r);
    if one_minus <= 0.0 {
        Crossing::Never
    } else if one_plus <= 0.0 {
        Crossing::Always
    } else {
        Crossing::Angle(2.0 * one_minus.sqrt().atan2(one_plus.sqrt()))
    }
}

/// Fraction of the sphere of radius r about a point at distance d from the
/// center of a ball of the given radius that lies in the closed ball.
pub fn ball_shell_fraction(d: f64, radius: f64, r: f64, n: usize) -> f64 {
    if r == 0.0 || d == 0.0 {
        return f64::from((d + r) <= radius);
    }
    if n == 1 {
        return 0.5 * (f64::from((d - r).abs() <= radius) + f64::from(d + r <= radius));
    }
    let one_minus = (radius - d + r) * (radius + d - r) / (2.0 * d * r);
    let one_plus = (d + r - radius) * (d + r + radius) / (2.0 * d * r);
    if one_minus <= 0.0 {
        return 0.0;
    }
    if one_plus <= 0.0 {
        return 1.0;
    }
    match n {
        2 => 2.0 * one_minus.sqrt().atan2(one_plus.sqrt()) / PI,
        3 => 0.5 * one_minus,
        _ => {
            let a = (n as f64 - 1.0) / 2.0;
            reg_inc_beta(0.5 * one_minus, a, a)
        }
    }
}
