//! The ring profile G_x(s) = ⨍_{S^{mn-1}} ∏ f_i(x - sθ_i) dσ(θ).
//!
//! Default engine: for θ uniform on S^{mn-1} the first block has |θ_1| = sin ψ
//! with density ∝ sin^{n-1}ψ cos^{(m-1)n-1}ψ on (0, π/2), and the directions
//! θ_1/|θ_1| and of the remaining blocks are independent and uniform. Hence
//!
//!   G(s) = ∫ A_1(s sin ψ) G'(s cos ψ) p(ψ) dψ,
//!
//! with A_1 the shell average of f_1 and G' the profile of (f_2, …, f_m).
//! Each level is integrated panel-wise between the angles where one of the
//! factors changes smoothness. An alternative engine applies a sphere rule
//! on S^{mn-1} directly.

use std::sync::Arc;

use serde::Serialize;

use super::interp::{knots_with, Pchip};
use super::shell::{Shell, ShellOptions};
use crate::error::{usage, Result};
use crate::field::FieldTuple;
use crate::quadrature::{gauss_legendre, panel_edges, sphere_rule, stretched_panel, JacobiRule, SphereKind, SphereRule};
use crate::special::{ln_beta, ln_sphere_measure};

/// Memo range used when the tuple has unbounded support and no `s_max` is set.
pub const DEFAULT_S_MAX: f64 = 64.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileOptions {
    /// Legendre nodes per ψ panel.
    pub psi_order: usize,
    /// Legendre nodes per polar-angle panel in shell averages.
    pub angular_order: usize,
    /// Uniform knots of every memoized 1-D function.
    pub memo_samples: usize,
    /// Product-rule degree for shell averages of gridded fields.
    pub grid_sphere_degree: usize,
    /// Memoize the profile (and its inner levels) once m reaches this.
    pub memo_from_blocks: usize,
    /// Largest radius the memo must cover for unbounded tuples.
    pub s_max: Option<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            psi_order: 24,
            angular_order: 32,
            memo_samples: 4096,
            grid_sphere_degree: 64,
            memo_from_blocks: 3,
            s_max: None,
        }
    }
}

impl ProfileOptions {
    /// Every resolution parameter halved; used for error estimates.
    pub fn coarse(&self) -> Self {
        ProfileOptions {
            psi_order: (self.psi_order / 2).max(2),
            angular_order: (self.angular_order / 2).max(2),
            memo_samples: (self.memo_samples / 2).max(16),
            grid_sphere_degree: (self.grid_sphere_degree / 2).max(2),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
struct Level {
    lo: f64,
    hi: f64,
    kinks: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Engine {
    Blocks,
    Sphere(Arc<SphereRule>),
}

#[derive(Debug, Clone)]
pub struct RingProfile {
    tuple: FieldTuple,
    x: Vec<f64>,
    opts: ProfileOptions,
    engine: Engine,
    at_zero: f64,
    zero: bool,
    shells: Vec<Shell>,
    /// levels[i] describes the profile of blocks i..m.
    levels: Vec<Level>,
    memos: Vec<Option<Pchip>>,
    psi: JacobiRule,
    ln_density: Vec<f64>,
    ln_omega: f64,
}

/// Profile evaluated with a sphere rule on S^{mn-1}.
pub fn ring_profile(tuple: &FieldTuple, x: &[f64], rule: &SphereRule) -> Result<RingProfile> {
    RingProfile::with_sphere_rule(tuple, x, Arc::new(rule.clone()), ProfileOptions::default())
}

impl RingProfile {
    /// Profile by the block recursion.
    pub fn new(tuple: &FieldTuple, x: &[f64], opts: ProfileOptions) -> Result<Self> {
        Self::build(tuple, x, opts, Engine::Blocks)
    }

    pub fn with_sphere_rule(tuple: &FieldTuple, x: &[f64], rule: Arc<SphereRule>, opts: ProfileOptions) -> Result<Self> {
        let kappa = tuple.m() * tuple.n();
        if rule.kappa != kappa {
            return usage(format!("sphere rule lives on S^{} but m·n = {kappa}", rule.kappa - 1));
        }
        Self::build(tuple, x, opts, Engine::Sphere(rule))
    }

    fn build(tuple: &FieldTuple, x: &[f64], opts: ProfileOptions, engine: Engine) -> Result<Self> {
        let (m, n) = (tuple.m(), tuple.n());
        if x.len() != n {
            return usage(format!("center has {} coordinates, n = {n}", x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return usage("center must be finite");
        }
        if opts.psi_order == 0 || opts.angular_order == 0 || opts.memo_samples < 2 {
            return usage("profile orders must be positive");
        }
        let shell_opts = ShellOptions {
            angular_order: opts.angular_order,
            memo_samples: opts.memo_samples,
            grid_sphere_degree: opts.grid_sphere_degree,
        };
        let bare: Vec<Shell> = tuple
            .fields()
            .iter()
            .map(|f| Shell::new(f, x, 0.0, &shell_opts))
            .collect::<Result<_>>()?;
        let mut levels = vec![Level { lo: 0.0, hi: 0.0, kinks: vec![] }; m];
        levels[m - 1] = Level { lo: bare[m - 1].lo, hi: bare[m - 1].hi, kinks: bare[m - 1].kinks.clone() };
        for i in (0..m - 1).rev() {
            levels[i] = combine(&bare[i], &levels[i + 1]);
        }
        let s_top = if levels[0].hi.is_finite() { levels[0].hi } else { opts.s_max.unwrap_or(DEFAULT_S_MAX) };
        let needs_memo_shells = matches!(engine, Engine::Blocks);
        let shells = if needs_memo_shells {
            tuple
                .fields()
                .iter()
                .map(|f| Shell::new(f, x, s_top, &shell_opts))
                .collect::<Result<_>>()?
        } else {
            bare
        };
        let zero = tuple.any_zero() || levels[0].lo > levels[0].hi;
        let ln_density = (0..m)
            .map(|i| {
                let rest = ((m - 1 - i) * n) as f64;
                if rest == 0.0 {
                    0.0
                } else {
                    std::f64::consts::LN_2 - ln_beta(n as f64 / 2.0, rest / 2.0)
                }
            })
            .collect();
        let mut profile = RingProfile {
            tuple: tuple.clone(),
            x: x.to_vec(),
            at_zero: tuple.product_at(x)?,
            zero,
            shells,
            levels,
            memos: vec![None; m],
            psi: gauss_legendre(opts.psi_order)?,
            ln_density,
            ln_omega: ln_sphere_measure(m * n),
            engine,
            opts,
        };
        if !profile.zero && m >= profile.opts.memo_from_blocks {
            let top_level = match profile.engine {
                Engine::Blocks => m.saturating_sub(2),
                Engine::Sphere(_) => 0,
            };
            for i in (0..=top_level).rev() {
                let lv = &profile.levels[i];
                let top = lv.hi.min(s_top);
                if top > lv.lo {
                    let xs = knots_with(lv.lo, top, profile.opts.memo_samples, &lv.kinks);
                    let ys = xs.iter().map(|&s| profile.level_direct(i, s)).collect();
                    profile.memos[i] = Some(Pchip::new(xs, ys));
                }
            }
        }
        Ok(profile)
    }

    /// Same inputs at half resolution (half the sphere-rule degree or the
    /// first half of a QMC point set for the sphere engine).
    pub fn coarse(&self) -> Result<Self> {
        let opts = self.opts.coarse();
        match &self.engine {
            Engine::Blocks => Self::new(&self.tuple, &self.x, opts),
            Engine::Sphere(rule) => {
                let half = match rule.kind {
                    SphereKind::ProductAngles => sphere_rule(rule.kappa, rule.degree_or_samples / 2)?,
                    SphereKind::Qmc => {
                        let k = (rule.len() / 2).max(2);
                        let total: f64 = rule.weights.iter().sum();
                        SphereRule {
                            kappa: rule.kappa,
                            points: rule.points[..k * rule.kappa].to_vec(),
                            weights: vec![total / k as f64; k],
                            kind: SphereKind::Qmc,
                            degree_or_samples: k,
                        }
                    }
                };
                Self::build(&self.tuple, &self.x, opts, Engine::Sphere(Arc::new(half)))
            }
        }
    }

    pub fn tuple(&self) -> &FieldTuple {
        &self.tuple
    }

    pub fn center(&self) -> &[f64] {
        &self.x
    }

    pub fn options(&self) -> &ProfileOptions {
        &self.opts
    }

    pub fn m(&self) -> usize {
        self.tuple.m()
    }

    pub fn n(&self) -> usize {
        self.tuple.n()
    }

    pub fn kappa(&self) -> usize {
        self.m() * self.n()
    }

    /// ∏ f_i(x), the limit of every average as t → 0 at continuity points.
    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// G vanishes outside this interval.
    pub fn support(&self) -> (f64, f64) {
        (self.levels[0].lo, self.levels[0].hi)
    }

    /// Radii where G may fail to be smooth.
    pub fn kinks(&self) -> &[f64] {
        &self.levels[0].kinks
    }

    pub fn uses_sphere_rule(&self) -> bool {
        matches!(self.engine, Engine::Sphere(_))
    }

    /// G_x(s) for s ≥ 0.
    pub fn eval(&self, s: f64) -> f64 {
        if self.zero {
            return 0.0;
        }
        if s == 0.0 {
            return self.at_zero;
        }
        self.level(0, s)
    }

    pub fn eval_checked(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return usage(format!("profile radius must be finite and nonnegative, got {s}"));
        }
        Ok(self.eval(s))
    }

    fn level(&self, i: usize, s: f64) -> f64 {
        let lv = &self.levels[i];
        if s < lv.lo || s > lv.hi {
            return 0.0;
        }
        match &self.memos[i] {
            Some(p) if s <= p.hi() && s >= p.lo() => p.eval(s),
            _ => self.level_direct(i, s),
        }
    }

    fn level_direct(&self, i: usize, s: f64) -> f64 {
        if let Engine::Sphere(rule) = &self.engine {
            return self.sphere_direct(rule, s);
        }
        let m = self.m();
        if i == m - 1 {
            return self.shells[i].eval(s);
        }
        if s == 0.0 {
            return self.shells[i..].iter().map(|sh| sh.eval(0.0)).product();
        }
        let a = &self.shells[i];
        let tail = &self.levels[i + 1];
        if a.lo > s || tail.lo > s {
            return 0.0;
        }
        let lo = (a.lo / s).min(1.0).asin().max((tail.hi / s).min(1.0).acos());
        let hi = (a.hi / s).min(1.0).asin().min((tail.lo / s).min(1.0).acos());
        if !(hi > lo) {
            return 0.0;
        }
        let cuts = a
            .kinks
            .iter()
            .filter(|&&k| k < s)
            .map(|&k| (k / s).asin())
            .chain(tail.kinks.iter().filter(|&&k| k < s).map(|&k| (k / s).acos()));
        let edges = panel_edges(lo, hi, cuts);
        let n = self.n() as i32;
        let rest = ((m - 1 - i) * self.n()) as i32;
        let norm = self.ln_density[i].exp();
        let mut acc = 0.0;
        for w in edges.windows(2) {
            for (psi, wt) in stretched_panel(w[0], w[1], &self.psi) {
                let (sn, cs) = psi.sin_cos();
                let av = a.eval(s * sn);
                if av == 0.0 {
                    continue;
                }
                acc += wt * av * self.level(i + 1, s * cs) * sn.powi(n - 1) * cs.powi(rest - 1);
            }
        }
        norm * acc
    }

    fn sphere_direct(&self, rule: &SphereRule, s: f64) -> f64 {
        let n = self.n();
        let fields = self.tuple.fields();
        let mut y = vec![0.0; n];
        let total = rule.integrate(|th| {
            let mut prod = 1.0;
            for (f, block) in fields.iter().zip(th.chunks_exact(n)) {
                for a in 0..n {
                    y[a] = self.x[a] - s * block[a];
                }
                prod *= f.value(&y);
                if prod == 0.0 {
                    break;
                }
            }
            prod
        });
        total / self.ln_omega.exp()
    }
}

/// Support and kink radii of the profile of (A, tail): the support is the
/// set of s with s² = a² + b², a ∈ supp A, b ∈ supp tail, and smoothness can
/// only break where s equals a kink of either factor or the hypotenuse of two.
fn combine(a: &Shell, tail: &Level) -> Level {
    let lo = a.lo.hypot(tail.lo);
    let hi = if a.hi.is_finite() && tail.hi.is_finite() { a.hi.hypot(tail.hi) } else { f64::INFINITY };
    let with_edges = |k: &[f64], lo: f64, hi: f64| {
        let mut v: Vec<f64> = k.to_vec();
        v.push(lo);
        if hi.is_finite() {
            v.push(hi);
        }
        v
    };
    let ka = with_edges(&a.kinks, a.lo, a.hi);
    let kt = with_edges(&tail.kinks, tail.lo, tail.hi);
    let mut kinks: Vec<f64> = ka.iter().chain(&kt).copied().collect();
    for &p in &ka {
        for &q in &kt {
            kinks.push(p.hypot(q));
        }
    }
    kinks.retain(|k| k.is_finite() && *k > 0.0);
    kinks.sort_by(f64::total_cmp);
    kinks.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * q.abs());
    Level { lo, hi, kinks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::quadrature::sphere_rule_qmc;

    fn balls(m: usize) -> FieldTuple {
        FieldTuple::repeat(Field::unit_ball(2), m).unwrap()
    }

    #[test]
    fn constants_give_one() {
        let t = FieldTuple::repeat(Field::constant(1.0, 2).unwrap(), 3).unwrap();
        let p = RingProfile::new(&t, &[0.3, 0.1], ProfileOptions::default()).unwrap();
        for s in [0.0, 0.5, 3.0, 70.0] {
            assert!((p.eval(s) - 1.0).abs() < 1e-13, "s={s}: {}", p.eval(s));
        }
        let rule = sphere_rule(6, 4).unwrap();
        let q = ring_profile(&t, &[0.3, 0.1], &rule).unwrap();
        assert!((q.eval(2.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn unit_disk_indicator_at_origin() {
        let t = balls(1);
        let p = RingProfile::new(&t, &[0.0, 0.0], ProfileOptions::default()).unwrap();
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(1.5), 0.0);
        assert_eq!(p.eval(1.0), 1.0);
    }

    #[test]
    fn two_disks_at_origin_radius_one() {
        let t = balls(2);
        let p = RingProfile::new(&t, &[0.0, 0.0], ProfileOptions::default()).unwrap();
        assert!((p.eval(1.0) - 1.0).abs() < 1e-14);
        assert!((p.eval(0.7) - 1.0).abs() < 1e-14);
        // QMC cross-check
        let rule = sphere_rule_qmc(4, 20000, 1).unwrap();
        let q = ring_profile(&t, &[0.0, 0.0], &rule).unwrap();
        assert!((q.eval(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn support_edge_for_compact_tuples() {
        // zero once s > (|x| + R)·√m
        let t = balls(2);
        let x = [0.5, 0.0];
        let p = RingProfile::new(&t, &x, ProfileOptions::default()).unwrap();
        let edge = 1.5 * 2f64.sqrt();
        assert!((p.support().1 - edge).abs() < 1e-14);
        assert_eq!(p.eval(edge * 1.0001), 0.0);
        assert!(p.eval(edge * 0.99) > 0.0);
    }

    #[test]
    fn block_engine_matches_sphere_rules() {
        let cases: Vec<(FieldTuple, Vec<f64>)> = vec![
            (
                FieldTuple::new(vec![
                    Field::gaussian(1.0, vec![0.0, 0.0]).unwrap(),
                    Field::gaussian(1.5, vec![0.5, -0.3]).unwrap(),
                ])
                .unwrap(),
                vec![0.4, 0.2],
            ),
            (
                FieldTuple::new(vec![Field::bump(1.5, vec![0.0, 0.0]).unwrap(), Field::gaussian(1.0, vec![0.2, 0.1]).unwrap()])
                    .unwrap(),
                vec![-0.3, 0.6],
            ),
        ];
        let rule = Arc::new(sphere_rule(4, 120).unwrap());
        for (tuple, x) in cases {
            let p = RingProfile::new(&tuple, &x, ProfileOptions::default()).unwrap();
            let q = RingProfile::with_sphere_rule(&tuple, &x, rule.clone(), ProfileOptions::default()).unwrap();
            for s in [0.2, 0.9, 1.7, 2.6] {
                let (a, b) = (p.eval(s), q.eval(s));
                assert!((a - b).abs() < 1e-7, "s={s}: blocks {a} sphere {b}");
            }
        }
    }

    #[test]
    fn three_blocks_match_qmc() {
        let tuple = FieldTuple::new(vec![
            Field::gaussian(1.0, vec![0.0, 0.0]).unwrap(),
            Field::gaussian(1.3, vec![0.3, 0.0]).unwrap(),
            Field::gaussian(0.8, vec![0.0, -0.4]).unwrap(),
        ])
        .unwrap();
        let x = [0.1, 0.2];
        let p = RingProfile::new(&tuple, &x, ProfileOptions::default()).unwrap();
        let rule = Arc::new(sphere_rule(6, 40).unwrap());
        let q = RingProfile::with_sphere_rule(&tuple, &x, rule, ProfileOptions { memo_from_blocks: 9, ..Default::default() })
            .unwrap();
        for s in [0.3, 1.1, 2.0] {
            let (a, b) = (p.eval(s), q.eval(s));
            assert!((a - b).abs() < 1e-6, "s={s}: blocks {a} sphere {b}");
        }
    }

    #[test]
    fn indicator_pair_matches_fine_product_rule() {
        let t = balls(2);
        let x = [1.2, 0.0];
        let p = RingProfile::new(&t, &x, ProfileOptions::default()).unwrap();
        let rule = Arc::new(sphere_rule(4, 400).unwrap());
        let q = RingProfile::with_sphere_rule(&t, &x, rule, ProfileOptions::default()).unwrap();
        for s in [0.5, 1.0, 1.6, 2.4, 2.9] {
            let (a, b) = (p.eval(s), q.eval(s));
            assert!((a - b).abs() < 5e-3, "s={s}: blocks {a} sphere {b}");
        }
    }

    #[test]
    fn zero_field_short_circuits() {
        let t = FieldTuple::new(vec![Field::unit_ball(2), Field::constant(0.0, 2).unwrap()]).unwrap();
        let p = RingProfile::new(&t, &[0.0, 0.0], ProfileOptions::default()).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.eval(0.3), 0.0);
    }

    #[test]
    fn rejects_mismatched_rule() {
        let rule = sphere_rule(3, 4).unwrap();
        assert!(ring_profile(&balls(2), &[0.0, 0.0], &rule).is_err());
        assert!(RingProfile::new(&balls(2), &[0.0], ProfileOptions::default()).is_err());
    }
}
