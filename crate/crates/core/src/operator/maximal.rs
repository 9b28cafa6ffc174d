//! Suprema over scales: a geometric sweep of t, the kink radii of the profile
//! and the t → 0 limit, then golden-section refinement around the best sweep
//! point. The result is a lower bound for the supremum.

use serde::Serialize;

use super::average::{Averager, Operator};
use super::profile::RingProfile;
use crate::error::{usage, Result};

pub const DEFAULT_T_MIN: f64 = 1e-3;
pub const DEFAULT_PER_DECADE: usize = 48;
pub const DEFAULT_REFINE_DEPTH: usize = 24;
pub const DEFAULT_PANEL_ORDER: usize = 32;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
    pub refine_depth: usize,
}

impl TGrid {
    pub fn new(t_min: f64, t_max: f64, per_decade: usize, refine_depth: usize) -> Result<Self> {
        if !(t_min > 0.0) || !t_min.is_finite() || !t_max.is_finite() {
            return usage(format!("t-grid bounds must be finite with t_min > 0, got [{t_min}, {t_max}]"));
        }
        if !(t_max > t_min) || per_decade == 0 {
            return usage(format!(
                "empty t-grid: need t_max > t_min and at least one point per decade, got [{t_min}, {t_max}] with {per_decade}"
            ));
        }
        Ok(TGrid { t_min, t_max, per_decade, refine_depth })
    }

    /// Default grid: 48 points per decade from 10⁻³ to (reach)·√m·1.05, where
    /// the reach is the largest distance from x to the support of a member.
    pub fn default_for(profile: &RingProfile) -> Result<Self> {
        let t_max = default_t_max(profile)?;
        Self::new(DEFAULT_T_MIN, t_max.max(2.0 * DEFAULT_T_MIN), DEFAULT_PER_DECADE, DEFAULT_REFINE_DEPTH)
    }

    pub fn with_t_max(&self, t_max: f64) -> Result<Self> {
        Self::new(self.t_min, t_max, self.per_decade, self.refine_depth)
    }

    pub fn points(&self) -> Vec<f64> {
        let decades = (self.t_max / self.t_min).log10();
        let k = ((decades * self.per_decade as f64).ceil() as usize).max(1);
        let ratio = (self.t_max / self.t_min).ln() / k as f64;
        let mut pts: Vec<f64> = (0..=k).map(|j| self.t_min * (ratio * j as f64).exp()).collect();
        pts[k] = self.t_max;
        pts
    }
}

/// (|x| + support radius)·√m·1.05 for bounded tuples; an error otherwise.
pub fn default_t_max(profile: &RingProfile) -> Result<f64> {
    match profile.tuple().support_reach(profile.center()) {
        Some(reach) => Ok(reach * (profile.m() as f64).sqrt() * 1.05),
        None => usage("t_max must be given explicitly for tuples without bounded support"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalResult {
    pub operator: Operator,
    pub value: f64,
    /// Attaining scale (t_min when the t → 0 limit wins).
    pub arg_t: f64,
    pub limit_at_zero: bool,
    pub t_grid: TGrid,
    pub quad_error_estimate: f64,
    /// The average at t_max; equal to `value` signals a supremum that may lie
    /// beyond the grid.
    pub boundary_value: f64,
}

/// A profile together with its half-resolution twin, for error estimates.
pub struct Maximizer<'a> {
    profile: &'a RingProfile,
    coarse: RingProfile,
    order: usize,
}

impl<'a> Maximizer<'a> {
    pub fn new(profile: &'a RingProfile, panel_order: usize) -> Result<Self> {
        if panel_order < 2 {
            return usage("panel order must be at least 2");
        }
        Ok(Maximizer { profile, coarse: profile.coarse()?, order: panel_order })
    }

    pub fn profile(&self) -> &RingProfile {
        self.profile
    }

    /// The average at fixed t together with a fine/coarse error estimate.
    pub fn average(&self, op: Operator, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return usage(format!("scale t must be positive, got {t}"));
        }
        let fine = Averager::new(op, self.order)?.value(self.profile, t);
        let coarse = Averager::new(op, self.order / 2)?.value(&self.coarse, t);
        Ok((fine, (fine - coarse).abs()))
    }

    pub fn run(&self, op: Operator, grid: &TGrid) -> Result<MaximalResult> {
        let avg = Averager::new(op, self.order)?;
        // kinks of the profile are where indicator averages peak
        let kink_scales: Vec<f64> = match op {
            Operator::Spherical => self.profile.kinks().to_vec(),
            _ => self.profile.kinks().iter().flat_map(|&k| [k, k * (1.0 + 1e-12)]).collect(),
        };
        let sup = grid_sup(|t| avg.value(self.profile, t), grid, &kink_scales, self.profile.at_zero());
        let err = if sup.limit_at_zero { 0.0 } else { self.average(op, sup.arg_t)?.1 };
        Ok(MaximalResult {
            operator: op,
            value: sup.value,
            arg_t: sup.arg_t,
            limit_at_zero: sup.limit_at_zero,
            t_grid: grid.clone(),
            quad_error_estimate: err,
            boundary_value: sup.boundary_value,
        })
    }
}

pub(crate) struct GridSup {
    pub value: f64,
    pub arg_t: f64,
    pub limit_at_zero: bool,
    pub boundary_value: f64,
}

/// Sweep, golden-section refinement, extra candidate scales and the t → 0
/// limit, in that order.
pub(crate) fn grid_sup(f: impl Fn(f64) -> f64, grid: &TGrid, extra: &[f64], at_zero: f64) -> GridSup {
    let pts = grid.points();
    let vals: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
    let (mut best_t, mut best) = (pts[0], vals[0]);
    let mut best_idx = 0;
    for (i, (&t, &v)) in pts.iter().zip(&vals).enumerate() {
        if v > best {
            best = v;
            best_t = t;
            best_idx = i;
        }
    }
    // golden-section search in log t on the bracket around the best grid point
    if pts.len() > 1 && grid.refine_depth > 0 {
        let mut a = pts[best_idx.saturating_sub(1)].ln();
        let mut b = pts[(best_idx + 1).min(pts.len() - 1)].ln();
        let mut c = b - GOLDEN * (b - a);
        let mut d = a + GOLDEN * (b - a);
        let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
        for _ in 0..grid.refine_depth {
            for (t, v) in [(c, fc), (d, fd)] {
                if v > best {
                    best = v;
                    best_t = t.exp();
                }
            }
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - GOLDEN * (b - a);
                fc = f(c.exp());
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + GOLDEN * (b - a);
                fd = f(d.exp());
            }
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v > best {
                best = v;
                best_t = t.exp();
            }
        }
    }
    for &t in extra.iter().filter(|&&t| t >= grid.t_min && t <= grid.t_max) {
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let mut limit = false;
    if at_zero > best {
        best = at_zero;
        best_t = grid.t_min;
        limit = true;
    }
    GridSup { value: best, arg_t: best_t, limit_at_zero: limit, boundary_value: *vals.last().unwrap() }
}

/// sup_t of S^m_{α,t} (α < 1) or of S^m_{1,t} (α = 1) at the profile center.
pub fn maximal(
    profile: &RingProfile,
    alpha: f64,
    t_min: f64,
    t_max: f64,
    pts_per_decade: usize,
    refine_depth: usize,
) -> Result<MaximalResult> {
    let op = Operator::from_alpha(alpha)?;
    let grid = TGrid::new(t_min, t_max, pts_per_decade, refine_depth)?;
    Maximizer::new(profile, DEFAULT_PANEL_ORDER)?.run(op, &grid)
}
