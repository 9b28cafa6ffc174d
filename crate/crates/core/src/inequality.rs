//! Pointwise relations between maximal operators, checked on batteries of
//! sample points: the slicing bound, the approximate-identity majorant, the
//! chain M ≤ S_α ≤ S and the α-limits at fixed scale.
//!
//! Every sample is compared with a combined tolerance of
//! `factor · (err_left + err_right)` plus a relative rounding floor, where the
//! errors are the fine/coarse quadrature estimates of the two sides.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::field::{Field, FieldTuple};
use crate::operator::maximal::grid_sup;
use crate::operator::{Averager, MaximalResult, Maximizer, Operator, ProfileOptions, RadialPanels, RingProfile, TGrid};
use crate::special::{check_alpha, ln_sphere_measure, majorant_l1};

pub const TOLERANCE_FACTOR: f64 = 10.0;
/// Relative slack so that sides equal to working precision never fail.
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// Where the worst sample of a relation was observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    pub tuple: String,
}

/// Outcome of one relation over a battery. `pass` holds exactly when
/// `worst_violation <= tolerance`, the pair being taken from the sample with
/// the largest excess over its own tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub relation: String,
    pub seed: Option<u64>,
    pub samples: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports contain only finite-safe fields")
    }
}

/// One signed violation (left − right for a relation left ≤ right).
#[derive(Debug, Clone)]
pub struct Sample {
    pub violation: f64,
    pub tolerance: f64,
    pub witness: Witness,
}

fn excess(s: &Sample) -> f64 {
    let e = s.violation - s.tolerance;
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

/// Reduce samples in order; the first sample of maximal excess is reported.
pub fn reduce(relation: &str, seed: Option<u64>, samples: &[Sample]) -> CheckReport {
    let worst = samples.iter().fold(None::<&Sample>, |acc, s| match acc {
        Some(a) if excess(a) >= excess(s) => Some(a),
        _ => Some(s),
    });
    match worst {
        None => CheckReport {
            relation: relation.to_string(),
            seed,
            samples: 0,
            worst_violation: 0.0,
            tolerance: 0.0,
            pass: true,
            witness: None,
        },
        Some(w) => CheckReport {
            relation: relation.to_string(),
            seed,
            samples: samples.len(),
            worst_violation: w.violation,
            tolerance: w.tolerance,
            pass: w.violation <= w.tolerance,
            witness: Some(w.witness.clone()),
        },
    }
}

/// Quadrature and t-grid settings shared by the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub tolerance_factor: f64,
    pub profile: ProfileOptions,
    pub panel_order: usize,
    pub t_min: f64,
    /// Required for tuples without bounded support.
    pub t_max: Option<f64>,
    pub per_decade: usize,
    pub refine_depth: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tolerance_factor: TOLERANCE_FACTOR,
            profile: ProfileOptions::default(),
            panel_order: crate::operator::maximal::DEFAULT_PANEL_ORDER,
            t_min: crate::operator::maximal::DEFAULT_T_MIN,
            t_max: None,
            per_decade: crate::operator::maximal::DEFAULT_PER_DECADE,
            refine_depth: crate::operator::maximal::DEFAULT_REFINE_DEPTH,
        }
    }
}

impl CheckOptions {
    pub fn grid(&self, profile: &RingProfile) -> Result<TGrid> {
        let t_max = match self.t_max {
            Some(t) => t,
            None => crate::operator::default_t_max(profile)?.max(2.0 * self.t_min),
        };
        TGrid::new(self.t_min, t_max, self.per_decade, self.refine_depth)
    }

    fn profile(&self, tuple: &FieldTuple, x: &[f64]) -> Result<RingProfile> {
        RingProfile::new(tuple, x, self.profile.clone())
    }

    fn tolerance(&self, left: f64, right: f64, err: f64) -> f64 {
        self.tolerance_factor * err + ROUNDING_FLOOR * left.abs().max(right.abs())
    }
}

/// `count` points uniform in the ball of radius `radius` about the origin of R^n.
pub fn sample_points(seed: u64, count: usize, n: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
            if p.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
                break p;
            }
        })
        .collect()
}

fn witness(tuple: &FieldTuple, x: &[f64], t: Option<f64>, alpha: Option<f64>) -> Witness {
    Witness { x: x.to_vec(), t, alpha, tuple: tuple.describe() }
}

fn single(field: &Field) -> Result<FieldTuple> {
    FieldTuple::new(vec![field.clone()])
}

fn maximal_single(field: &Field, x: &[f64], op: Operator, grid: &TGrid, opts: &CheckOptions) -> Result<MaximalResult> {
    let p = opts.profile(&single(field)?, x)?;
    Maximizer::new(&p, opts.panel_order)?.run(op, grid)
}

fn require_multilinear(tuple: &FieldTuple, what: &str) -> Result<()> {
    if tuple.m() < 2 {
        return usage(format!("{what} needs m >= 2, got m = {}", tuple.m()));
    }
    if tuple.n() < 2 {
        return usage(format!("{what} needs n >= 2 (the weight exponent n/2 - alpha must be nonnegative)"));
    }
    Ok(())
}

/// S^m_α(f)(x) ≤ S_α(f_k)(x) ∏_{i≠k} M(f_i)(x), with k a 0-based index.
pub fn check_slicing(
    tuple: &FieldTuple,
    k: usize,
    points: &[Vec<f64>],
    alpha: f64,
    opts: &CheckOptions,
) -> Result<Vec<Sample>> {
    require_multilinear(tuple, "the slicing bound")?;
    check_alpha(alpha)?;
    if k >= tuple.m() {
        return usage(format!("slicing index {k} out of range for m = {}", tuple.m()));
    }
    let op = Operator::Alpha(alpha);
    points
        .par_iter()
        .map(|x| {
            let p = opts.profile(tuple, x)?;
            let grid = opts.grid(&p)?;
            let left = Maximizer::new(&p, opts.panel_order)?.run(op, &grid)?;
            let sk = maximal_single(tuple.field(k), x, op, &grid, opts)?;
            let others = (0..tuple.m())
                .filter(|&i| i != k)
                .map(|i| maximal_single(tuple.field(i), x, Operator::HardyLittlewood, &grid, opts))
                .collect::<Result<Vec<_>>>()?;
            let mut right = sk.value;
            let mut err = sk.quad_error_estimate;
            for h in &others {
                err = err * h.value + right * h.quad_error_estimate;
                right *= h.value;
            }
            err += left.quad_error_estimate;
            Ok(Sample {
                violation: left.value - right,
                tolerance: opts.tolerance(left.value, right, err),
                witness: witness(tuple, x, Some(left.arg_t), Some(alpha)),
            })
        })
        .collect()
}

/// sup_t ∫ ∏_{i≥2} f_i(x − t ŷ_i) (1−|ŷ|²)^{n/2−α} dŷ ≤ ‖φ‖₁ · M^{m−1}(f_2, …, f_m)(x).
pub fn check_majorant(tuple: &FieldTuple, alpha: f64, points: &[Vec<f64>], opts: &CheckOptions) -> Result<Vec<Sample>> {
    require_multilinear(tuple, "the majorant bound")?;
    check_alpha(alpha)?;
    let rest = tuple.without(0)?;
    let n = tuple.n();
    let norm = majorant_l1(rest.m(), n, alpha)?;
    let exponent = n as f64 / 2.0 - alpha;
    let fine = RadialPanels::weighted(exponent, opts.panel_order)?;
    let coarse = RadialPanels::weighted(exponent, opts.panel_order / 2)?;
    points
        .par_iter()
        .map(|x| {
            let p = opts.profile(&rest, x)?;
            let pc = p.coarse()?;
            let grid = opts.grid(&p)?;
            let omega = ln_sphere_measure(p.kappa()).exp();
            let kinks: Vec<f64> = p.kinks().iter().flat_map(|&k| [k, k * (1.0 + 1e-12)]).collect();
            let sup = grid_sup(|t| omega * fine.integral(&p, t), &grid, &kinks, norm * p.at_zero());
            let left_err = if sup.limit_at_zero {
                0.0
            } else {
                omega * (fine.integral(&p, sup.arg_t) - coarse.integral(&pc, sup.arg_t)).abs()
            };
            let hl = Maximizer::new(&p, opts.panel_order)?.run(Operator::HardyLittlewood, &grid)?;
            let right = norm * hl.value;
            let err = left_err + norm * hl.quad_error_estimate;
            Ok(Sample {
                violation: sup.value - right,
                tolerance: opts.tolerance(sup.value, right, err),
                witness: witness(tuple, x, Some(sup.arg_t), Some(alpha)),
            })
        })
        .collect()
}

/// M^m ≤ S^m_α ≤ S^m for every α in `alphas`, all sups on one t-grid per point.
pub fn check_chain(tuple: &FieldTuple, alphas: &[f64], points: &[Vec<f64>], opts: &CheckOptions) -> Result<Vec<Sample>> {
    if alphas.is_empty() || points.is_empty() {
        return usage("the chain check needs at least one alpha and one point");
    }
    for &a in alphas {
        if !(a > 0.0 && a < 1.0) {
            return usage(format!("chain alphas must lie in (0, 1), got {a}"));
        }
    }
    let per_point: Vec<Vec<Sample>> = points
        .par_iter()
        .map(|x| {
            let p = opts.profile(tuple, x)?;
            let grid = opts.grid(&p)?;
            let mx = Maximizer::new(&p, opts.panel_order)?;
            let hl = mx.run(Operator::HardyLittlewood, &grid)?;
            let sph = mx.run(Operator::Spherical, &grid)?;
            let mut out = Vec::with_capacity(2 * alphas.len());
            for &a in alphas {
                let sa = mx.run(Operator::Alpha(a), &grid)?;
                for (lo, hi) in [(&hl, &sa), (&sa, &sph)] {
                    let err = lo.quad_error_estimate + hi.quad_error_estimate;
                    out.push(Sample {
                        violation: lo.value - hi.value,
                        tolerance: opts.tolerance(lo.value, hi.value, err),
                        witness: witness(tuple, x, Some(hi.arg_t), Some(a)),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

pub const ALPHAS_TO_ONE: [f64; 4] = [0.5, 0.9, 0.99, 0.999];
pub const ALPHAS_TO_ZERO: [f64; 4] = [0.5, 0.1, 0.01, 0.001];

/// Fixed-t behaviour of S_{α,t} as α → 1 and α → 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub x: Vec<f64>,
    pub t: f64,
    pub spherical: f64,
    pub hardy_littlewood: f64,
    /// (α, |S_{α,t} − S_{1,t}| / max(S_{1,t}, tiny)) along `ALPHAS_TO_ONE`.
    pub to_one: Vec<(f64, f64)>,
    /// (α, |S_{α,t} − M_t| / max(M_t, tiny)) along `ALPHAS_TO_ZERO`.
    pub to_zero: Vec<(f64, f64)>,
    /// Log-log slope of the α → 0 gap over the three smallest α; `None`
    /// when the gap is at rounding level.
    pub gap_exponent: Option<f64>,
    pub warning: Option<String>,
}

impl LimitReport {
    pub fn decreasing(seq: &[(f64, f64)]) -> bool {
        seq.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn final_error(seq: &[(f64, f64)]) -> f64 {
        seq.last().map_or(0.0, |p| p.1)
    }
}

const TINY: f64 = 1e-300;
/// Relative gaps below this are treated as exact agreement.
const GAP_FLOOR: f64 = 1e-13;

pub fn check_limits(tuple: &FieldTuple, x: &[f64], t: f64, opts: &CheckOptions) -> Result<LimitReport> {
    if !(t > 0.0) || !t.is_finite() {
        return usage(format!("scale t must be finite and positive, got {t}"));
    }
    let warning = tuple.fields().iter().any(Field::is_indicator).then(|| {
        "indicator members: fixed-t convergence may fail at discontinuity radii".to_string()
    });
    let p = opts.profile(tuple, x)?;
    let value = |op: Operator| -> Result<f64> { Ok(Averager::new(op, opts.panel_order)?.value(&p, t)) };
    let sph = value(Operator::Spherical)?;
    let hl = value(Operator::HardyLittlewood)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(TINY);
    let to_one = ALPHAS_TO_ONE
        .iter()
        .map(|&a| Ok((a, rel(value(Operator::Alpha(a))?, sph))))
        .collect::<Result<Vec<_>>>()?;
    let to_zero = ALPHAS_TO_ZERO
        .iter()
        .map(|&a| Ok((a, rel(value(Operator::Alpha(a))?, hl))))
        .collect::<Result<Vec<_>>>()?;
    let tail = &to_zero[1..];
    let gap_exponent = if tail.iter().all(|p| p.1 > GAP_FLOOR) {
        Some(crate::lp::fit_line(
            &tail.iter().map(|p| p.0.ln()).collect::<Vec<_>>(),
            &tail.iter().map(|p| p.1.ln()).collect::<Vec<_>>(),
        ).0)
    } else {
        None
    };
    Ok(LimitReport { x: x.to_vec(), t, spherical: sph, hardy_littlewood: hl, to_one, to_zero, gap_exponent, warning })
}

/// Samples for the three limit relations over a list of reports: final
/// errors against `final_tolerance`, monotone decrease, and a gap exponent
/// of at least `1 − slack`.
pub fn limit_samples(
    tuple: &FieldTuple,
    reports: &[LimitReport],
    final_tolerance: f64,
    slack: f64,
) -> [(String, Vec<Sample>); 3] {
    let mut finals = Vec::new();
    let mut monotone = Vec::new();
    let mut linear = Vec::new();
    for r in reports {
        let w = |alpha| witness(tuple, &r.x, Some(r.t), Some(alpha));
        for (seq, end) in [(&r.to_one, 0.999), (&r.to_zero, 0.001)] {
            finals.push(Sample { violation: LimitReport::final_error(seq), tolerance: final_tolerance, witness: w(end) });
            // largest increase along the sequence, relative to its first error
            let rise = seq.windows(2).map(|p| p[1].1 - p[0].1).fold(f64::NEG_INFINITY, f64::max);
            let scale = seq[0].1.max(TINY);
            monotone.push(Sample { violation: (rise / scale).max(-1.0), tolerance: 0.0, witness: w(end) });
        }
        let shortfall = r.gap_exponent.map_or(0.0, |e| 1.0 - e);
        linear.push(Sample { violation: shortfall, tolerance: slack, witness: w(0.001) });
    }
    [
        ("limit_final_error".to_string(), finals),
        ("limit_monotone".to_string(), monotone),
        ("limit_linear_gap".to_string(), linear),
    ]
}

/// |S^m_{α,t}(f)(x) − ∏ f_i(x)| along a sequence of shrinking scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub x: Vec<f64>,
    pub alpha: f64,
    pub product: f64,
    /// (t, absolute error) in the order the scales were given.
    pub errors: Vec<(f64, f64)>,
}

/// Absolute rises below this along a recovery sequence are rounding.
pub const RECOVERY_NOISE: f64 = 1e-12;

pub fn check_recovery(
    tuple: &FieldTuple,
    alpha: f64,
    points: &[Vec<f64>],
    ts: &[f64],
    opts: &CheckOptions,
) -> Result<Vec<RecoveryReport>> {
    let op = Operator::from_alpha(alpha)?;
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return usage("recovery scales must be finite, positive and nonempty");
    }
    let avg = Averager::new(op, opts.panel_order)?;
    points
        .par_iter()
        .map(|x| {
            let p = opts.profile(tuple, x)?;
            let product = tuple.product_at(x)?;
            let errors = ts.iter().map(|&t| (t, (avg.value(&p, t) - product).abs())).collect();
            Ok(RecoveryReport { x: x.clone(), alpha, product, errors })
        })
        .collect()
}

/// Final error against `tolerance` and monotone decrease along the scales.
pub fn recovery_samples(tuple: &FieldTuple, reports: &[RecoveryReport], tolerance: f64) -> [(String, Vec<Sample>); 2] {
    let mut finals = Vec::new();
    let mut monotone = Vec::new();
    for r in reports {
        let (t_last, e_last) = *r.errors.last().expect("recovery sequences are nonempty");
        let w = witness(tuple, &r.x, Some(t_last), Some(r.alpha));
        finals.push(Sample { violation: e_last, tolerance, witness: w.clone() });
        let rise = r.errors.windows(2).map(|p| p[1].1 - p[0].1).fold(f64::NEG_INFINITY, f64::max);
        monotone.push(Sample { violation: rise.max(-1.0), tolerance: RECOVERY_NOISE, witness: w });
    }
    [("recovery_final_error".to_string(), finals), ("recovery_monotone".to_string(), monotone)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_disks(m: usize) -> FieldTuple {
        FieldTuple::repeat(Field::unit_ball(2), m).unwrap()
    }

    fn gaussians(m: usize) -> FieldTuple {
        FieldTuple::repeat(Field::gaussian(1.0, vec![0.0, 0.0]).unwrap(), m).unwrap()
    }

    fn ones(m: usize) -> FieldTuple {
        FieldTuple::repeat(Field::constant(1.0, 2).unwrap(), m).unwrap()
    }

    fn bounded() -> CheckOptions {
        CheckOptions { t_max: Some(4.0), per_decade: 24, refine_depth: 16, ..Default::default() }
    }

    #[test]
    fn reduce_reports_largest_excess() {
        let w = witness(&ones(1), &[0.0, 0.0], None, None);
        let s = |v, t| Sample { violation: v, tolerance: t, witness: w.clone() };
        let r = reduce("r", Some(3), &[s(-1.0, 0.1), s(0.05, 0.1), s(0.2, 0.3)]);
        assert_eq!(r.worst_violation, 0.05);
        assert!(r.pass);
        let r = reduce("r", None, &[s(0.0, 0.1), s(0.2, 0.1)]);
        assert!(!r.pass && r.worst_violation == 0.2);
        let r = reduce("r", None, &[s(f64::NAN, 1.0), s(0.0, 1.0)]);
        assert!(!r.pass);
        assert!(reduce("r", None, &[]).pass);
    }

    #[test]
    fn sample_points_are_seeded_and_inside() {
        let a = sample_points(9, 40, 3, 2.0);
        assert_eq!(a, sample_points(9, 40, 3, 2.0));
        assert_ne!(a, sample_points(10, 40, 3, 2.0));
        assert!(a.iter().all(|p| p.iter().map(|v| v * v).sum::<f64>() <= 4.0));
    }

    #[test]
    fn constants_saturate_every_relation() {
        let pts = vec![vec![0.3, -0.2]];
        let opts = bounded();
        for s in check_slicing(&ones(2), 0, &pts, 0.5, &opts).unwrap() {
            assert!(s.violation.abs() < 1e-13);
        }
        for s in check_majorant(&ones(2), 0.5, &pts, &opts).unwrap() {
            assert!(s.violation.abs() < 1e-12, "{}", s.violation);
        }
        for s in check_chain(&ones(2), &[0.5], &pts, &opts).unwrap() {
            assert!(s.violation.abs() < 1e-13);
        }
        let r = check_limits(&ones(2), &[0.0, 0.0], 1.0, &opts).unwrap();
        assert!(r.to_one.iter().chain(&r.to_zero).all(|p| p.1 < 1e-13));
        assert_eq!(r.gap_exponent, None);
    }

    #[test]
    fn disks_at_origin_close_the_slicing_bound() {
        // left = 1 = right at x = 0
        let s = check_slicing(&unit_disks(2), 1, &[vec![0.0, 0.0]], 0.5, &CheckOptions::default()).unwrap();
        assert!(s[0].violation <= s[0].tolerance, "{:?}", s[0]);
        assert!(s[0].violation.abs() < 1e-10);
    }

    #[test]
    fn slicing_gaussian_battery_passes() {
        let pts = sample_points(1, 6, 2, 3.0);
        let samples = check_slicing(&gaussians(2), 0, &pts, 0.5, &bounded()).unwrap();
        let r = reduce("slicing", Some(1), &samples);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn slicing_at_alpha_zero_is_the_product_bound() {
        let pts = sample_points(2, 4, 2, 2.0);
        let r = reduce("slicing", None, &check_slicing(&unit_disks(2), 0, &pts, 0.0, &CheckOptions::default()).unwrap());
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn majorant_holds_for_disk_at_origin() {
        let s = check_majorant(&unit_disks(2), 0.5, &[vec![0.0, 0.0]], &CheckOptions::default()).unwrap();
        assert!(s[0].violation <= s[0].tolerance, "{:?}", s[0]);
    }

    #[test]
    fn chain_is_strict_off_center() {
        let s = check_chain(&unit_disks(1), &[0.5], &[vec![3.0, 0.0]], &CheckOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|s| s.violation < -1e-3), "{s:?}");
    }

    #[test]
    fn usage_errors() {
        let pts = vec![vec![0.0, 0.0]];
        let o = CheckOptions::default();
        assert!(check_slicing(&unit_disks(1), 0, &pts, 0.5, &o).is_err());
        assert!(check_slicing(&unit_disks(2), 2, &pts, 0.5, &o).is_err());
        assert!(check_majorant(&unit_disks(1), 0.5, &pts, &o).is_err());
        assert!(check_chain(&unit_disks(1), &[1.0], &pts, &o).is_err());
        assert!(check_chain(&unit_disks(1), &[], &pts, &o).is_err());
        assert!(check_limits(&unit_disks(1), &[0.0, 0.0], 0.0, &o).is_err());
        // unbounded tuples need t_max
        assert!(check_chain(&ones(1), &[0.5], &pts, &o).is_err());
    }

    #[test]
    fn gaussian_limits_converge() {
        // S_{1,t} = e^{-t²} at the center
        let r = check_limits(&gaussians(1), &[0.0, 0.0], 1.0, &bounded()).unwrap();
        assert!((r.spherical - (-1.0f64).exp()).abs() < 1e-12);
        assert!(LimitReport::decreasing(&r.to_one) && LimitReport::decreasing(&r.to_zero));
        let e = r.gap_exponent.unwrap();
        assert!((e - 1.0).abs() < 0.05, "{e}");
        assert!(r.warning.is_none());
        assert!(check_limits(&unit_disks(1), &[0.0, 0.0], 1.0, &bounded()).unwrap().warning.is_some());
    }

    #[test]
    fn recovery_errors_shrink_like_t_squared() {
        // spherical means of a centered Gaussian: 1 − e^{−t²} at the center
        let ts = [0.4, 0.2, 0.1];
        let r = check_recovery(&gaussians(1), 1.0, &[vec![0.0, 0.0]], &ts, &bounded()).unwrap();
        for &(t, e) in &r[0].errors {
            assert!((e - (1.0 - (-t * t).exp())).abs() < 1e-12, "t={t}: {e}");
        }
        let [(_, finals), (_, mono)] = recovery_samples(&gaussians(1), &r, 1e-2);
        assert!(finals[0].violation < 1e-2 && mono[0].violation < 0.0);
        assert!(check_recovery(&gaussians(1), 0.5, &[vec![0.0, 0.0]], &[], &bounded()).is_err());
    }
}
