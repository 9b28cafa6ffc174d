//! Discrete L^p tools: exponent tuples and the boundedness region, Riemann
//! p-norms on grids, norm-ratio probes and the large-|x| decay fit.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, usage, Result};
use crate::field::{Field, FieldTuple};
use crate::inequality::CheckOptions;
use crate::operator::{Averager, Maximizer, Operator, RingProfile};

/// Relative tolerance for landing exactly on a face of the region.
pub const FACE_TOLERANCE: f64 = 1e-12;

/// Least-squares line through (x, y); returns (slope, intercept).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Standard error of the least-squares slope; zero for two points.
pub fn slope_standard_error(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 3 {
        return 0.0;
    }
    let (s, c) = fit_line(xs, ys);
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c - s * x).powi(2)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (ssr / (k - 2.0) / sxx).sqrt()
}

/// Least-squares fit of ln v = c + s ln r + a/r; returns s. The 1/r term
/// absorbs the leading finite-radius correction. Needs three distinct radii.
pub fn fit_power_with_correction(radii: &[f64], values: &[f64]) -> Option<f64> {
    if radii.len() < 3 {
        return None;
    }
    let rows: Vec<[f64; 4]> = radii.iter().zip(values).map(|(r, v)| [1.0, r.ln(), 1.0 / r, v.ln()]).collect();
    // normal equations, augmented
    let mut a = [[0.0; 4]; 3];
    for row in &rows {
        for i in 0..3 {
            for j in 0..4 {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    for c in 0..3 {
        let piv = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        a.swap(c, piv);
        if a[c][c].abs() < 1e-300 {
            return None;
        }
        for i in 0..3 {
            if i != c {
                let f = a[i][c] / a[c][c];
                for j in c..4 {
                    a[i][j] -= f * a[c][j];
                }
            }
        }
    }
    let s = a[1][3] / a[1][1];
    s.is_finite().then_some(s)
}

/// (p_1, …, p_m) with every p_i in (1, ∞].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentTuple {
    p: Vec<f64>,
}

impl ExponentTuple {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return usage("exponent tuple must not be empty");
        }
        for &q in &p {
            if !(q > 1.0) {
                return domain(format!("each exponent must exceed 1, got {q}"));
            }
        }
        Ok(ExponentTuple { p })
    }

    pub fn exponents(&self) -> &[f64] {
        &self.p
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    /// 1/p_i with 1/∞ = 0.
    pub fn reciprocals(&self) -> Vec<f64> {
        self.p.iter().map(|&q| if q.is_infinite() { 0.0 } else { 1.0 / q }).collect()
    }

    /// 1/p = Σ 1/p_i.
    pub fn reciprocal_sum(&self) -> f64 {
        self.reciprocals().iter().sum()
    }

    /// The target exponent p (∞ when every p_i is).
    pub fn target(&self) -> f64 {
        let s = self.reciprocal_sum();
        if s == 0.0 {
            f64::INFINITY
        } else {
            1.0 / s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    BoundedInterior,
    Unbounded,
    /// Σ 1/p_i = (mn − α)/n; no verdict is given there.
    BoundaryHFace,
    /// Some 1/p_i equal to 1 to working precision.
    BoundaryOtherFace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub region: Region,
    /// Signed distance (H − Σ 1/p_i)/√m of the reciprocal point to the H hyperplane.
    pub distance: f64,
    /// H = (mn − α)/n.
    pub h: f64,
}

pub fn region_classify(m: usize, n: usize, alpha: f64, exponents: &ExponentTuple) -> Result<RegionVerdict> {
    if m == 0 || n == 0 {
        return usage("region_classify needs m, n >= 1");
    }
    if exponents.m() != m {
        return usage(format!("expected {m} exponents, got {}", exponents.m()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    let h = (m * n) as f64 / n as f64 - alpha / n as f64;
    let recips = exponents.reciprocals();
    let sum: f64 = recips.iter().sum();
    let distance = (h - sum) / (m as f64).sqrt();
    let region = if (sum - h).abs() <= FACE_TOLERANCE * h {
        Region::BoundaryHFace
    } else if sum > h {
        Region::Unbounded
    } else if recips.iter().any(|&s| (1.0 - s).abs() <= FACE_TOLERANCE) {
        Region::BoundaryOtherFace
    } else {
        Region::BoundedInterior
    };
    Ok(RegionVerdict { region, distance, h })
}

/// (Σ |v|^p · h^n)^{1/p}, or max |v| for p = ∞.
pub fn grid_lp_norm(values: &[f64], p: f64, spacing: f64, n: usize) -> Result<f64> {
    if !(p > 0.0) {
        return usage(format!("p must be positive, got {p}"));
    }
    if !(spacing > 0.0) || n == 0 {
        return usage("grid spacing and dimension must be positive");
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return usage(format!("grid values must be finite, found {v}"));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |a, v| a.max(v.abs())));
    }
    let cell = spacing.powi(n as i32);
    let sum: f64 = values.iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * cell).powf(1.0 / p))
}

/// Uniform grid on the cube [c − L, c + L]^n with `per_axis` points per axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalBox {
    pub center: Vec<f64>,
    pub half_width: f64,
    pub per_axis: usize,
}

impl EvalBox {
    pub fn new(center: Vec<f64>, half_width: f64, per_axis: usize) -> Result<Self> {
        if !(half_width > 0.0) || per_axis < 2 || center.is_empty() {
            return usage("evaluation box needs a positive half width, at least two points per axis and a center");
        }
        Ok(EvalBox { center, half_width, per_axis })
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.per_axis - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.n() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for slot in idx.iter_mut().rev() {
            *slot = k % self.per_axis;
            k /= self.per_axis;
        }
        idx
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        let h = self.spacing();
        self.index(k)
            .iter()
            .zip(&self.center)
            .map(|(&i, &c)| c - self.half_width + i as f64 * h)
            .collect()
    }

    /// Σ (i − mid)² over axes when the grid is symmetric about its center.
    fn offset_key(&self, k: usize) -> Option<u64> {
        if self.per_axis % 2 == 0 {
            return None;
        }
        let mid = (self.per_axis / 2) as i64;
        Some(self.index(k).iter().map(|&i| ((i as i64 - mid) * (i as i64 - mid)) as u64).sum())
    }
}

/// Common center of a tuple whose members are all radial about one point.
fn common_center(tuple: &FieldTuple) -> Option<Vec<f64>> {
    let c = tuple.field(0).radial()?.center.to_vec();
    tuple
        .fields()
        .iter()
        .all(|f| f.radial().is_some_and(|r| r.center == c.as_slice()))
        .then_some(c)
}

fn maximal_value(tuple: &FieldTuple, x: &[f64], op: Operator, opts: &CheckOptions) -> Result<f64> {
    let p = RingProfile::new(tuple, x, opts.profile.clone())?;
    let grid = opts.grid(&p)?;
    Ok(Maximizer::new(&p, opts.panel_order)?.run(op, &grid)?.value)
}

/// S^m_α(f)(x) at every point of the box, in index order. A tuple radial about
/// the box center is evaluated once per distinct distance.
pub fn maximal_on_box(tuple: &FieldTuple, alpha: f64, eval: &EvalBox, opts: &CheckOptions) -> Result<Vec<f64>> {
    if eval.n() != tuple.n() {
        return usage(format!("box has dimension {}, tuple has {}", eval.n(), tuple.n()));
    }
    let op = Operator::from_alpha(alpha)?;
    let symmetric = common_center(tuple).is_some_and(|c| c == eval.center) && eval.per_axis % 2 == 1;
    if !symmetric {
        return (0..eval.len()).into_par_iter().map(|k| maximal_value(tuple, &eval.point(k), op, opts)).collect();
    }
    let mut reps: BTreeMap<u64, usize> = BTreeMap::new();
    for k in 0..eval.len() {
        reps.entry(eval.offset_key(k).unwrap()).or_insert(k);
    }
    let h = eval.spacing();
    let keys: Vec<u64> = reps.keys().copied().collect();
    let vals: Vec<f64> = keys
        .par_iter()
        .map(|&key| {
            let mut x = eval.center.clone();
            x[0] += (key as f64).sqrt() * h;
            maximal_value(tuple, &x, op, opts)
        })
        .collect::<Result<_>>()?;
    let table: BTreeMap<u64, f64> = keys.into_iter().zip(vals).collect();
    Ok((0..eval.len()).map(|k| table[&eval.offset_key(k).unwrap()]).collect())
}

fn field_on_box(field: &Field, eval: &EvalBox) -> Vec<f64> {
    (0..eval.len()).map(|k| field.value(&eval.point(k))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioProbe {
    pub half_width: f64,
    pub numerator: f64,
    pub denominators: Vec<f64>,
    pub ratio: f64,
}

/// ‖S^m_α f‖_p / ∏ ‖f_i‖_{p_i} on the box grid: a lower bound for the
/// operator norm on this input.
pub fn ratio_probe(
    tuple: &FieldTuple,
    alpha: f64,
    exponents: &ExponentTuple,
    eval: &EvalBox,
    opts: &CheckOptions,
) -> Result<RatioProbe> {
    let s = maximal_on_box(tuple, alpha, eval, opts)?;
    ratio_from_values(tuple, &s, exponents, eval)
}

/// The ratio for an already computed S^m_α field on the box.
pub fn ratio_from_values(
    tuple: &FieldTuple,
    s: &[f64],
    exponents: &ExponentTuple,
    eval: &EvalBox,
) -> Result<RatioProbe> {
    if exponents.m() != tuple.m() {
        return usage(format!("expected {} exponents, got {}", tuple.m(), exponents.m()));
    }
    let (h, n) = (eval.spacing(), eval.n());
    let numerator = grid_lp_norm(s, exponents.target(), h, n)?;
    let denominators = tuple
        .fields()
        .iter()
        .zip(exponents.exponents())
        .map(|(f, &p)| grid_lp_norm(&field_on_box(f, eval), p, h, n))
        .collect::<Result<Vec<_>>>()?;
    let denom: f64 = denominators.iter().product();
    if denom == 0.0 {
        return usage("a member has zero norm on the evaluation box");
    }
    Ok(RatioProbe { half_width: eval.half_width, numerator, denominators, ratio: numerator / denom })
}

/// Growth per box doubling that flags a ratio series as divergent.
pub const DIVERGENCE_GROWTH: f64 = 0.25;

/// Ratios of one exponent tuple over a sequence of growing boxes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSeries {
    pub exponents: ExponentTuple,
    pub probes: Vec<RatioProbe>,
    /// Relative change of the ratio per doubling of the half width, between
    /// consecutive boxes.
    pub growth: Vec<f64>,
    /// Every step grew by at least the threshold, over at least two steps.
    pub flagged_divergent: bool,
}

/// Ratio probes for several exponent tuples on boxes centered at `center`
/// with the given half widths; S^m_α is computed once per box.
pub fn ratio_series(
    tuple: &FieldTuple,
    alpha: f64,
    exponents: &[ExponentTuple],
    center: &[f64],
    half_widths: &[f64],
    per_axis: usize,
    threshold: f64,
    opts: &CheckOptions,
) -> Result<Vec<RatioSeries>> {
    if half_widths.windows(2).any(|w| !(w[1] > w[0])) {
        return usage("ratio half widths must increase strictly");
    }
    let boxes = half_widths
        .iter()
        .map(|&l| EvalBox::new(center.to_vec(), l, per_axis))
        .collect::<Result<Vec<_>>>()?;
    let fields = boxes.iter().map(|b| maximal_on_box(tuple, alpha, b, opts)).collect::<Result<Vec<_>>>()?;
    exponents
        .iter()
        .map(|e| {
            let probes = boxes
                .iter()
                .zip(&fields)
                .map(|(b, s)| ratio_from_values(tuple, s, e, b))
                .collect::<Result<Vec<_>>>()?;
            let growth: Vec<f64> = probes
                .windows(2)
                .map(|w| (w[1].ratio / w[0].ratio).powf(1.0 / (w[1].half_width / w[0].half_width).log2()) - 1.0)
                .collect();
            let flagged_divergent = growth.len() >= 2 && growth.iter().all(|&g| g >= threshold);
            Ok(RatioSeries { exponents: e.clone(), probes, growth, flagged_divergent })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayStrategy {
    /// The single scale t = √m |x|.
    FixedProbe,
    /// The maximal function over the default t-grid.
    FullSup,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub strategy: DecayStrategy,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_error: f64,
    /// Slope of the fit with a 1/r correction term, when at least three radii.
    pub corrected_slope: Option<f64>,
    /// −(mn − α).
    pub target: f64,
}

impl DecayFit {
    pub fn relative_slope_error(&self) -> f64 {
        ((self.slope - self.target) / self.target).abs()
    }

    pub fn relative_corrected_error(&self) -> Option<f64> {
        self.corrected_slope.map(|s| ((s - self.target) / self.target).abs())
    }
}

/// S^m_α(χ_B, …, χ_B)(r e₁) for each radius and its log-log slope.
pub fn decay_fit(
    m: usize,
    n: usize,
    alpha: f64,
    radii: &[f64],
    strategy: DecayStrategy,
    opts: &CheckOptions,
) -> Result<DecayFit> {
    if radii.len() < 2 {
        return usage("decay_fit needs at least two radii");
    }
    if let Some(r) = radii.iter().find(|&&r| !(r >= 2.0)) {
        return usage(format!("decay radii must be at least 2, got {r}"));
    }
    let op = Operator::from_alpha(alpha)?;
    let tuple = FieldTuple::repeat(Field::unit_ball(n), m)?;
    let values = radii
        .par_iter()
        .map(|&r| {
            let mut x = vec![0.0; n];
            x[0] = r;
            let v = match strategy {
                DecayStrategy::FixedProbe => {
                    let p = RingProfile::new(&tuple, &x, opts.profile.clone())?;
                    Averager::new(op, opts.panel_order)?.value(&p, (m as f64).sqrt() * r)
                }
                DecayStrategy::FullSup => maximal_value(&tuple, &x, op, opts)?,
            };
            if !(v > 0.0) {
                return domain(format!("S^m_alpha vanished at radius {r}; the spherical cap was not resolved"));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = fit_line(&lx, &ly);
    let slope_error = slope_standard_error(&lx, &ly);
    let corrected_slope = fit_power_with_correction(radii, &values);
    Ok(DecayFit {
        m,
        n,
        alpha,
        strategy,
        radii: radii.to_vec(),
        values,
        slope,
        intercept,
        slope_error,
        corrected_slope,
        target: -((m * n) as f64 - alpha),
    })
}
