//! Nonnegative input functions on R^n.
//!
//! Analytic kinds are all radial about a center and expose their radial
//! profile, kink radii and support so the operator engine can integrate them
//! with breakpoints instead of blind quadrature. Gridded fields interpolate a
//! MAXF sample file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{usage, Error, Result};
use crate::maxf::GridData;

/// exp(-ρ²/s²) is exactly 0.0 in double precision once ρ > 27.5·s.
pub const GAUSSIAN_REACH: f64 = 27.5;

/// Default Lagrange order of gridded fields (6-point stencil per axis).
pub const DEFAULT_GRID_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// χ of the closed ball; 1 on the boundary.
    BallIndicator { radius: f64, center: Vec<f64> },
    /// exp(-|y-c|²/scale²).
    Gaussian { scale: f64, center: Vec<f64> },
    /// (R/max(|y-c|, R))^β, cut to zero beyond `outer`.
    PowerTail { exponent: f64, inner: f64, outer: f64, center: Vec<f64> },
    /// exp(1 - 1/(1-|y-c|²/r²)) inside the ball of radius r, 0 outside.
    Bump { radius: f64, center: Vec<f64> },
    Grid(GridField),
    Constant { value: f64 },
}

#[derive(Debug, Clone)]
pub struct GridField {
    pub data: Arc<GridData>,
    pub order: usize,
    pub source: Option<PathBuf>,
}

impl PartialEq for GridField {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && (Arc::ptr_eq(&self.data, &other.data) || *self.data == *other.data)
    }
}

/// A nonnegative field, optionally truncated as f·χ_{f ≤ cap}.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    dim: usize,
    kind: FieldKind,
    cap: Option<f64>,
}

/// Radial description of an analytic field about its center.
#[derive(Debug, Clone)]
pub struct RadialInfo<'a> {
    pub center: &'a [f64],
    /// Radii at which the profile is not smooth.
    pub kinks: Vec<f64>,
    /// Profile vanishes for ρ > support (None: unbounded support).
    pub support: Option<f64>,
}

fn check_center(center: &[f64], dim: usize) -> Result<()> {
    if center.len() != dim {
        return usage(format!("center has {} coordinates, field dimension is {dim}", center.len()));
    }
    if center.iter().any(|c| !c.is_finite()) {
        return usage("center must be finite");
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return usage(format!("{name} must be finite and positive, got {v}"));
    }
    Ok(())
}

impl Field {
    pub fn ball(radius: f64, center: Vec<f64>) -> Result<Self> {
        check_positive("ball radius", radius)?;
        let dim = center.len();
        check_center(&center, dim)?;
        Self::with(dim, FieldKind::BallIndicator { radius, center })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Field { dim, kind: FieldKind::BallIndicator { radius: 1.0, center: vec![0.0; dim] }, cap: None }
    }

    pub fn gaussian(scale: f64, center: Vec<f64>) -> Result<Self> {
        check_positive("gaussian scale", scale)?;
        let dim = center.len();
        check_center(&center, dim)?;
        Self::with(dim, FieldKind::Gaussian { scale, center })
    }

    pub fn power_tail(exponent: f64, inner: f64, outer: f64, center: Vec<f64>) -> Result<Self> {
        check_positive("power-tail exponent", exponent)?;
        check_positive("power-tail inner radius", inner)?;
        if !(outer > inner) || !outer.is_finite() {
            return usage(format!("power-tail outer radius must be finite and exceed {inner}, got {outer}"));
        }
        let dim = center.len();
        check_center(&center, dim)?;
        Self::with(dim, FieldKind::PowerTail { exponent, inner, outer, center })
    }

    pub fn bump(radius: f64, center: Vec<f64>) -> Result<Self> {
        check_positive("bump radius", radius)?;
        let dim = center.len();
        check_center(&center, dim)?;
        Self::with(dim, FieldKind::Bump { radius, center })
    }

    pub fn constant(value: f64, dim: usize) -> Result<Self> {
        if !value.is_finite() {
            return usage("constant field value must be finite");
        }
        Self::with(dim, FieldKind::Constant { value: value.abs() })
    }

    /// Gridded field; samples are replaced by their absolute values.
    pub fn grid(mut data: GridData, order: usize, source: Option<PathBuf>) -> Result<Self> {
        let dim = data.dim();
        if data.samples.len() != data.extents.iter().product::<usize>() || data.samples.is_empty() {
            return usage("grid sample count does not match its extents");
        }
        if data.spacing.len() != dim || data.origin.len() != dim {
            return usage("grid spacing/origin length does not match its dimension");
        }
        for &h in &data.spacing {
            check_positive("grid spacing", h)?;
        }
        if !(1..=7).contains(&order) {
            return usage(format!("grid interpolation order must lie in [1, 7], got {order}"));
        }
        if data.samples.iter().any(|v| !v.is_finite()) {
            return usage("grid samples must be finite");
        }
        for v in &mut data.samples {
            *v = v.abs();
        }
        Self::with(dim, FieldKind::Grid(GridField { data: Arc::new(data), order, source }))
    }

    pub fn load_grid(path: &Path, order: usize) -> Result<Self> {
        let data = GridData::read(path)?;
        Self::grid(data, order, Some(path.to_path_buf()))
    }

    fn with(dim: usize, kind: FieldKind) -> Result<Self> {
        if dim == 0 {
            return usage("fields need dimension >= 1");
        }
        Ok(Field { dim, kind, cap: None })
    }

    /// The truncation f·χ_{f ≤ k}.
    pub fn truncated(&self, k: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return usage(format!("truncation level must be nonnegative, got {k}"));
        }
        Ok(Field { cap: Some(self.cap.map_or(k, |c| c.min(k))), ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self.kind, FieldKind::BallIndicator { .. })
    }

    /// True when the field vanishes identically.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            FieldKind::Constant { value } => *value == 0.0 || self.cap.is_some_and(|c| *value > c),
            FieldKind::Grid(g) => g.data.samples.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return usage(format!("point has {} coordinates, field dimension is {}", x.len(), self.dim));
        }
        Ok(self.value(x))
    }

    /// Evaluation without the dimension check.
    pub fn value(&self, x: &[f64]) -> f64 {
        let v = match &self.kind {
            FieldKind::Grid(g) => g.interpolate(x),
            FieldKind::Constant { value } => *value,
            _ => {
                let center = self.center().unwrap();
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                return self.profile(d2.sqrt());
            }
        };
        self.apply_cap(v)
    }

    fn apply_cap(&self, v: f64) -> f64 {
        match self.cap {
            Some(k) if v > k => 0.0,
            _ => v,
        }
    }

    /// Radial profile φ(ρ) of an analytic field (value at distance ρ from
    /// the center); constants are radial about any point.
    pub fn profile(&self, rho: f64) -> f64 {
        let v = match &self.kind {
            FieldKind::BallIndicator { radius, .. } => f64::from(rho <= *radius),
            FieldKind::Gaussian { scale, .. } => (-(rho / scale).powi(2)).exp(),
            FieldKind::PowerTail { exponent, inner, outer, .. } => {
                if rho > *outer {
                    0.0
                } else {
                    (inner / rho.max(*inner)).powf(*exponent)
                }
            }
            FieldKind::Bump { radius, .. } => {
                let q = (rho / radius).powi(2);
                if q < 1.0 {
                    (1.0 - 1.0 / (1.0 - q)).exp()
                } else {
                    0.0
                }
            }
            FieldKind::Constant { value } => *value,
            FieldKind::Grid(_) => f64::NAN,
        };
        self.apply_cap(v)
    }

    /// Center of a radial analytic field.
    pub fn center(&self) -> Option<&[f64]> {
        match &self.kind {
            FieldKind::BallIndicator { center, .. }
            | FieldKind::Gaussian { center, .. }
            | FieldKind::PowerTail { center, .. }
            | FieldKind::Bump { center, .. } => Some(center),
            FieldKind::Grid(_) | FieldKind::Constant { .. } => None,
        }
    }

    /// Radial structure for analytic kinds; None for grids and constants.
    pub fn radial(&self) -> Option<RadialInfo<'_>> {
        let (center, mut kinks, support) = match &self.kind {
            FieldKind::BallIndicator { radius, center } => (center, vec![*radius], Some(*radius)),
            FieldKind::Gaussian { scale, center } => (center, vec![], Some(scale * GAUSSIAN_REACH)),
            FieldKind::PowerTail { inner, outer, center, .. } => (center, vec![*inner, *outer], Some(*outer)),
            FieldKind::Bump { radius, center } => (center, vec![*radius], Some(*radius)),
            FieldKind::Grid(_) | FieldKind::Constant { .. } => return None,
        };
        if let Some(k) = self.cap {
            if let Some(r) = self.level_radius(k, support.unwrap_or(1e6)) {
                kinks.push(r);
            }
        }
        Some(RadialInfo { center: center.as_slice(), kinks, support })
    }

    /// Radius where the (nonincreasing) uncapped profile crosses level k.
    fn level_radius(&self, k: f64, hi: f64) -> Option<f64> {
        let raw = Field { cap: None, ..self.clone() };
        if raw.profile(0.0) <= k || raw.profile(hi) > k {
            return None;
        }
        let (mut lo, mut hi) = (0.0, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if raw.profile(mid) > k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }

    /// A ball (center, radius) containing the support, if bounded.
    pub fn support_ball(&self) -> Option<(Vec<f64>, f64)> {
        match &self.kind {
            FieldKind::Grid(g) => {
                let d = &g.data;
                let center: Vec<f64> = (0..self.dim)
                    .map(|a| d.origin[a] + 0.5 * d.spacing[a] * (d.extents[a] - 1) as f64)
                    .collect();
                let r = (0..self.dim)
                    .map(|a| (0.5 * d.spacing[a] * (d.extents[a] - 1) as f64).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Some((center, r))
            }
            FieldKind::Constant { .. } => None,
            _ => {
                let info = self.radial()?;
                Some((info.center.to_vec(), info.support?))
            }
        }
    }

    /// The field g(y) = f(λy).
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        check_positive("dilation factor", lambda)?;
        let scale_c = |c: &Vec<f64>| c.iter().map(|v| v / lambda).collect::<Vec<_>>();
        let kind = match &self.kind {
            FieldKind::BallIndicator { radius, center } => {
                FieldKind::BallIndicator { radius: radius / lambda, center: scale_c(center) }
            }
            FieldKind::Gaussian { scale, center } => FieldKind::Gaussian { scale: scale / lambda, center: scale_c(center) },
            FieldKind::PowerTail { exponent, inner, outer, center } => FieldKind::PowerTail {
                exponent: *exponent,
                inner: inner / lambda,
                outer: outer / lambda,
                center: scale_c(center),
            },
            FieldKind::Bump { radius, center } => FieldKind::Bump { radius: radius / lambda, center: scale_c(center) },
            FieldKind::Constant { value } => FieldKind::Constant { value: *value },
            FieldKind::Grid(g) => {
                let mut data = (*g.data).clone();
                data.spacing.iter_mut().for_each(|h| *h /= lambda);
                data.origin.iter_mut().for_each(|o| *o /= lambda);
                FieldKind::Grid(GridField { data: Arc::new(data), order: g.order, source: None })
            }
        };
        Ok(Field { dim: self.dim, kind, cap: self.cap })
    }

    /// Parse the one-line description used in configs, e.g.
    /// `ball r=1 c=0,0`, `gaussian s=2`, `power beta=1.5 r=1 outer=40`,
    /// `bump r=1`, `const v=1`, `grid path=f.maxf order=5`, each optionally
    /// followed by `cap=K`.
    pub fn parse(spec: &str, dim: usize, base: Option<&Path>) -> Result<Self> {
        let mut words = spec.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::Config("empty field description".into()))?;
        let mut keys: Vec<(&str, &str)> = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("field parameter '{w}' is not key=value")))?;
            if keys.iter().any(|(seen, _)| *seen == k) {
                return Err(Error::Config(format!("field parameter '{k}' given twice")));
            }
            keys.push((k, v));
        }
        let allowed: &[&str] = match kind {
            "ball" | "bump" => &["r", "c", "cap"],
            "gaussian" => &["s", "c", "cap"],
            "power" => &["beta", "r", "outer", "c", "cap"],
            "const" => &["v", "cap"],
            "grid" => &["path", "order", "cap"],
            other => return Err(Error::Config(format!("unknown field kind '{other}'"))),
        };
        if let Some((k, _)) = keys.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::Config(format!("field kind '{kind}' does not accept '{k}'")));
        }
        let get = |k: &str| keys.iter().find(|(name, _)| *name == k).map(|(_, v)| *v);
        let num = |k: &str, default: Option<f64>| -> Result<f64> {
            match get(k) {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("field parameter {k}={v} is not a number"))),
                None => default.ok_or_else(|| Error::Config(format!("field kind '{kind}' needs '{k}'"))),
            }
        };
        let center = match get("c") {
            Some(v) => {
                let c = v
                    .split(',')
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Config(format!("bad center '{v}'")))?;
                if c.len() != dim {
                    return Err(Error::Config(format!("center '{v}' has {} coordinates, n = {dim}", c.len())));
                }
                c
            }
            None => vec![0.0; dim],
        };
        let as_config = |e: Error| match e {
            Error::Usage(m) | Error::Domain(m) => Error::Config(m),
            other => other,
        };
        let field = match kind {
            "ball" => Field::ball(num("r", Some(1.0))?, center),
            "bump" => Field::bump(num("r", Some(1.0))?, center),
            "gaussian" => Field::gaussian(num("s", Some(1.0))?, center),
            "power" => Field::power_tail(num("beta", None)?, num("r", Some(1.0))?, num("outer", None)?, center),
            "const" => Field::constant(num("v", Some(1.0))?, dim),
            _ => {
                let p = get("path").ok_or_else(|| Error::Config("grid field needs 'path'".into()))?;
                let path = match base {
                    Some(b) if Path::new(p).is_relative() => b.join(p),
                    _ => PathBuf::from(p),
                };
                let order = num("order", Some(DEFAULT_GRID_ORDER as f64))?;
                if order.fract() != 0.0 || order < 1.0 {
                    return Err(Error::Config(format!("grid order must be a positive integer, got {order}")));
                }
                let f = Field::load_grid(&path, order as usize)?;
                if f.dim() != dim {
                    return Err(Error::Config(format!("grid {} has dimension {}, n = {dim}", path.display(), f.dim())));
                }
                Ok(f)
            }
        }
        .map_err(as_config)?;
        match get("cap") {
            Some(_) => field.truncated(num("cap", None)?).map_err(as_config),
            None => Ok(field),
        }
    }
}

fn fmt_center(c: &[f64]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FieldKind::BallIndicator { radius, center } => write!(f, "ball r={radius} c={}", fmt_center(center))?,
            FieldKind::Gaussian { scale, center } => write!(f, "gaussian s={scale} c={}", fmt_center(center))?,
            FieldKind::PowerTail { exponent, inner, outer, center } => {
                write!(f, "power beta={exponent} r={inner} outer={outer} c={}", fmt_center(center))?
            }
            FieldKind::Bump { radius, center } => write!(f, "bump r={radius} c={}", fmt_center(center))?,
            FieldKind::Constant { value } => write!(f, "const v={value}")?,
            FieldKind::Grid(g) => match &g.source {
                Some(p) => write!(f, "grid path={} order={}", p.display(), g.order)?,
                None => write!(f, "grid extents={:?} order={}", g.data.extents, g.order)?,
            },
        }
        if let Some(k) = self.cap {
            write!(f, " cap={k}")?;
        }
        Ok(())
    }
}

impl GridField {
    /// Tensor Lagrange interpolation on the (order+1)-point stencil around x,
    /// clamped at zero; zero outside the sample box.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let d = &*self.data;
        let n = d.extents.len();
        let mut starts = [0usize; 16];
        let mut basis = [[0.0f64; 8]; 16];
        let mut widths = [0usize; 16];
        for a in 0..n {
            let e = d.extents[a];
            let s = (x[a] - d.origin[a]) / d.spacing[a];
            let last = (e - 1) as f64;
            if !(s >= -1e-12 * last.max(1.0)) || !(s <= last * (1.0 + 1e-12) + 1e-12) {
                return 0.0;
            }
            let s = s.clamp(0.0, last);
            let deg = self.order.min(e - 1);
            let i0 = (s.floor() as usize).min(e.saturating_sub(2));
            let start = i0.saturating_sub((deg.max(1) - 1) / 2).min(e - 1 - deg);
            starts[a] = start;
            widths[a] = deg + 1;
            for j in 0..=deg {
                let xj = (start + j) as f64;
                let mut l = 1.0;
                for k in 0..=deg {
                    if k != j {
                        let xk = (start + k) as f64;
                        l *= (s - xk) / (xj - xk);
                    }
                }
                basis[a][j] = l;
            }
        }
        let mut strides = [1usize; 16];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * d.extents[a + 1];
        }
        let total: usize = widths[..n].iter().product();
        let mut acc = 0.0;
        let mut idx = [0usize; 16];
        for _ in 0..total {
            let mut w = 1.0;
            let mut off = 0;
            for a in 0..n {
                w *= basis[a][idx[a]];
                off += (starts[a] + idx[a]) * strides[a];
            }
            acc += w * d.samples[off];
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < widths[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        acc.max(0.0)
    }
}

/// The tuple (f_1, …, f_m) of common dimension n.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTuple {
    fields: Vec<Field>,
}

impl FieldTuple {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        let Some(first) = fields.first() else {
            return usage("a field tuple needs at least one field");
        };
        let n = first.dim();
        if let Some(f) = fields.iter().find(|f| f.dim() != n) {
            return usage(format!("field dimensions differ: {} vs {n}", f.dim()));
        }
        Ok(FieldTuple { fields })
    }

    /// m copies of one field.
    pub fn repeat(field: Field, m: usize) -> Result<Self> {
        Self::new(vec![field; m])
    }

    pub fn m(&self) -> usize {
        self.fields.len()
    }

    pub fn n(&self) -> usize {
        self.fields[0].dim()
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    pub fn without(&self, k: usize) -> Result<Self> {
        let rest: Vec<Field> = self.fields.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, f)| f.clone()).collect();
        Self::new(rest)
    }

    pub fn any_zero(&self) -> bool {
        self.fields.iter().any(Field::is_zero)
    }

    /// ∏ f_i(x) at a single point.
    pub fn product_at(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n() {
            return usage(format!("point has {} coordinates, n = {}", x.len(), self.n()));
        }
        Ok(self.fields.iter().map(|f| f.value(x)).product())
    }

    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        Self::new(self.fields.iter().map(|f| f.dilated(lambda)).collect::<Result<_>>()?)
    }

    /// Largest distance from x to the support of any member, if all bounded.
    pub fn support_reach(&self, x: &[f64]) -> Option<f64> {
        let mut reach: f64 = 0.0;
        for f in &self.fields {
            let (c, r) = f.support_ball()?;
            let d = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            reach = reach.max(d + r);
        }
        Some(reach)
    }

    pub fn describe(&self) -> String {
        self.fields.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" | ")
    }
}

/// ∏ f_i(x - tθ_i) with θ = (θ_1, …, θ_m) flattened in `dirs`.
pub fn product_eval(tuple: &FieldTuple, x: &[f64], t: f64, dirs: &[f64]) -> Result<f64> {
    let n = tuple.n();
    if x.len() != n || dirs.len() != n * tuple.m() {
        return usage(format!(
            "product_eval expects x in R^{n} and directions in R^{}, got {} and {}",
            n * tuple.m(),
            x.len(),
            dirs.len()
        ));
    }
    let mut y = [0.0f64; 16];
    if n > y.len() {
        return usage("dimension above 16 is not supported");
    }
    let mut acc = 1.0;
    for (f, th) in tuple.fields().iter().zip(dirs.chunks_exact(n)) {
        for a in 0..n {
            y[a] = x[a] - t * th[a];
        }
        acc *= f.value(&y[..n]);
        if acc == 0.0 {
            break;
        }
    }
    Ok(acc)
}
