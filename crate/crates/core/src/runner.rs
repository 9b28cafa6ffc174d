//! Config-driven experiment runner behind the `maxop` binary.
//!
//! A config is line-oriented `key = value` text with `[section]` headers:
//! `[run]` and `[quadrature]` hold global settings and each experiment kind
//! has its own section. Keys missing from a section take the defaults listed
//! by [`kinds`]; keys not listed there are rejected. Tuples are written as
//! field descriptions joined by `|`, several tuples separated by `;`.
//!
//! Every experiment writes `<kind>.csv` and `<kind>.json`; all check reports
//! go to `checks.jsonl` and the run is described by `manifest.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, FieldTuple};
use crate::fourier::{envelope_slope, radial_fourier, s_alpha_fourier, SpectralGrid};
use crate::inequality::{
    check_chain, check_limits, check_majorant, check_recovery, check_slicing, limit_samples, recovery_samples,
    reduce, sample_points, CheckOptions, CheckReport, Sample, Witness,
};
use crate::lp::{decay_fit, ratio_series, region_classify, DecayStrategy, ExponentTuple, Region};
use crate::operator::{Averager, Operator, RingProfile};
use crate::special::slicing_identity_check;

/// One experiment kind: name, one-line description and its keys with defaults.
#[derive(Debug, Clone, Serialize)]
pub struct KindInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub defaults: Vec<(&'static str, &'static str)>,
}

const RUN_KEYS: &[(&str, &str)] = &[
    ("experiments", "identities, region, chain, limits, slicing, majorant, decay, ratio, oracle"),
    ("seed", "1"),
    ("threads", "auto"),
];

const QUADRATURE_KEYS: &[(&str, &str)] = &[
    ("panel_order", "32"),
    ("t_min", "1e-3"),
    ("t_max", "auto"),
    ("per_decade", "48"),
    ("refine_depth", "24"),
    ("tolerance_factor", "10"),
];

const KINDS: &[(&str, &str, &[(&str, &str)])] = &[
    (
        "identities",
        "normalization identity residuals and the alpha = 0 collapse S_0 = M",
        &[
            ("m", "2, 3"),
            ("n", "2, 3, 4"),
            ("alpha", "0, 0.25, 0.5, 0.9"),
            ("tolerance", "1e-12"),
            ("collapse_n", "2"),
            ("collapse_tuples", "gaussian s=1; ball r=1; gaussian s=1 | ball r=1 c=0.5,0"),
            ("collapse_points", "20"),
            ("collapse_radius", "3"),
            ("collapse_t", "0.25, 0.5, 1, 2, 4"),
            ("collapse_tolerance", "1e-10"),
        ],
    ),
    (
        "region",
        "randomized sweep of the boundedness region against the exponent inequality",
        &[("samples", "10000")],
    ),
    (
        "chain",
        "M <= S_alpha <= S on seeded random points",
        &[
            ("n", "2"),
            ("tuples", "gaussian s=1; ball r=1; gaussian s=1 | gaussian s=1; gaussian s=1 | ball r=1 c=0.5,0"),
            ("alpha", "0.1, 0.5, 0.9"),
            ("points", "100"),
            ("radius", "3"),
        ],
    ),
    (
        "limits",
        "fixed-t limits alpha -> 1 and alpha -> 0, and recovery of the product as t -> 0",
        &[
            ("n", "2"),
            ("tuples", "gaussian s=1; bump r=1 | bump r=1"),
            ("points", "10"),
            ("radius", "0.5"),
            ("t", "1"),
            ("final_tolerance", "1e-3"),
            ("linear_slack", "0.2"),
            ("recovery_alpha", "0, 0.5, 0.9"),
            ("recovery_points", "20"),
            ("recovery_t", "0.5, 0.2, 0.1, 0.05, 0.02, 0.01"),
            ("recovery_tolerance", "1e-2"),
        ],
    ),
    (
        "slicing",
        "S^m_alpha(f) <= S_alpha(f_k) prod_{i != k} M(f_i) on seeded random points",
        &[
            ("n", "2"),
            ("tuples", "gaussian s=1 | gaussian s=1; gaussian s=1 | ball r=1 | gaussian s=0.5 c=1,0"),
            ("alpha", "0, 0.5"),
            ("k", "1"),
            ("points", "50"),
            ("radius", "3"),
        ],
    ),
    (
        "majorant",
        "approximate-identity domination by ||phi||_1 M^{m-1}",
        &[
            ("n", "2"),
            ("tuples", "ball r=1 | ball r=1; gaussian s=1 | ball r=1 | gaussian s=0.5 c=1,0"),
            ("alpha", "0.5"),
            ("points", "50"),
            ("radius", "3"),
        ],
    ),
    (
        "decay",
        "large-|x| decay of S^m_alpha on unit-ball indicators against -(mn - alpha)",
        &[
            ("cases", "1 2 0.5; 1 2 0.9; 2 2 0.5"),
            ("radii", "4, 8, 16, 32"),
            ("strategies", "fixed_probe, full_sup"),
            ("slope_tolerance", "0.02"),
        ],
    ),
    (
        "ratio",
        "norm ratios on growing boxes: divergence inside versus stability outside the region",
        &[
            ("n", "2"),
            ("tuple", "ball r=1"),
            ("alpha", "0.5"),
            ("exponents", "1.3; 4"),
            ("half_widths", "4, 8, 16"),
            ("per_axis", "129"),
            ("growth_threshold", "0.25"),
            ("stable_tolerance", "0.05"),
        ],
    ),
    (
        "oracle",
        "Fourier multiplier path against the spatial average, and the multiplier envelope",
        &[
            ("n", "2, 3"),
            ("fields", "gaussian s=1; bump r=1"),
            ("alpha", "0, 0.3, 0.7"),
            ("t", "0.5, 1, 2"),
            ("x", "0, 1, 2"),
            ("tolerance", "1e-3"),
            ("envelope_alpha", "0, 0.5, 0.9"),
            ("envelope_range", "10, 1000"),
            ("envelope_tolerance", "0.05"),
        ],
    ),
];

/// The nine experiment kinds with their keys and defaults.
pub fn kinds() -> Vec<KindInfo> {
    KINDS
        .iter()
        .map(|(name, description, keys)| KindInfo { name, description, defaults: keys.to_vec() })
        .collect()
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

// ---------------------------------------------------------------------------
// config text

#[derive(Debug, Clone)]
struct Section {
    name: String,
    entries: BTreeMap<String, (String, usize)>,
    defaults: &'static [(&'static str, &'static str)],
}

impl Section {
    fn raw(&self, key: &str) -> (String, String) {
        let default = self.defaults.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        debug_assert!(default.is_some(), "key {key} missing from the defaults of [{}]", self.name);
        match self.entries.get(key) {
            Some((v, line)) => (v.clone(), format!("line {line}, [{}] {key}", self.name)),
            None => (default.unwrap_or_default().to_string(), format!("default [{}] {key}", self.name)),
        }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let (v, at) = self.raw(key);
        parse_f64(&v).ok_or_else(|| Error::Config(format!("{at}: '{v}' is not a number")))
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let (v, at) = self.raw(key);
        let out = split_list(&v, ',')
            .iter()
            .map(|s| parse_f64(s).ok_or_else(|| Error::Config(format!("{at}: '{s}' is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        if out.is_empty() {
            return config_err(format!("{at}: empty list"));
        }
        Ok(out)
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let (v, at) = self.raw(key);
        v.parse().map_err(|_| Error::Config(format!("{at}: '{v}' is not a nonnegative integer")))
    }

    fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        let (v, at) = self.raw(key);
        let out = split_list(&v, ',')
            .iter()
            .map(|s| s.parse().map_err(|_| Error::Config(format!("{at}: '{s}' is not a nonnegative integer"))))
            .collect::<Result<Vec<_>>>()?;
        if out.is_empty() {
            return config_err(format!("{at}: empty list"));
        }
        Ok(out)
    }

    fn alpha_list(&self, key: &str, allow_one: bool) -> Result<Vec<f64>> {
        let list = self.f64_list(key)?;
        let (_, at) = self.raw(key);
        for &a in &list {
            check_config_alpha(a, allow_one).map_err(|e| Error::Config(format!("{at}: {e}")))?;
        }
        Ok(list)
    }

    fn tuples(&self, key: &str, n: usize, base: Option<&Path>) -> Result<Vec<FieldTuple>> {
        let (v, at) = self.raw(key);
        let tuples = split_list(&v, ';')
            .iter()
            .map(|t| parse_tuple(t, n, base).map_err(|e| Error::Config(format!("{at}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if tuples.is_empty() {
            return config_err(format!("{at}: no tuples given"));
        }
        Ok(tuples)
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "infinity" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn split_list(s: &str, sep: char) -> Vec<String> {
    s.split(sep).map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect()
}

fn check_config_alpha(alpha: f64, allow_one: bool) -> std::result::Result<(), String> {
    let ok = if allow_one { (0.0..=1.0).contains(&alpha) } else { (0.0..1.0).contains(&alpha) };
    if ok {
        return Ok(());
    }
    let range = if allow_one { "[0, 1]" } else { "[0, 1)" };
    Err(format!(
        "alpha = {alpha} is outside {range}: the normalization B(mn/2, 1 - alpha) has a pole at alpha = 1 \
         and the family ends with the spherical operator there"
    ))
}

fn parse_tuple(spec: &str, n: usize, base: Option<&Path>) -> Result<FieldTuple> {
    let fields = spec.split('|').map(|f| Field::parse(f.trim(), n, base)).collect::<Result<Vec<_>>>()?;
    FieldTuple::new(fields).map_err(|e| Error::Config(e.to_string()))
}

fn parse_sections(text: &str) -> Result<Vec<(String, BTreeMap<String, (String, usize)>, usize)>> {
    let mut sections: Vec<(String, BTreeMap<String, (String, usize)>, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        // a '#' starts a comment anywhere; no value needs one
        let line = raw.split_once('#').map_or(raw, |(head, _)| head).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {line_no}: unterminated section header")))?
                .trim()
                .to_string();
            if sections.iter().any(|(s, _, _)| *s == name) {
                return config_err(format!("line {line_no}: section [{name}] appears twice"));
            }
            sections.push((name, BTreeMap::new(), line_no));
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected 'key = value', got '{line}'")))?;
        let Some((section, entries, _)) = sections.last_mut() else {
            return config_err(format!("line {line_no}: key outside of any section"));
        };
        let key = k.trim().to_string();
        if entries.contains_key(&key) {
            return config_err(format!("line {line_no}: key '{key}' repeated in [{section}]"));
        }
        entries.insert(key, (v.trim().to_string(), line_no));
    }
    Ok(sections)
}

// ---------------------------------------------------------------------------
// parsed experiments

#[derive(Debug, Clone)]
struct TupleBattery {
    n: usize,
    tuples: Vec<FieldTuple>,
    alphas: Vec<f64>,
    points: usize,
    radius: f64,
}

#[derive(Debug, Clone)]
enum Experiment {
    Identities {
        ms: Vec<usize>,
        ns: Vec<usize>,
        alphas: Vec<f64>,
        tolerance: f64,
        collapse: TupleBattery,
        collapse_t: Vec<f64>,
        collapse_tolerance: f64,
    },
    Region {
        samples: usize,
    },
    Chain(TupleBattery),
    Limits {
        battery: TupleBattery,
        t: Vec<f64>,
        final_tolerance: f64,
        linear_slack: f64,
        recovery_alpha: Vec<f64>,
        recovery_points: usize,
        recovery_t: Vec<f64>,
        recovery_tolerance: f64,
    },
    Slicing {
        battery: TupleBattery,
        k: usize,
    },
    Majorant(TupleBattery),
    Decay {
        cases: Vec<(usize, usize, f64)>,
        radii: Vec<f64>,
        strategies: Vec<DecayStrategy>,
        slope_tolerance: f64,
    },
    Ratio {
        tuple: FieldTuple,
        alpha: f64,
        exponents: Vec<ExponentTuple>,
        half_widths: Vec<f64>,
        per_axis: usize,
        growth_threshold: f64,
        stable_tolerance: f64,
    },
    Oracle {
        ns: Vec<usize>,
        fields: Vec<String>,
        alphas: Vec<f64>,
        ts: Vec<f64>,
        xs: Vec<f64>,
        tolerance: f64,
        envelope_alpha: Vec<f64>,
        envelope_range: (f64, f64),
        envelope_tolerance: f64,
    },
}

impl Experiment {
    fn kind(&self) -> &'static str {
        match self {
            Experiment::Identities { .. } => "identities",
            Experiment::Region { .. } => "region",
            Experiment::Chain(_) => "chain",
            Experiment::Limits { .. } => "limits",
            Experiment::Slicing { .. } => "slicing",
            Experiment::Majorant(_) => "majorant",
            Experiment::Decay { .. } => "decay",
            Experiment::Ratio { .. } => "ratio",
            Experiment::Oracle { .. } => "oracle",
        }
    }
}

/// A validated run description.
#[derive(Debug, Clone)]
pub struct Config {
    pub source: String,
    pub path: Option<PathBuf>,
    pub seed: u64,
    /// `None` means one thread per logical processor.
    pub threads: Option<usize>,
    pub options: CheckOptions,
    experiments: Vec<Experiment>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut c = Self::parse(&text, path.parent())?;
        c.path = Some(path.to_path_buf());
        Ok(c)
    }

    /// Parse config text; relative grid paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        for (name, entries, line) in parse_sections(text)? {
            let defaults = match name.as_str() {
                "run" => RUN_KEYS,
                "quadrature" => QUADRATURE_KEYS,
                other => match KINDS.iter().find(|(k, _, _)| *k == other) {
                    Some((_, _, keys)) => *keys,
                    None => return config_err(format!("line {line}: unknown section [{other}]")),
                },
            };
            if let Some((k, (_, l))) = entries.iter().find(|(k, _)| !defaults.iter().any(|(d, _)| d == k)) {
                let known: Vec<&str> = defaults.iter().map(|(d, _)| *d).collect();
                return config_err(format!("line {l}: unknown key '{k}' in [{name}]; known keys: {}", known.join(", ")));
            }
            sections.insert(name.clone(), Section { name, entries, defaults });
        }
        let section = |name: &str, defaults: &'static [(&'static str, &'static str)]| {
            sections.get(name).cloned().unwrap_or(Section { name: name.to_string(), entries: BTreeMap::new(), defaults })
        };

        let run = section("run", RUN_KEYS);
        let seed = run.usize("seed")? as u64;
        let threads = match run.raw("threads").0.as_str() {
            "auto" => None,
            _ => match run.usize("threads")? {
                0 => return config_err("[run] threads must be positive or 'auto'"),
                t => Some(t),
            },
        };
        let q = section("quadrature", QUADRATURE_KEYS);
        let t_max = match q.raw("t_max").0.as_str() {
            "auto" => None,
            _ => Some(q.f64("t_max")?),
        };
        let options = CheckOptions {
            tolerance_factor: q.f64("tolerance_factor")?,
            panel_order: q.usize("panel_order")?,
            t_min: q.f64("t_min")?,
            t_max,
            per_decade: q.usize("per_decade")?,
            refine_depth: q.usize("refine_depth")?,
            ..CheckOptions::default()
        };
        if options.panel_order < 4 || !(options.t_min > 0.0) || options.per_decade == 0 {
            return config_err("[quadrature] needs panel_order >= 4, t_min > 0 and per_decade >= 1");
        }
        if t_max.is_some_and(|t| !(t > options.t_min)) {
            return config_err("[quadrature] t_max must exceed t_min");
        }
        if !(options.tolerance_factor >= 1.0) {
            return config_err("[quadrature] tolerance_factor must be at least 1");
        }

        let names = split_list(&run.raw("experiments").0, ',');
        if names.is_empty() {
            return config_err("[run] experiments is empty");
        }
        let mut experiments = Vec::new();
        for name in &names {
            if experiments.iter().any(|e: &Experiment| e.kind() == name) {
                return config_err(format!("[run] experiment '{name}' listed twice"));
            }
            let Some((_, _, keys)) = KINDS.iter().find(|(k, _, _)| k == name) else {
                let all: Vec<&str> = KINDS.iter().map(|(k, _, _)| *k).collect();
                return config_err(format!("[run] unknown experiment '{name}'; kinds are {}", all.join(", ")));
            };
            experiments.push(parse_experiment(&section(name, keys), base)?);
        }
        for name in sections.keys() {
            if name != "run" && name != "quadrature" && !names.contains(name) {
                return config_err(format!("section [{name}] is not listed in [run] experiments"));
            }
        }
        Ok(Config { source: text.to_string(), path: None, seed, threads, options, experiments })
    }

    pub fn experiment_kinds(&self) -> Vec<&'static str> {
        self.experiments.iter().map(Experiment::kind).collect()
    }
}

fn positive(v: f64, at: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        config_err(format!("[{at}] must be finite and positive, got {v}"))
    }
}

fn battery(s: &Section, base: Option<&Path>, tuples: &str, n: &str, points: &str, radius: &str) -> Result<TupleBattery> {
    let n = s.usize(n)?;
    if n == 0 {
        return config_err(format!("[{}] n must be positive", s.name));
    }
    Ok(TupleBattery {
        n,
        tuples: s.tuples(tuples, n, base)?,
        alphas: Vec::new(),
        points: s.usize(points)?,
        radius: positive(s.f64(radius)?, &format!("{} {radius}", s.name))?,
    })
}

fn parse_experiment(s: &Section, base: Option<&Path>) -> Result<Experiment> {
    Ok(match s.name.as_str() {
        "identities" => {
            let ms = s.usize_list("m")?;
            let ns = s.usize_list("n")?;
            if ms.iter().any(|&m| m < 1) || ns.iter().any(|&n| n < 1) {
                return config_err("[identities] m and n must be positive");
            }
            let collapse = battery(s, base, "collapse_tuples", "collapse_n", "collapse_points", "collapse_radius")?;
            let collapse_t = s.f64_list("collapse_t")?;
            for &t in &collapse_t {
                positive(t, "identities collapse_t")?;
            }
            Experiment::Identities {
                ms,
                ns,
                alphas: s.alpha_list("alpha", false)?,
                tolerance: s.f64("tolerance")?,
                collapse,
                collapse_t,
                collapse_tolerance: s.f64("collapse_tolerance")?,
            }
        }
        "region" => Experiment::Region { samples: s.usize("samples")? },
        "chain" => {
            let mut b = battery(s, base, "tuples", "n", "points", "radius")?;
            b.alphas = s.alpha_list("alpha", false)?;
            if b.alphas.contains(&0.0) {
                return config_err("[chain] alpha must lie strictly inside (0, 1)");
            }
            Experiment::Chain(b)
        }
        "limits" => {
            let b = battery(s, base, "tuples", "n", "points", "radius")?;
            let t = s.f64_list("t")?;
            let recovery_t = s.f64_list("recovery_t")?;
            for &v in t.iter().chain(&recovery_t) {
                positive(v, "limits t")?;
            }
            Experiment::Limits {
                battery: b,
                t,
                final_tolerance: s.f64("final_tolerance")?,
                linear_slack: s.f64("linear_slack")?,
                recovery_alpha: s.alpha_list("recovery_alpha", true)?,
                recovery_points: s.usize("recovery_points")?,
                recovery_t,
                recovery_tolerance: s.f64("recovery_tolerance")?,
            }
        }
        "slicing" => {
            let mut b = battery(s, base, "tuples", "n", "points", "radius")?;
            b.alphas = s.alpha_list("alpha", false)?;
            let k = s.usize("k")?;
            if let Some(t) = b.tuples.iter().find(|t| k < 1 || k > t.m() || t.m() < 2) {
                return config_err(format!("[slicing] k = {k} needs 1 <= k <= m and m >= 2 (tuple '{}')", t.describe()));
            }
            Experiment::Slicing { battery: b, k }
        }
        "majorant" => {
            let mut b = battery(s, base, "tuples", "n", "points", "radius")?;
            b.alphas = s.alpha_list("alpha", false)?;
            if let Some(t) = b.tuples.iter().find(|t| t.m() < 2) {
                return config_err(format!("[majorant] needs m >= 2 (tuple '{}')", t.describe()));
            }
            Experiment::Majorant(b)
        }
        "decay" => {
            let (v, at) = s.raw("cases");
            let cases = split_list(&v, ';')
                .iter()
                .map(|c| {
                    let w: Vec<&str> = c.split_whitespace().collect();
                    let parsed = match w.as_slice() {
                        [m, n, a] => m.parse::<usize>().ok().zip(n.parse::<usize>().ok()).zip(parse_f64(a)),
                        _ => None,
                    };
                    let ((m, n), a) =
                        parsed.ok_or_else(|| Error::Config(format!("{at}: case '{c}' is not 'm n alpha'")))?;
                    check_config_alpha(a, true).map_err(|e| Error::Config(format!("{at}: {e}")))?;
                    if m < 1 || n < 1 {
                        return config_err(format!("{at}: m and n must be positive in '{c}'"));
                    }
                    Ok((m, n, a))
                })
                .collect::<Result<Vec<_>>>()?;
            if cases.is_empty() {
                return config_err(format!("{at}: no cases"));
            }
            let (v, at) = s.raw("strategies");
            let strategies = split_list(&v, ',')
                .iter()
                .map(|w| match w.as_str() {
                    "fixed_probe" => Ok(DecayStrategy::FixedProbe),
                    "full_sup" => Ok(DecayStrategy::FullSup),
                    other => config_err(format!("{at}: unknown strategy '{other}' (fixed_probe, full_sup)")),
                })
                .collect::<Result<Vec<_>>>()?;
            let radii = s.f64_list("radii")?;
            if radii.iter().any(|&r| !(r >= 2.0)) {
                return config_err("[decay] radii must be at least 2");
            }
            Experiment::Decay { cases, radii, strategies, slope_tolerance: s.f64("slope_tolerance")? }
        }
        "ratio" => {
            let n = s.usize("n")?;
            let (v, at) = s.raw("tuple");
            let tuple = parse_tuple(&v, n, base).map_err(|e| Error::Config(format!("{at}: {e}")))?;
            let alpha = s.f64("alpha")?;
            check_config_alpha(alpha, true).map_err(|e| Error::Config(format!("[ratio] alpha: {e}")))?;
            let (v, at) = s.raw("exponents");
            let exponents = split_list(&v, ';')
                .iter()
                .map(|e| {
                    let p = split_list(e, ',')
                        .iter()
                        .map(|q| parse_f64(q).ok_or_else(|| Error::Config(format!("{at}: '{q}' is not a number"))))
                        .collect::<Result<Vec<_>>>()?;
                    if p.len() != tuple.m() {
                        return config_err(format!("{at}: '{e}' has {} exponents, the tuple has m = {}", p.len(), tuple.m()));
                    }
                    ExponentTuple::new(p).map_err(|err| Error::Config(format!("{at}: {err}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let per_axis = s.usize("per_axis")?;
            if per_axis < 3 {
                return config_err("[ratio] per_axis must be at least 3");
            }
            let half_widths = s.f64_list("half_widths")?;
            if half_widths.windows(2).any(|w| !(w[1] > w[0])) || !(half_widths[0] > 0.0) {
                return config_err("[ratio] half_widths must be positive and increasing");
            }
            Experiment::Ratio {
                tuple,
                alpha,
                exponents,
                half_widths,
                per_axis,
                growth_threshold: s.f64("growth_threshold")?,
                stable_tolerance: s.f64("stable_tolerance")?,
            }
        }
        "oracle" => {
            let ns = s.usize_list("n")?;
            if ns.iter().any(|&n| n < 2) {
                return config_err("[oracle] needs n >= 2");
            }
            let (v, _) = s.raw("fields");
            let fields = split_list(&v, ';');
            for &n in &ns {
                for f in &fields {
                    let field = Field::parse(f, n, base)?;
                    if field.radial().is_none_or(|r| r.center.iter().any(|&c| c != 0.0)) {
                        return config_err(format!("[oracle] field '{f}' must be radial about the origin"));
                    }
                }
            }
            let range = s.f64_list("envelope_range")?;
            let [lo, hi] = range[..] else {
                return config_err("[oracle] envelope_range needs two values");
            };
            let ts = s.f64_list("t")?;
            for &t in &ts {
                positive(t, "oracle t")?;
            }
            Experiment::Oracle {
                ns,
                fields,
                alphas: s.alpha_list("alpha", false)?,
                ts,
                xs: s.f64_list("x")?,
                tolerance: s.f64("tolerance")?,
                envelope_alpha: s.alpha_list("envelope_alpha", false)?,
                envelope_range: (lo, hi),
                envelope_tolerance: s.f64("envelope_tolerance")?,
            }
        }
        other => unreachable!("section [{other}] passed validation"),
    })
}

// ---------------------------------------------------------------------------
// running

/// One CSV line: `experiment,m,n,alpha,param,param_value,quantity,value`.
#[derive(Debug, Clone)]
struct Row {
    m: Option<usize>,
    n: Option<usize>,
    alpha: Option<f64>,
    param: String,
    param_value: String,
    quantity: String,
    value: f64,
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn row(m: Option<usize>, n: Option<usize>, alpha: Option<f64>, param: &str, pv: String, quantity: &str, value: f64) -> Row {
    Row { m, n, alpha, param: param.into(), param_value: pv, quantity: quantity.into(), value }
}

struct Output {
    rows: Vec<Row>,
    json: Value,
    checks: Vec<CheckReport>,
}

/// The outcome of a run: every check report, tagged with its experiment.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub reports: Vec<(String, CheckReport)>,
    pub wall_time: f64,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &(String, CheckReport)> {
        self.reports.iter().filter(|(_, r)| !r.pass)
    }
}

/// Run every experiment of `config`, writing artifacts into `out_dir`.
/// `threads` overrides the config.
pub fn run(config: &Config, out_dir: &Path, threads: Option<usize>) -> Result<RunSummary> {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let threads = threads
        .or(config.threads)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("cannot build a pool of {threads} threads: {e}")))?;
    let mut reports = Vec::new();
    let mut jsonl = String::new();
    let mut outputs = Vec::new();
    for (i, exp) in config.experiments.iter().enumerate() {
        let seed = config.seed.wrapping_add(i as u64);
        let out = pool.install(|| run_experiment(exp, seed, &config.options))?;
        let kind = exp.kind();
        let mut csv = String::from("experiment,m,n,alpha,param,param_value,quantity,value\n");
        for r in &out.rows {
            let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(
                csv,
                "{kind},{},{},{},{},{},{},{}",
                opt(r.m),
                opt(r.n),
                r.alpha.map_or(String::new(), fmt_f64),
                r.param,
                r.param_value,
                r.quantity,
                fmt_f64(r.value)
            );
        }
        std::fs::write(out_dir.join(format!("{kind}.csv")), csv)?;
        let doc = json!({ "experiment": kind, "seed": seed, "results": out.json, "checks": out.checks });
        std::fs::write(out_dir.join(format!("{kind}.json")), serde_json::to_string_pretty(&doc)? + "\n")?;
        outputs.push(format!("{kind}.csv"));
        outputs.push(format!("{kind}.json"));
        for c in out.checks {
            jsonl.push_str(&c.to_json_line());
            jsonl.push('\n');
            reports.push((kind.to_string(), c));
        }
    }
    std::fs::write(out_dir.join("checks.jsonl"), &jsonl)?;
    outputs.push("checks.jsonl".into());
    let wall_time = started.elapsed().as_secs_f64();
    let manifest = json!({
        "library": "maxop-core",
        "version": env!("CARGO_PKG_VERSION"),
        "config_path": config.path.as_ref().map(|p| p.display().to_string()),
        "config": config.source,
        "seed": config.seed,
        "threads": threads,
        "experiments": config.experiment_kinds(),
        "outputs": outputs,
        "passed": reports.iter().all(|(_, r)| r.pass),
        "started_unix": started_unix,
        "wall_time_seconds": wall_time,
    });
    std::fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(RunSummary { out_dir: out_dir.to_path_buf(), reports, wall_time })
}

fn run_experiment(exp: &Experiment, seed: u64, opts: &CheckOptions) -> Result<Output> {
    match exp {
        Experiment::Identities { ms, ns, alphas, tolerance, collapse, collapse_t, collapse_tolerance } => {
            run_identities(ms, ns, alphas, *tolerance, collapse, collapse_t, *collapse_tolerance, seed, opts)
        }
        Experiment::Region { samples } => run_region(*samples, seed),
        Experiment::Chain(b) => run_chain(b, seed, opts),
        Experiment::Limits {
            battery,
            t,
            final_tolerance,
            linear_slack,
            recovery_alpha,
            recovery_points,
            recovery_t,
            recovery_tolerance,
        } => run_limits(
            battery,
            t,
            *final_tolerance,
            *linear_slack,
            recovery_alpha,
            *recovery_points,
            recovery_t,
            *recovery_tolerance,
            seed,
            opts,
        ),
        Experiment::Slicing { battery, k } => run_pointwise(battery, seed, "slicing", |t, pts, a| {
            check_slicing(t, k - 1, pts, a, opts)
        }),
        Experiment::Majorant(b) => {
            run_pointwise(b, seed, "majorant", |t, pts, a| check_majorant(t, a, pts, opts))
        }
        Experiment::Decay { cases, radii, strategies, slope_tolerance } => {
            run_decay(cases, radii, strategies, *slope_tolerance, opts)
        }
        Experiment::Ratio { tuple, alpha, exponents, half_widths, per_axis, growth_threshold, stable_tolerance } => {
            run_ratio(tuple, *alpha, exponents, half_widths, *per_axis, *growth_threshold, *stable_tolerance, opts)
        }
        Experiment::Oracle { ns, fields, alphas, ts, xs, tolerance, envelope_alpha, envelope_range, envelope_tolerance } => {
            run_oracle(ns, fields, alphas, ts, xs, *tolerance, envelope_alpha, *envelope_range, *envelope_tolerance)
        }
    }
}

fn plain_witness(label: String) -> Witness {
    Witness { x: Vec::new(), t: None, alpha: None, tuple: label }
}

#[allow(clippy::too_many_arguments)]
fn run_identities(
    ms: &[usize],
    ns: &[usize],
    alphas: &[f64],
    tolerance: f64,
    collapse: &TupleBattery,
    ts: &[f64],
    collapse_tolerance: f64,
    seed: u64,
    opts: &CheckOptions,
) -> Result<Output> {
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut table = Vec::new();
    for &m in ms {
        for &n in ns {
            for &a in alphas {
                let r = slicing_identity_check(m, n, a)?;
                rows.push(row(Some(m), Some(n), Some(a), "", String::new(), "identity_residual", r));
                table.push(json!({ "m": m, "n": n, "alpha": a, "residual": r }));
                let mut w = plain_witness(format!("m={m} n={n}"));
                w.alpha = Some(a);
                samples.push(Sample { violation: r, tolerance, witness: w });
            }
        }
    }
    let mut checks = vec![reduce("normalization_identity", None, &samples)];
    let points = sample_points(seed, collapse.points, collapse.n, collapse.radius);
    let hl = Averager::new(Operator::HardyLittlewood, opts.panel_order)?;
    let s0 = Averager::new(Operator::Alpha(0.0), opts.panel_order)?;
    let mut per_tuple = Vec::new();
    for (ti, tuple) in collapse.tuples.iter().enumerate() {
        let samples: Vec<Sample> = points
            .par_iter()
            .map(|x| {
                let p = RingProfile::new(tuple, x, opts.profile.clone())?;
                Ok(ts
                    .iter()
                    .map(|&t| {
                        let (a, b) = (s0.value(&p, t), hl.value(&p, t));
                        let rel = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
                        let rel = if a == b { 0.0 } else { rel };
                        Sample {
                            violation: rel,
                            tolerance: collapse_tolerance,
                            witness: Witness { x: x.clone(), t: Some(t), alpha: Some(0.0), tuple: tuple.describe() },
                        }
                    })
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let rep = reduce("alpha_zero_collapse", Some(seed), &samples);
        let worst = samples.iter().map(|s| s.violation).fold(0.0, f64::max);
        rows.push(row(Some(tuple.m()), Some(tuple.n()), Some(0.0), "tuple", ti.to_string(), "collapse_max_rel", worst));
        per_tuple.push(json!({ "tuple": tuple.describe(), "max_relative_difference": worst, "samples": samples.len() }));
        checks.push(rep);
    }
    Ok(Output { rows, json: json!({ "identity": table, "collapse": per_tuple }), checks })
}

/// Expected answer of the exponent inequality n/(mn − α) < p, computed in
/// p-space: Some(true) bounded, Some(false) unbounded, None on the face.
fn exponent_inequality(m: usize, n: usize, alpha: f64, p: f64) -> Option<bool> {
    let denom = (m * n) as f64 - alpha;
    let threshold = if denom > 0.0 { n as f64 / denom } else { f64::INFINITY };
    if p == threshold || (threshold.is_finite() && (p - threshold).abs() <= 1e-12 * threshold) {
        None
    } else {
        Some(p > threshold)
    }
}

fn region_case(rng: &mut ChaCha8Rng) -> (usize, usize, f64, Vec<f64>) {
    let m = rng.gen_range(1..=4usize);
    let n = rng.gen_range(1..=4usize);
    let alpha = match rng.gen_range(0..6) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..1.0),
    };
    let h = m as f64 - alpha / n as f64;
    let p: Vec<f64> = match rng.gen_range(0..10) {
        // on the H face: equal reciprocals summing to h (needs h < m)
        0 if h < m as f64 && h > 0.0 => vec![m as f64 / h; m],
        // one exponent next to 1
        1 => {
            let mut p: Vec<f64> = (0..m).map(|_| rng.gen_range(2.0..50.0)).collect();
            p[0] = 1.0 + 1e-14;
            p
        }
        2 => {
            let mut p: Vec<f64> = (0..m).map(|_| rng.gen_range(1.01..10.0)).collect();
            p[rng.gen_range(0..m)] = f64::INFINITY;
            p
        }
        _ => (0..m).map(|_| 1.0 + rng.gen_range(0.0f64..3.0).exp() - 0.999).collect(),
    };
    (m, n, alpha, p)
}

fn run_region(samples: usize, seed: u64) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut checks = Vec::new();
    let mut disagreements = Vec::new();
    for i in 0..samples {
        let (m, n, alpha, p) = region_case(&mut rng);
        let e = ExponentTuple::new(p.clone())?;
        let v = region_classify(m, n, alpha, &e)?;
        let name = match v.region {
            Region::BoundedInterior => "bounded_interior",
            Region::Unbounded => "unbounded",
            Region::BoundaryHFace => "boundary_h_face",
            Region::BoundaryOtherFace => "boundary_other_face",
        };
        *counts.entry(name).or_default() += 1;
        let got = match v.region {
            Region::BoundedInterior | Region::BoundaryOtherFace => Some(true),
            Region::Unbounded => Some(false),
            Region::BoundaryHFace => None,
        };
        let want = exponent_inequality(m, n, alpha, e.target());
        let agree = got == want;
        if !agree && disagreements.len() < 20 {
            disagreements.push(json!({ "index": i, "m": m, "n": n, "alpha": alpha, "p": p, "region": name }));
        }
        let mut w = plain_witness(format!("m={m} n={n} p={p:?}"));
        w.alpha = Some(alpha);
        checks.push(Sample { violation: if agree { 0.0 } else { 1.0 }, tolerance: 0.0, witness: w });
    }
    let report = reduce("region_agreement", Some(seed), &checks);
    let disagreeing = checks.iter().filter(|s| s.violation > 0.0).count();
    let mut rows: Vec<Row> =
        counts.iter().map(|(k, &c)| row(None, None, None, "region", k.to_string(), "count", c as f64)).collect();
    rows.push(row(None, None, None, "", String::new(), "disagreements", disagreeing as f64));
    Ok(Output {
        rows,
        json: json!({ "samples": samples, "counts": counts, "disagreements": disagreeing, "examples": disagreements }),
        checks: vec![report],
    })
}

fn run_chain(b: &TupleBattery, seed: u64, opts: &CheckOptions) -> Result<Output> {
    let points = sample_points(seed, b.points, b.n, b.radius);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut docs = Vec::new();
    for (ti, tuple) in b.tuples.iter().enumerate() {
        let samples = check_chain(tuple, &b.alphas, &points, opts)?;
        // per point: for each alpha, (M − S_α, S_α − S)
        for (k, s) in samples.iter().enumerate() {
            let point = k / (2 * b.alphas.len());
            let which = if k % 2 == 0 { "hl_minus_alpha" } else { "alpha_minus_spherical" };
            rows.push(row(
                Some(tuple.m()),
                Some(tuple.n()),
                s.witness.alpha,
                "tuple;point",
                format!("{ti};{point}"),
                which,
                s.violation,
            ));
        }
        let rep = reduce("chain", Some(seed), &samples);
        docs.push(json!({ "tuple": tuple.describe(), "report": rep }));
        checks.push(rep);
    }
    Ok(Output { rows, json: json!({ "alphas": b.alphas, "points": points, "tuples": docs }), checks })
}

fn run_pointwise(
    b: &TupleBattery,
    seed: u64,
    relation: &str,
    check: impl Fn(&FieldTuple, &[Vec<f64>], f64) -> Result<Vec<Sample>>,
) -> Result<Output> {
    let points = sample_points(seed, b.points, b.n, b.radius);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut docs = Vec::new();
    for (ti, tuple) in b.tuples.iter().enumerate() {
        for &a in &b.alphas {
            let samples = check(tuple, &points, a)?;
            for (k, s) in samples.iter().enumerate() {
                rows.push(row(Some(tuple.m()), Some(tuple.n()), Some(a), "tuple;point", format!("{ti};{k}"), "violation", s.violation));
            }
            let rep = reduce(relation, Some(seed), &samples);
            docs.push(json!({ "tuple": tuple.describe(), "alpha": a, "report": rep }));
            checks.push(rep);
        }
    }
    Ok(Output { rows, json: json!({ "points": points, "tuples": docs }), checks })
}

#[allow(clippy::too_many_arguments)]
fn run_limits(
    b: &TupleBattery,
    ts: &[f64],
    final_tolerance: f64,
    slack: f64,
    recovery_alpha: &[f64],
    recovery_points: usize,
    recovery_t: &[f64],
    recovery_tolerance: f64,
    seed: u64,
    opts: &CheckOptions,
) -> Result<Output> {
    let mut points = vec![vec![0.0; b.n]];
    points.extend(sample_points(seed, b.points, b.n, b.radius));
    let rec_points = sample_points(seed.wrapping_add(1 << 32), recovery_points, b.n, b.radius);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut docs = Vec::new();
    for (ti, tuple) in b.tuples.iter().enumerate() {
        let cases: Vec<(usize, &Vec<f64>, f64)> =
            points.iter().enumerate().flat_map(|(i, x)| ts.iter().map(move |&t| (i, x, t))).collect();
        let reports = cases
            .par_iter()
            .map(|(_, x, t)| check_limits(tuple, x, *t, opts))
            .collect::<Result<Vec<_>>>()?;
        for ((pi, _, t), r) in cases.iter().zip(&reports) {
            let pv = format!("{ti};{pi};{}", fmt_f64(*t));
            for &(a, e) in &r.to_one {
                rows.push(row(Some(tuple.m()), Some(tuple.n()), Some(a), "tuple;point;t", pv.clone(), "rel_error_to_spherical", e));
            }
            for &(a, e) in &r.to_zero {
                rows.push(row(Some(tuple.m()), Some(tuple.n()), Some(a), "tuple;point;t", pv.clone(), "rel_error_to_hl", e));
            }
            if let Some(g) = r.gap_exponent {
                rows.push(row(Some(tuple.m()), Some(tuple.n()), None, "tuple;point;t", pv.clone(), "gap_exponent", g));
            }
        }
        let limit_reports: Vec<CheckReport> =
            limit_samples(tuple, &reports, final_tolerance, slack).iter().map(|(name, s)| reduce(name, Some(seed), s)).collect();
        let mut recovery = Vec::new();
        let mut recovery_reports = Vec::new();
        for &a in recovery_alpha {
            let rec = check_recovery(tuple, a, &rec_points, recovery_t, opts)?;
            for (pi, r) in rec.iter().enumerate() {
                for &(t, e) in &r.errors {
                    rows.push(row(
                        Some(tuple.m()),
                        Some(tuple.n()),
                        Some(a),
                        "tuple;point;t",
                        format!("{ti};{pi};{}", fmt_f64(t)),
                        "recovery_error",
                        e,
                    ));
                }
            }
            for (name, s) in recovery_samples(tuple, &rec, recovery_tolerance) {
                let rep = reduce(&name, Some(seed), &s);
                recovery.push(json!({ "alpha": a, "report": rep }));
                recovery_reports.push(rep);
            }
        }
        docs.push(json!({
            "tuple": tuple.describe(),
            "limits": reports,
            "reports": limit_reports,
            "recovery": recovery,
        }));
        checks.extend(limit_reports);
        checks.extend(recovery_reports);
    }
    Ok(Output { rows, json: json!({ "t": ts, "recovery_t": recovery_t, "tuples": docs }), checks })
}

fn run_decay(
    cases: &[(usize, usize, f64)],
    radii: &[f64],
    strategies: &[DecayStrategy],
    tol: f64,
    opts: &CheckOptions,
) -> Result<Output> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut docs = Vec::new();
    for &(m, n, alpha) in cases {
        let fits = strategies.iter().map(|&s| decay_fit(m, n, alpha, radii, s, opts)).collect::<Result<Vec<_>>>()?;
        let mut samples = Vec::new();
        for f in &fits {
            let tag = match f.strategy {
                DecayStrategy::FixedProbe => "fixed_probe",
                DecayStrategy::FullSup => "full_sup",
            };
            for (r, v) in f.radii.iter().zip(&f.values) {
                rows.push(row(Some(m), Some(n), Some(alpha), "radius", fmt_f64(*r), &format!("value_{tag}"), *v));
            }
            rows.push(row(Some(m), Some(n), Some(alpha), "", String::new(), &format!("slope_{tag}"), f.slope));
            if let Some(c) = f.corrected_slope {
                rows.push(row(Some(m), Some(n), Some(alpha), "", String::new(), &format!("corrected_slope_{tag}"), c));
            }
            // the probe is the sharpness construction and is fitted as a pure
            // power; the sup carries a 1/r correction at these radii
            let (err, label) = match f.strategy {
                DecayStrategy::FixedProbe => (f.relative_slope_error(), "fixed_probe slope"),
                DecayStrategy::FullSup => {
                    (f.relative_corrected_error().unwrap_or(f.relative_slope_error()), "full_sup corrected slope")
                }
            };
            let mut w = plain_witness(format!("m={m} n={n} {label}"));
            w.alpha = Some(alpha);
            samples.push(Sample { violation: err, tolerance: tol, witness: w });
        }
        let mut rep = vec![reduce("decay_slope", None, &samples)];
        let probe = fits.iter().find(|f| f.strategy == DecayStrategy::FixedProbe);
        let sup = fits.iter().find(|f| f.strategy == DecayStrategy::FullSup);
        if let (Some(p), Some(s)) = (probe, sup) {
            let mut w = plain_witness(format!("m={m} n={n} full_sup slope vs fixed_probe slope"));
            w.alpha = Some(alpha);
            let dominance = Sample { violation: p.slope - s.slope, tolerance: p.slope_error + s.slope_error, witness: w };
            rep.push(reduce("decay_sup_dominates_probe", None, &[dominance]));
        }
        docs.push(json!({ "m": m, "n": n, "alpha": alpha, "fits": fits, "reports": rep }));
        checks.extend(rep);
    }
    Ok(Output { rows, json: json!({ "radii": radii, "cases": docs }), checks })
}

#[allow(clippy::too_many_arguments)]
fn run_ratio(
    tuple: &FieldTuple,
    alpha: f64,
    exponents: &[ExponentTuple],
    half_widths: &[f64],
    per_axis: usize,
    growth_threshold: f64,
    stable_tolerance: f64,
    opts: &CheckOptions,
) -> Result<Output> {
    let center = vec![0.0; tuple.n()];
    let series = ratio_series(tuple, alpha, exponents, &center, half_widths, per_axis, growth_threshold, opts)?;
    let (m, n) = (tuple.m(), tuple.n());
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut docs = Vec::new();
    for (ei, s) in series.iter().enumerate() {
        let verdict = region_classify(m, n, alpha, &s.exponents)?;
        for p in &s.probes {
            rows.push(row(Some(m), Some(n), Some(alpha), "exponents;half_width", format!("{ei};{}", fmt_f64(p.half_width)), "ratio", p.ratio));
        }
        for (k, g) in s.growth.iter().enumerate() {
            rows.push(row(Some(m), Some(n), Some(alpha), "exponents;step", format!("{ei};{k}"), "growth_per_doubling", *g));
        }
        let first = s.probes.first().map_or(1.0, |p| p.ratio);
        let last = s.probes.last().map_or(1.0, |p| p.ratio);
        let change = (last / first - 1.0).abs();
        let mut w = plain_witness(format!("{} p={:?}", tuple.describe(), s.exponents.exponents()));
        w.alpha = Some(alpha);
        let expectation = match verdict.region {
            Region::Unbounded => {
                let min_growth = s.growth.iter().copied().fold(f64::INFINITY, f64::min);
                samples.push(Sample { violation: growth_threshold - min_growth, tolerance: 0.0, witness: w });
                "divergent"
            }
            Region::BoundedInterior | Region::BoundaryOtherFace => {
                samples.push(Sample { violation: change, tolerance: stable_tolerance, witness: w });
                "stable"
            }
            Region::BoundaryHFace => "no verdict",
        };
        docs.push(json!({
            "exponents": s.exponents.exponents(),
            "region": verdict.region,
            "expected": expectation,
            "flagged_divergent": s.flagged_divergent,
            "total_change": change,
            "growth": s.growth,
            "probes": s.probes,
        }));
    }
    let checks = vec![reduce("ratio_dichotomy", None, &samples)];
    Ok(Output {
        rows,
        json: json!({ "tuple": tuple.describe(), "alpha": alpha, "per_axis": per_axis, "series": docs }),
        checks,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_oracle(
    ns: &[usize],
    fields: &[String],
    alphas: &[f64],
    ts: &[f64],
    xs: &[f64],
    tolerance: f64,
    envelope_alpha: &[f64],
    (lo, hi): (f64, f64),
    envelope_tolerance: f64,
) -> Result<Output> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut docs = Vec::new();
    for &n in ns {
        for spec in fields {
            let field = Field::parse(spec, n, None)?;
            let spectrum = radial_fourier(&field, &SpectralGrid::default())?;
            let tuple = FieldTuple::new(vec![field.clone()])?;
            let cases: Vec<(f64, f64, f64)> = xs
                .iter()
                .flat_map(|&x| alphas.iter().flat_map(move |&a| ts.iter().map(move |&t| (x, a, t))))
                .collect();
            let samples = cases
                .par_iter()
                .map(|&(xr, a, t)| {
                    let mut x = vec![0.0; n];
                    x[0] = xr;
                    let p = RingProfile::new(&tuple, &x, Default::default())?;
                    let space = Averager::new(Operator::Alpha(a), crate::operator::maximal::DEFAULT_PANEL_ORDER)?.value(&p, t);
                    let four = s_alpha_fourier(&spectrum, a, t, &x)?;
                    let rel = (four.value - space).abs() / space.max(1e-6);
                    Ok((space, four.value, Sample {
                        violation: rel,
                        tolerance,
                        witness: Witness { x, t: Some(t), alpha: Some(a), tuple: tuple.describe() },
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            for ((xr, a, t), (space, four, s)) in cases.iter().zip(&samples) {
                let pv = format!("{};{}", fmt_f64(*xr), fmt_f64(*t));
                rows.push(row(Some(1), Some(n), Some(*a), "x;t", pv.clone(), "spatial", *space));
                rows.push(row(Some(1), Some(n), Some(*a), "x;t", pv.clone(), "fourier", *four));
                rows.push(row(Some(1), Some(n), Some(*a), "x;t", pv, "relative_difference", s.violation));
            }
            let s: Vec<Sample> = samples.into_iter().map(|(_, _, s)| s).collect();
            let rep = reduce("fourier_dual_path", None, &s);
            docs.push(json!({ "n": n, "field": field.to_string(), "cutoff": spectrum.cutoff, "report": rep }));
            checks.push(rep);
        }
        let fits = envelope_alpha.iter().map(|&a| envelope_slope(a, n, lo, hi)).collect::<Result<Vec<_>>>()?;
        let mut samples = Vec::new();
        for f in &fits {
            rows.push(row(Some(1), Some(n), Some(f.alpha), "", String::new(), "envelope_slope", f.slope));
            let mut w = plain_witness(format!("multiplier envelope n={n}"));
            w.alpha = Some(f.alpha);
            samples.push(Sample { violation: (f.slope - f.target).abs(), tolerance: envelope_tolerance, witness: w });
        }
        let rep = reduce("fourier_envelope", None, &samples);
        let fit_docs: Vec<Value> = fits
            .iter()
            .map(|f| json!({ "alpha": f.alpha, "slope": f.slope, "intercept": f.intercept, "target": f.target, "maxima": f.maxima }))
            .collect();
        docs.push(json!({ "n": n, "envelope": fit_docs, "report": rep }));
        checks.push(rep);
    }
    Ok(Output { rows, json: json!({ "range": [lo, hi], "results": docs }), checks })
}
