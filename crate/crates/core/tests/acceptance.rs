//! Acceptance battery. Each test prints one `criterion N PASS|FAIL` line to
//! stderr (uncaptured) and then asserts the criterion at its pinned tolerance.
//!
//! Criteria 2 through 10 read the artifacts of one run of configs/default.ini,
//! which criterion 12 repeats with a different thread count.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use maxop_core::inequality::CheckReport;
use maxop_core::lp::{region_classify, ExponentTuple, Region};
use maxop_core::operator::{Averager, Operator, ProfileOptions, RingProfile};
use maxop_core::quadrature::{jacobi_rule, sphere_rule};
use maxop_core::runner::{run, Config, RunSummary};
use maxop_core::special::{majorant_l1, norm_constant, slicing_identity_check};
use maxop_core::{Field, FieldTuple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    let mark = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {mark} {name}: {detail}");
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn default_config() -> Config {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.ini");
    Config::load(&path).expect("default config parses")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn default_run() -> &'static RunSummary {
    static RUN: OnceLock<RunSummary> = OnceLock::new();
    RUN.get_or_init(|| run(&default_config(), &scratch("first"), Some(2)).expect("default run completes"))
}

fn reports(kind: &str, relation: &str) -> Vec<&'static CheckReport> {
    let r: Vec<_> = default_run()
        .reports
        .iter()
        .filter(|(k, r)| k == kind && r.relation == relation)
        .map(|(_, r)| r)
        .collect();
    assert!(!r.is_empty(), "no {kind}/{relation} report");
    r
}

fn results(kind: &str) -> Value {
    let text = fs::read_to_string(default_run().out_dir.join(format!("{kind}.json"))).unwrap();
    serde_json::from_str::<Value>(&text).unwrap()["results"].clone()
}

fn worst(rs: &[&CheckReport]) -> f64 {
    rs.iter().map(|r| r.worst_violation).fold(f64::NEG_INFINITY, f64::max)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

/// ln Γ by the Lanczos approximation (g = 7, 9 terms).
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

fn sphere_area(k: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(k as f64 / 2.0) / ln_gamma(k as f64 / 2.0).exp()
}

fn lsq_line(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope s of ln v = c + s ln r + a / r, by normal equations and Cramer's rule.
fn corrected_slope(radii: &[f64], values: &[f64]) -> f64 {
    let rows: Vec<[f64; 3]> = radii.iter().map(|&r| [1.0, r.ln(), 1.0 / r]).collect();
    let mut m = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (row, v) in rows.iter().zip(values) {
        for i in 0..3 {
            b[i] += row[i] * v.ln();
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut m1 = m;
    for i in 0..3 {
        m1[i][1] = b[i];
    }
    det(&m1) / det(&m)
}

#[test]
fn criterion_01_normalization_identity() {
    let mut worst_lib = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for m in [2, 3] {
        for n in [2, 3, 4] {
            for alpha in [0.0, 0.25, 0.5, 0.9] {
                worst_lib = worst_lib.max(slicing_identity_check(m, n, alpha).unwrap());
                // c_κ = 2 / (|S^{κ-1}| B(κ/2, 1-α)), ‖φ‖ = |S^{k-1}| B(k/2, n/2+1-α) / 2
                let c = |k: usize| 2.0 / (sphere_area(k) * beta(k as f64 / 2.0, 1.0 - alpha));
                let k = (m - 1) * n;
                let phi = sphere_area(k) * beta(k as f64 / 2.0, n as f64 / 2.0 + 1.0 - alpha) / 2.0;
                let lib = norm_constant(m, n, alpha).unwrap().value / norm_constant(1, n, alpha).unwrap().value
                    * majorant_l1(m - 1, n, alpha).unwrap();
                worst_oracle = worst_oracle.max((c(m * n) / c(n) * phi - 1.0).abs()).max((lib - 1.0).abs());
            }
        }
    }
    let pass = worst_lib <= 1e-12 && worst_oracle <= 1e-12;
    verdict(1, "normalization identity", pass, format!("residual {worst_lib:.2e}, independent constants {worst_oracle:.2e} (tol 1e-12)"));
}

#[test]
fn criterion_02_alpha_zero_collapse() {
    let battery = worst(&reports("identities", "alpha_zero_collapse"));
    // closed form: the ball average of a centered unit-ball indicator is min(1, t^{-n})
    let mut closed = 0.0f64;
    for n in [2usize, 3] {
        let tuple = FieldTuple::new(vec![Field::unit_ball(n)]).unwrap();
        let p = RingProfile::new(&tuple, &vec![0.0; n], ProfileOptions::default()).unwrap();
        let s0 = Averager::new(Operator::Alpha(0.0), 32).unwrap();
        for t in [0.5f64, 1.5, 2.0, 4.0] {
            let want = t.powi(-(n as i32)).min(1.0);
            closed = closed.max((s0.value(&p, t) - want).abs() / want);
        }
    }
    let pass = battery <= 1e-10 && closed <= 1e-10;
    verdict(2, "alpha = 0 collapse", pass, format!("battery {battery:.2e}, closed form {closed:.2e} (tol 1e-10 relative)"));
}

#[test]
fn criterion_03_maximal_chain() {
    let r = reports("chain", "chain");
    let cfg = default_config();
    let text = &cfg.source;
    let samples: usize = r.iter().map(|r| r.samples).sum();
    let pass = r.iter().all(|r| r.pass) && samples >= 4 * 100 * 3 && text.contains("points = 100");
    verdict(3, "M <= S_alpha <= S chain", pass, format!("{samples} samples, worst excess {:.2e}", worst(&r)));
}

#[test]
fn criterion_04_alpha_limits() {
    // exact values at the center for the unit Gaussian, n = 2, t = 1:
    // S_{α,1} = (1−α) e^{-1} Σ_k 1 / (k! (k+1−α)), S_{1,1} = e^{-1}
    let tuple = FieldTuple::new(vec![Field::gaussian(1.0, vec![0.0, 0.0]).unwrap()]).unwrap();
    let p = RingProfile::new(&tuple, &[0.0, 0.0], ProfileOptions::default()).unwrap();
    let exact = |a: f64| {
        let mut s = 0.0;
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            s += 1.0 / (fact * (k as f64 + 1.0 - a));
        }
        (1.0 - a) * (-1.0f64).exp() * s
    };
    let mut oracle = 0.0f64;
    for a in [0.9, 0.99, 0.999] {
        let v = Averager::new(Operator::Alpha(a), 32).unwrap().value(&p, 1.0);
        oracle = oracle.max((v - exact(a)).abs());
    }
    let e1 = (-1.0f64).exp();
    let exact_gap = (exact(0.999) - e1).abs() / e1;

    let fin = reports("limits", "limit_final_error");
    let mono = reports("limits", "limit_monotone");
    let gap = reports("limits", "limit_linear_gap");
    let exponents: Vec<f64> = results("limits")["tuples"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|t| t["limits"].as_array().unwrap().clone())
        .filter_map(|l| l["gap_exponent"].as_f64())
        .collect();
    let min_exp = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    let final_ok = fin.iter().all(|r| r.pass);
    let pass = final_ok && mono.iter().all(|r| r.pass) && gap.iter().all(|r| r.pass) && oracle < 1e-8;
    verdict(
        4,
        "alpha limits",
        pass,
        format!(
            "final error {:.3e} (tol 1e-3), monotone {}, gap exponent min {min_exp:.3} (linear within 20%), \
             series oracle agreement {oracle:.1e}; exact Gaussian gap at alpha 0.999 is {exact_gap:.4e}",
            worst(&fin),
            mono.iter().all(|r| r.pass),
        ),
    );
}

#[test]
fn criterion_05_slicing_bound() {
    let r = reports("slicing", "slicing");
    let mut ms: Vec<usize> = results("slicing")["tuples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["tuple"].as_str().unwrap().matches('|').count() + 1)
        .collect();
    ms.dedup();
    let samples: usize = r.iter().map(|r| r.samples).sum();
    let pass = r.iter().all(|r| r.pass) && ms.contains(&2) && ms.contains(&3);
    verdict(5, "slicing bound", pass, format!("{samples} samples over m {ms:?}, worst excess {:.2e}", worst(&r)));
}

#[test]
fn criterion_06_sharpness_exponents() {
    let cases = results("decay")["cases"].as_array().unwrap().clone();
    let mut lines = Vec::new();
    let mut pass = reports("decay", "decay_slope").iter().all(|r| r.pass) && cases.len() == 3;
    for c in &cases {
        let (m, n, a) = (f(&c["m"]), f(&c["n"]), f(&c["alpha"]));
        let target = -(m * n - a);
        for fit in c["fits"].as_array().unwrap() {
            let radii: Vec<f64> = fit["radii"].as_array().unwrap().iter().map(f).collect();
            let vals: Vec<f64> = fit["values"].as_array().unwrap().iter().map(f).collect();
            let logs: (Vec<f64>, Vec<f64>) = (radii.iter().map(|r| r.ln()).collect(), vals.iter().map(|v| v.ln()).collect());
            let slope = if fit["strategy"] == "full_sup" { corrected_slope(&radii, &vals) } else { lsq_line(&logs.0, &logs.1) };
            let rel = (slope / target - 1.0).abs();
            pass &= rel <= 0.02;
            lines.push(format!("({m},{n},{a}) {} {slope:.4} vs {target} ({:.2}%)", fit["strategy"].as_str().unwrap(), 100.0 * rel));
        }
    }
    verdict(6, "sharpness exponents", pass, lines.join("; "));
}

#[test]
fn criterion_07_region_predicate() {
    assert!(reports("region", "region_agreement").iter().all(|r| r.pass));
    // an independent sweep: bounded iff n/(mn − α) < p, with 1/p = Σ 1/p_i
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    let mut disagree = 0;
    for _ in 0..10_000 {
        let m = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=5usize);
        let alpha: f64 = if rng.gen_bool(0.2) { rng.gen_range(0..2) as f64 } else { rng.gen() };
        let threshold = n as f64 / (m as f64 * n as f64 - alpha);
        let even = threshold.is_finite() && threshold * (m as f64) > 1.01;
        let p: Vec<f64> = match rng.gen_range(0..8) {
            // p exactly on the threshold, split evenly
            0 if even => vec![threshold * m as f64; m],
            // just inside or outside the threshold
            1 if even => {
                let s = if rng.gen_bool(0.5) { 1.0 + 1e-9 } else { 1.0 - 1e-9 };
                vec![threshold * m as f64 * s; m]
            }
            2 => {
                let mut p: Vec<f64> = (0..m).map(|_| rng.gen_range(1.5..20.0)).collect();
                p[0] = 1.0 + 1e-15;
                p
            }
            3 => (0..m).map(|_| if rng.gen_bool(0.5) { f64::INFINITY } else { rng.gen_range(1.05..8.0) }).collect(),
            _ => (0..m).map(|_| 1.0 + rng.gen_range(1e-3f64..30.0)).collect(),
        };
        let target = 1.0 / p.iter().map(|q| 1.0 / q).sum::<f64>();
        let v = region_classify(m, n, alpha, &ExponentTuple::new(p).unwrap()).unwrap();
        let on_face = (target / threshold - 1.0).abs() < 1e-11 || target == threshold;
        let ok = match v.region {
            Region::BoundaryHFace => on_face,
            Region::BoundedInterior | Region::BoundaryOtherFace => !on_face && threshold < target,
            Region::Unbounded => !on_face && threshold > target,
        };
        *tally.entry(format!("{:?}", v.region)).or_default() += 1;
        disagree += usize::from(!ok);
    }
    verdict(7, "region predicate", disagree == 0, format!("{disagree} disagreements in 10000, {tally:?}"));
}

#[test]
fn criterion_08_fourier_oracle() {
    let dual = reports("oracle", "fourier_dual_path");
    let envelope = reports("oracle", "fourier_envelope");
    let mut slope_err = 0.0f64;
    for r in results("oracle")["results"].as_array().unwrap() {
        if let (Some(env), Some(n)) = (r["envelope"].as_array(), r["n"].as_u64()) {
            for e in env {
                let target = -((n as f64 + 1.0) / 2.0 - f(&e["alpha"]));
                slope_err = slope_err.max((f(&e["slope"]) - target).abs());
            }
        }
    }
    let pass = dual.iter().all(|r| r.pass) && envelope.iter().all(|r| r.pass) && slope_err <= 0.05;
    verdict(8, "Fourier oracle", pass, format!("dual path {:.2e} (tol 1e-3), envelope slope error {slope_err:.2e} (tol 0.05)", worst(&dual)));
}

#[test]
fn criterion_09_ratio_divergence() {
    let res = results("ratio");
    let mut detail = Vec::new();
    let mut pass = true;
    for s in res["series"].as_array().unwrap() {
        let p = f(&s["exponents"][0]);
        let probes = s["probes"].as_array().unwrap();
        let ratios: Vec<f64> = probes.iter().map(|q| f(&q["ratio"])).collect();
        if p < 4.0 / 3.0 {
            // growth per doubling of the box half-width
            let growth: Vec<f64> = ratios.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
            pass &= growth.len() >= 2 && growth.iter().all(|&g| g >= 0.25);
            detail.push(format!("p={p}: ratios {ratios:.4?}, growth {growth:.4?} (need >= 0.25)"));
        } else {
            let change = (ratios.last().unwrap() / ratios[0] - 1.0).abs();
            pass &= change <= 0.05;
            detail.push(format!("p={p}: ratios {ratios:.4?}, change {change:.2e} (tol 0.05)"));
        }
    }
    pass &= reports("ratio", "ratio_dichotomy").iter().all(|r| r.pass);
    verdict(9, "ratio divergence signature", pass, detail.join("; "));
}

#[test]
fn criterion_10_small_scale_recovery() {
    let fin = reports("limits", "recovery_final_error");
    let mono = reports("limits", "recovery_monotone");
    let per_alpha = fin.iter().map(|r| r.samples).max().unwrap_or(0);
    let pass = per_alpha >= 20 && fin.iter().all(|r| r.pass) && mono.iter().all(|r| r.pass);
    verdict(10, "t -> 0 recovery", pass, format!("{per_alpha} points per alpha, final error {:.2e} (tol 1e-2), monotone {}", worst(&fin), mono.iter().all(|r| r.pass)));
}

#[test]
fn criterion_11_quadrature_exactness() {
    let mut jac = 0.0f64;
    for (a, b) in [(0.0, 0.0), (-0.5, 0.3), (0.5, -0.9), (2.0, -0.5), (-0.99, 1.5)] {
        for order in [1usize, 4, 16, 32] {
            let rule = jacobi_rule(order, a, b).unwrap();
            for k in 0..2 * order {
                let got = rule.integrate(|u| u.powi(k as i32));
                let want = beta(a + k as f64 + 1.0, b + 1.0);
                jac = jac.max((got / want - 1.0).abs());
            }
        }
    }
    // ∫ x^β dσ = 2 Π Γ((β_i+1)/2) / Γ((|β|+κ)/2) for even β, 0 otherwise
    let mut sph = 0.0f64;
    for kappa in [2usize, 3, 4, 6] {
        let degree = 10;
        let rule = sphere_rule(kappa, degree).unwrap();
        let mut beta_idx = vec![0usize; kappa];
        loop {
            let total: usize = beta_idx.iter().sum();
            if total <= degree {
                let got = rule.integrate(|x| x.iter().zip(&beta_idx).map(|(v, &e)| v.powi(e as i32)).product());
                let want = if beta_idx.iter().all(|e| e % 2 == 0) {
                    let num: f64 = beta_idx.iter().map(|&e| ln_gamma((e as f64 + 1.0) / 2.0)).sum();
                    2.0 * (num - ln_gamma((total + kappa) as f64 / 2.0)).exp()
                } else {
                    0.0
                };
                sph = sph.max((got - want).abs() / want.abs().max(1.0));
            }
            // next multi-index with entries up to degree
            let mut i = 0;
            while i < kappa && beta_idx[i] == degree {
                beta_idx[i] = 0;
                i += 1;
            }
            if i == kappa {
                break;
            }
            beta_idx[i] += 1;
        }
    }
    let pass = jac <= 1e-11 && sph <= 1e-11;
    verdict(11, "quadrature exactness", pass, format!("Jacobi moments {jac:.2e}, sphere monomials {sph:.2e} (tol 1e-11)"));
}

#[test]
fn criterion_12_determinism() {
    let first = default_run();
    let second = run(&default_config(), &scratch("second"), Some(1)).expect("second run completes");
    let listing = |dir: &Path| {
        let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.file_name().unwrap() != "manifest.json")
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect();
        v.sort();
        v
    };
    let (a, b) = (listing(&first.out_dir), listing(&second.out_dir));
    let differing: Vec<&str> = a.iter().zip(&b).filter(|(x, y)| x != y).map(|(x, _)| x.0.as_str()).collect();
    let pass = a.len() == b.len() && a.len() == 19 && differing.is_empty();
    verdict(12, "determinism", pass, format!("{} artifacts compared across 2 and 1 threads, differing {differing:?}", a.len()));
}
