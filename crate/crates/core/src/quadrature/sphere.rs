use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::jacobi::jacobi_rule;
use crate::error::{usage, Result};
use crate::special::ln_sphere_measure;

/// Largest dimension served by the product rule.
pub const PRODUCT_MAX_KAPPA: usize = 8;
/// Cap on product-rule size; past this the QMC rule is the practical choice.
pub const PRODUCT_MAX_POINTS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereKind {
    ProductAngles,
    Qmc,
}

/// Points and weights on the unit sphere S^{κ-1} ⊂ R^κ. Weights sum to the
/// surface measure of the sphere. `points` is flattened, κ entries per point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereRule {
    pub kappa: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: SphereKind,
    pub degree_or_samples: usize,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.kappa..(i + 1) * self.kappa]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.kappa).zip(self.weights.iter().copied())
    }

    /// Σ w_i g(θ_i) ≈ ∫_{S^{κ-1}} g dσ.
    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * g(p)).sum()
    }
}

/// Product rule exact for polynomials of total degree ≤ `degree`.
///
/// Built recursively from x = (t, √(1-t²)·y) with y on S^{κ-2}: the polar
/// coordinate t carries the weight (1-t²)^{(κ-3)/2}, handled by a
/// Gauss–Gegenbauer rule with ⌊degree/2⌋+1 nodes; the circle at the bottom
/// of the recursion uses degree+1 equispaced points.
pub fn sphere_rule(kappa: usize, degree: usize) -> Result<SphereRule> {
    if kappa < 2 {
        return usage(format!("sphere rules need kappa >= 2, got {kappa}"));
    }
    if kappa > PRODUCT_MAX_KAPPA {
        return usage(format!(
            "product sphere rules are limited to kappa <= {PRODUCT_MAX_KAPPA} (got {kappa}); use sphere_rule_qmc"
        ));
    }
    let polar = degree / 2 + 1;
    let count = (degree + 1) * polar.pow(kappa as u32 - 2);
    if count > PRODUCT_MAX_POINTS {
        return usage(format!(
            "product sphere rule for kappa={kappa}, degree={degree} needs {count} points; use sphere_rule_qmc"
        ));
    }
    let (points, weights) = product_rule(kappa, degree)?;
    Ok(SphereRule {
        kappa,
        points,
        weights,
        kind: SphereKind::ProductAngles,
        degree_or_samples: degree,
    })
}

fn product_rule(kappa: usize, degree: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if kappa == 2 {
        let k = degree + 1;
        let mut pts = Vec::with_capacity(2 * k);
        for j in 0..k {
            let phi = 2.0 * PI * j as f64 / k as f64;
            pts.push(phi.cos());
            pts.push(phi.sin());
        }
        return Ok((pts, vec![2.0 * PI / k as f64; k]));
    }
    let (sub_pts, sub_w) = product_rule(kappa - 1, degree)?;
    let c = (kappa as f64 - 3.0) / 2.0;
    let rule = jacobi_rule(degree / 2 + 1, c, c)?;
    // t = 2u - 1 turns (1-t²)^c dt into 2^{2c+1} u^c (1-u)^c du
    let scale = 2f64.powf(2.0 * c + 1.0);
    let mut pts = Vec::with_capacity(rule.order * sub_w.len() * kappa);
    let mut wts = Vec::with_capacity(rule.order * sub_w.len());
    for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
        let t = 2.0 * u - 1.0;
        let rad = (4.0 * u * (1.0 - u)).sqrt();
        for (y, &wy) in sub_pts.chunks_exact(kappa - 1).zip(&sub_w) {
            pts.push(t);
            pts.extend(y.iter().map(|v| rad * v));
            wts.push(scale * wu * wy);
        }
    }
    Ok((pts, wts))
}

/// Randomized quasi-Monte Carlo rule: a Halton sequence with a seeded
/// Cranley–Patterson shift, pushed through Box–Muller and normalized, then
/// paired with its antipodes. Equal weights ω_{κ-1}/samples.
pub fn sphere_rule_qmc(kappa: usize, samples: usize, seed: u64) -> Result<SphereRule> {
    if kappa < 2 {
        return usage(format!("sphere rules need kappa >= 2, got {kappa}"));
    }
    if samples < 2 {
        return usage(format!("QMC sphere rule needs at least 2 samples, got {samples}"));
    }
    let dims = kappa + kappa % 2;
    let bases = first_primes(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();

    let mut points = Vec::with_capacity(samples * kappa);
    let mut u = vec![0.0; dims];
    let mut g = vec![0.0; dims];
    let mut index: u64 = 1;
    while points.len() < samples * kappa {
        for d in 0..dims {
            u[d] = (radical_inverse(index, bases[d]) + shift[d]).fract();
        }
        index += 1;
        for d in (0..dims).step_by(2) {
            let r = (-2.0 * (1.0 - u[d]).ln()).sqrt();
            let phi = 2.0 * PI * u[d + 1];
            g[d] = r * phi.cos();
            g[d + 1] = r * phi.sin();
        }
        let norm = g[..kappa].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-300) {
            continue;
        }
        points.extend(g[..kappa].iter().map(|v| v / norm));
        if points.len() < samples * kappa {
            points.extend(g[..kappa].iter().map(|v| -v / norm));
        }
    }
    let omega = ln_sphere_measure(kappa).exp();
    Ok(SphereRule {
        kappa,
        points,
        weights: vec![omega / samples as f64; samples],
        kind: SphereKind::Qmc,
        degree_or_samples: samples,
    })
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    acc
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    /// ∫_{S^{κ-1}} ∏ x_i^{a_i} dσ = 2 ∏Γ(b_i)/Γ(Σb_i), b_i = (a_i+1)/2, zero if any a_i is odd.
    fn monomial_integral(a: &[usize]) -> f64 {
        if a.iter().any(|&e| e % 2 == 1) {
            return 0.0;
        }
        let b: Vec<f64> = a.iter().map(|&e| (e as f64 + 1.0) / 2.0).collect();
        let ln = b.iter().map(|&v| ln_gamma(v)).sum::<f64>() - ln_gamma(b.iter().sum());
        2.0 * ln.exp()
    }

    fn exponent_vectors(kappa: usize, max_total: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..kappa {
            let mut next = Vec::new();
            for v in &out {
                let used: usize = v.iter().sum();
                for e in 0..=max_total - used {
                    let mut w = v.clone();
                    w.push(e);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn circle_rule_is_equispaced() {
        let r = sphere_rule(2, 7).unwrap();
        assert_eq!(r.len(), 8);
        for (i, (p, w)) in r.iter().enumerate() {
            let phi = 2.0 * PI * i as f64 / 8.0;
            assert!((p[0] - phi.cos()).abs() < 1e-15 && (p[1] - phi.sin()).abs() < 1e-15);
            assert!((w - 2.0 * PI / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn second_moment_on_s2() {
        for degree in [2, 5, 20] {
            let r = sphere_rule(3, degree).unwrap();
            let got = r.integrate(|p| p[2] * p[2]);
            assert!((got - 4.0 * PI / 3.0).abs() < 1e-12, "degree {degree}: {got}");
        }
    }

    #[test]
    fn total_measure_on_s3() {
        let r = sphere_rule(4, 10).unwrap();
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn points_are_unit_vectors() {
        for kappa in 2..=6 {
            let r = sphere_rule(kappa, 6).unwrap();
            for (p, _) in r.iter() {
                let n2: f64 = p.iter().map(|v| v * v).sum();
                assert!((n2.sqrt() - 1.0).abs() < 1e-14);
            }
        }
        let q = sphere_rule_qmc(7, 1001, 3).unwrap();
        assert_eq!(q.len(), 1001);
        for (p, _) in q.iter() {
            let n2: f64 = p.iter().map(|v| v * v).sum();
            assert!((n2.sqrt() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn product_rules_integrate_monomials_exactly() {
        for &(kappa, degree) in &[(2usize, 9usize), (3, 8), (3, 11), (4, 8), (5, 6), (6, 5), (8, 4)] {
            let r = sphere_rule(kappa, degree).unwrap();
            for a in exponent_vectors(kappa, degree) {
                let got = r.integrate(|p| p.iter().zip(&a).map(|(x, &e)| x.powi(e as i32)).product());
                let want = monomial_integral(&a);
                assert!(
                    (got - want).abs() < 1e-11 * want.abs().max(1.0),
                    "kappa={kappa} degree={degree} a={a:?}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn product_rule_rejects_large_kappa() {
        assert!(sphere_rule(9, 4).is_err());
        assert!(sphere_rule(1, 4).is_err());
    }

    #[test]
    fn qmc_constant_and_determinism() {
        for seed in [0u64, 1, 99] {
            let r = sphere_rule_qmc(5, 500, seed).unwrap();
            let total: f64 = r.weights.iter().sum();
            let omega = ln_sphere_measure(5).exp();
            assert!((total - omega).abs() < 1e-12);
        }
        let a = sphere_rule_qmc(6, 1000, 42).unwrap();
        let b = sphere_rule_qmc(6, 1000, 42).unwrap();
        assert_eq!(a.points, b.points);
        assert!(sphere_rule_qmc(6, 1, 42).is_err());
    }

    #[test]
    fn qmc_linear_integrand_bound() {
        let omega = ln_sphere_measure(6).exp();
        let samples = 100_000;
        for seed in 0..20 {
            let r = sphere_rule_qmc(6, samples, seed).unwrap();
            let got = r.integrate(|p| p[0]);
            assert!(got.abs() <= 3.0 * omega / (samples as f64).sqrt());
        }
    }

    #[test]
    fn qmc_error_shrinks_with_samples() {
        // smooth even integrand: ∫ x_1² x_2² over S^4
        let want = monomial_integral(&[2, 2, 0, 0, 0]);
        let mut ratios = Vec::new();
        for seed in 0..9 {
            let err = |n| {
                let r = sphere_rule_qmc(5, n, seed).unwrap();
                (r.integrate(|p| p[0] * p[0] * p[1] * p[1]) - want).abs()
            };
            let e1 = err(4000);
            let e2 = err(8000);
            ratios.push(e1 / e2.max(1e-300));
        }
        ratios.sort_by(f64::total_cmp);
        assert!(ratios[ratios.len() / 2] >= 1.3, "median ratio {:?}", ratios);
    }
}
