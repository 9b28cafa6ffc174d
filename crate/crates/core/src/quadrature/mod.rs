//! Gauss–Jacobi rules, sphere rules and small panel helpers built on them.

pub mod cache;
pub mod jacobi;
pub mod sphere;

use std::f64::consts::PI;

pub use cache::RuleCache;
pub use jacobi::{gauss_legendre, jacobi_rule, JacobiRule, MAX_JACOBI_ORDER};
pub use sphere::{sphere_rule, sphere_rule_qmc, SphereKind, SphereRule};

/// Nodes and weights of a Legendre rule on (0,1) pushed onto [lo, hi]
/// through x = lo + (hi-lo)(1 - cos πv)/2. The map has zero derivative at
/// both ends, which absorbs square-root endpoint behaviour.
pub(crate) fn stretched_panel(
    lo: f64,
    hi: f64,
    legendre: &JacobiRule,
) -> impl Iterator<Item = (f64, f64)> + '_ {
    let h = hi - lo;
    legendre.nodes.iter().zip(&legendre.weights).map(move |(&v, &w)| {
        let x = lo + 0.5 * h * (1.0 - (PI * v).cos());
        (x, w * 0.5 * h * PI * (PI * v).sin())
    })
}

/// Sorted, deduplicated breakpoints inside (lo, hi) together with the ends.
pub(crate) fn panel_edges(lo: f64, hi: f64, cuts: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let tol = 1e-13 * (hi - lo).abs().max(1e-300);
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = cuts
        .into_iter()
        .filter(|&c| c.is_finite() && c > lo + tol && c < hi - tol)
        .collect();
    inner.sort_by(f64::total_cmp);
    for c in inner {
        if c - edges.last().unwrap() > tol {
            edges.push(c);
        }
    }
    if hi - edges.last().unwrap() > tol || edges.len() == 1 {
        edges.push(hi);
    } else {
        *edges.last_mut().unwrap() = hi;
    }
    edges
}
