use serde::Serialize;

use crate::error::{domain, usage, Error, Result};
use crate::special::ln_beta;

pub const MAX_JACOBI_ORDER: usize = 512;

/// Gauss rule on (0, 1) for the weight u^a (1-u)^b.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exponent_a: f64,
    pub exponent_b: f64,
    pub order: usize,
}

impl JacobiRule {
    /// Σ w_i g(u_i) ≈ ∫₀¹ g(u) u^a (1-u)^b du.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * g(u))
            .sum()
    }

    /// Total mass B(a+1, b+1) of the weight.
    pub fn mass(&self) -> f64 {
        ln_beta(self.exponent_a + 1.0, self.exponent_b + 1.0).exp()
    }
}

/// Gauss–Jacobi nodes and weights by Golub–Welsch.
///
/// The symmetric tridiagonal Jacobi matrix of the three-term recurrence for
/// the weight (1-x)^b (1+x)^a on [-1, 1] is diagonalized with implicit QL;
/// eigenvalues are the nodes, squared first eigenvector components times the
/// total mass are the weights. Nodes are then mapped by u = (1+x)/2.
pub fn jacobi_rule(order: usize, a: f64, b: f64) -> Result<JacobiRule> {
    if !(a > -1.0) || !(b > -1.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!(
            "Jacobi exponents must exceed -1 for an integrable weight, got a={a}, b={b}"
        ));
    }
    if order == 0 || order > MAX_JACOBI_ORDER {
        return usage(format!("Jacobi order must lie in [1, {MAX_JACOBI_ORDER}], got {order}"));
    }
    // recurrence parameters on [-1, 1]: alpha_j on (1-x), beta_j on (1+x)
    let (al, be) = (b, a);
    let s = al + be;
    let mut diag = vec![0.0; order];
    let mut off = vec![0.0; order];
    diag[0] = (be - al) / (s + 2.0);
    for k in 1..order {
        let kf = k as f64;
        let two_k_s = 2.0 * kf + s;
        diag[k] = (be * be - al * al) / (two_k_s * (two_k_s + 2.0));
        let b2 = if k == 1 {
            4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s).powi(2) * (3.0 + s))
        } else {
            4.0 * kf * (kf + al) * (kf + be) * (kf + s)
                / (two_k_s * two_k_s * (two_k_s + 1.0) * (two_k_s - 1.0))
        };
        off[k - 1] = b2.sqrt();
    }
    let mut first = vec![0.0; order];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mass = ln_beta(a + 1.0, b + 1.0).exp();
    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&first)
        .map(|(&x, &v)| (0.5 * (1.0 + x), mass * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(JacobiRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        exponent_a: a,
        exponent_b: b,
        order,
    })
}

/// Gauss–Legendre rule on (0, 1).
pub fn gauss_legendre(order: usize) -> Result<JacobiRule> {
    jacobi_rule(order, 0.0, 0.0)
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
///
/// `diag` holds the diagonal, `off[i]` couples rows i and i+1 (`off[n-1]` is
/// scratch). Only the first row of the eigenvector matrix is accumulated, in
/// `first`, which must enter as the first row of the identity.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence("tridiagonal QL exceeded 60 sweeps".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let fz = first[i + 1];
                first[i + 1] = s * first[i] + c * fz;
                first[i] = c * first[i] - s * fz;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}
