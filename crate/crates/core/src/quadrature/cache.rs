//! On-disk cache of quadrature rules in the MAXF container.
//!
//! A Jacobi rule is stored as an `order × 2` table of (node, weight) rows with
//! the exponents in the origin slot; a sphere rule as a `count × (κ+1)` table
//! of (point, weight) rows.

use std::fs;
use std::path::{Path, PathBuf};

use super::jacobi::{jacobi_rule, JacobiRule};
use super::sphere::{sphere_rule, sphere_rule_qmc, SphereKind, SphereRule};
use crate::error::{Error, Result};
use crate::maxf::GridData;

#[derive(Debug, Clone)]
pub struct RuleCache {
    dir: PathBuf,
}

impl RuleCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(RuleCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn jacobi(&self, order: usize, a: f64, b: f64) -> Result<JacobiRule> {
        let path = self
            .dir
            .join(format!("jacobi-{order}-{:016x}-{:016x}.maxf", a.to_bits(), b.to_bits()));
        if path.exists() {
            let g = GridData::read(&path)?;
            if g.extents != [order, 2] || g.origin != [a, b] {
                return Err(Error::Format { path, reason: "cached Jacobi rule does not match its key".into() });
            }
            let (nodes, weights) = g.samples.chunks_exact(2).map(|c| (c[0], c[1])).unzip();
            return Ok(JacobiRule { nodes, weights, exponent_a: a, exponent_b: b, order });
        }
        let rule = jacobi_rule(order, a, b)?;
        let samples = rule.nodes.iter().zip(&rule.weights).flat_map(|(&x, &w)| [x, w]).collect();
        GridData { extents: vec![order, 2], spacing: vec![0.0; 2], origin: vec![a, b], samples }
            .write(&path)?;
        Ok(rule)
    }

    pub fn sphere(&self, kappa: usize, degree: usize) -> Result<SphereRule> {
        let path = self.dir.join(format!("sphere-{kappa}-{degree}.maxf"));
        self.sphere_at(path, kappa, SphereKind::ProductAngles, degree, || sphere_rule(kappa, degree))
    }

    pub fn sphere_qmc(&self, kappa: usize, samples: usize, seed: u64) -> Result<SphereRule> {
        let path = self.dir.join(format!("qmc-{kappa}-{samples}-{seed}.maxf"));
        self.sphere_at(path, kappa, SphereKind::Qmc, samples, || sphere_rule_qmc(kappa, samples, seed))
    }

    fn sphere_at(
        &self,
        path: PathBuf,
        kappa: usize,
        kind: SphereKind,
        param: usize,
        build: impl FnOnce() -> Result<SphereRule>,
    ) -> Result<SphereRule> {
        if path.exists() {
            let g = GridData::read(&path)?;
            if g.extents.len() != 2 || g.extents[1] != kappa + 1 {
                return Err(Error::Format { path, reason: "cached sphere rule has the wrong shape".into() });
            }
            let mut points = Vec::with_capacity(g.extents[0] * kappa);
            let mut weights = Vec::with_capacity(g.extents[0]);
            for row in g.samples.chunks_exact(kappa + 1) {
                points.extend_from_slice(&row[..kappa]);
                weights.push(row[kappa]);
            }
            return Ok(SphereRule { kappa, points, weights, kind, degree_or_samples: param });
        }
        let rule = build()?;
        let mut samples = Vec::with_capacity(rule.len() * (kappa + 1));
        for (p, w) in rule.iter() {
            samples.extend_from_slice(p);
            samples.push(w);
        }
        GridData {
            extents: vec![rule.len(), kappa + 1],
            spacing: vec![0.0; 2],
            origin: vec![0.0; 2],
            samples,
        }
        .write(&path)?;
        Ok(rule)
    }
}
