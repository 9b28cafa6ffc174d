//! Little-endian sample container shared by gridded fields and cached rules.
//!
//! Layout: magic `MAXF`, version u32, n u32, n × u64 extents, n × f64
//! spacing, n × f64 origin, then the product of the extents as f64 in
//! row-major order (last axis fastest).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MAXF";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub extents: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub samples: Vec<f64>,
}

impl GridData {
    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.dim();
        let mut out = Vec::with_capacity(12 + n * 24 + self.samples.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(n as u32).to_le_bytes());
        for &e in &self.extents {
            out.extend_from_slice(&(e as u64).to_le_bytes());
        }
        for v in self.spacing.iter().chain(&self.origin).chain(&self.samples) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Format { path: path.to_path_buf(), reason };
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.take(4).ok_or_else(|| bad("truncated header".into()))?;
        if magic != MAGIC {
            return Err(bad("missing MAXF magic".into()));
        }
        let version = cur.u32().ok_or_else(|| bad("truncated header".into()))?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let n = cur.u32().ok_or_else(|| bad("truncated header".into()))? as usize;
        if n == 0 || n > 16 {
            return Err(bad(format!("implausible dimension {n}")));
        }
        let mut extents = Vec::with_capacity(n);
        for _ in 0..n {
            let e = cur.u64().ok_or_else(|| bad("truncated extents".into()))?;
            extents.push(usize::try_from(e).map_err(|_| bad("extent overflows".into()))?);
        }
        let mut floats = |k: usize, what: &str| -> Result<Vec<f64>> {
            (0..k)
                .map(|_| cur.f64().ok_or_else(|| bad(format!("truncated {what}"))))
                .collect()
        };
        let spacing = floats(n, "spacing")?;
        let origin = floats(n, "origin")?;
        let count = extents
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .ok_or_else(|| bad("sample count overflows".into()))?;
        if bytes.len() - 12 - n * 24 != count * 8 {
            return Err(bad(format!(
                "expected {count} samples, found {} payload bytes",
                bytes.len() - 12 - n * 24
            )));
        }
        let samples = floats(count, "samples")?;
        Ok(GridData { extents, spacing, origin, samples })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        Self::from_bytes(&bytes, path)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + k)?;
        self.pos += k;
        Some(s)
    }
    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }
    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
    fn f64(&mut self) -> Option<f64> {
        Some(f64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
}
