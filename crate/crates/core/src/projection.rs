//! Seeded sign-hash random projection of sparse vectors.
//!
//! Coordinate `key` lands in bucket `h mod dim` (on the low 32 bits) with
//! sign `-1` when bit 63 of `h` is set, where
//! `h = splitmix64(key ^ splitmix64(seed))`.

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::splitmix64;
use crate::text::SparseVector;

pub const DEFAULT_OUTPUT_DIM: usize = 128;
pub const SCHEME_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projector {
    pub output_dim: usize,
    pub seed: u64,
    pub scheme_version: u32,
}

impl Projector {
    pub fn new(output_dim: usize, seed: u64) -> Result<Self> {
        if output_dim == 0 {
            return Err(Error::param("projection output_dim must be at least 1"));
        }
        Ok(Projector { output_dim, seed, scheme_version: SCHEME_VERSION })
    }

    pub fn with_seed(seed: u64) -> Self {
        Projector { output_dim: DEFAULT_OUTPUT_DIM, seed, scheme_version: SCHEME_VERSION }
    }

    pub fn validate(&self) -> Result<()> {
        if self.output_dim == 0 {
            return Err(Error::param("projection output_dim must be at least 1"));
        }
        if self.scheme_version != SCHEME_VERSION {
            return Err(Error::Version {
                expected: SCHEME_VERSION,
                found: self.scheme_version,
            });
        }
        Ok(())
    }

    /// Bucket and sign for one input coordinate.
    pub fn route(&self, key: u64) -> (usize, f64) {
        let h = splitmix64(key ^ splitmix64(self.seed));
        let bucket = (h & 0xffff_ffff) as usize % self.output_dim;
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        (bucket, sign)
    }

    pub fn project(&self, v: &SparseVector) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim];
        for &(key, w) in &v.entries {
            if w != 0.0 {
                let (b, s) = self.route(key);
                out[b] += s * w;
            }
        }
        out
    }

    pub fn descriptor_suffix(&self) -> String {
        format!("-CS{}", self.output_dim)
    }

    /// Row-wise projection; the descriptor gains the `-CS{dim}` suffix.
    pub fn project_matrix(&self, descriptor: &str, rows: &[SparseVector]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.output_dim);
        for r in rows {
            data.extend(self.project(r));
        }
        FeatureMatrix {
            descriptor: format!("{descriptor}{}", self.descriptor_suffix()),
            data: Matrix::from_vec(rows.len(), self.output_dim, data)
                .expect("row-major buffer has rows * output_dim entries"),
        }
    }
}
