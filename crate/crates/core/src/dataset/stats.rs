use serde::{Deserialize, Serialize};

use super::MultiLabelDataset;
use crate::error::{Error, Result};

/// Label cardinality, density, diversity and proportion of diversity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicators {
    pub lcard: f64,
    pub lden: f64,
    pub ldiv: usize,
    pub pldiv: f64,
}

pub fn indicators(ds: &MultiLabelDataset) -> Result<Indicators> {
    let m = ds.len();
    if m == 0 {
        return Err(Error::InvalidDataset("indicators of an empty dataset".into()));
    }
    let q = ds.num_labels();
    let total: usize = ds.labels().iter_rows().map(|r| r.iter().filter(|&&b| b).count()).sum();
    let distinct: std::collections::HashSet<&[bool]> = ds.labels().iter_rows().collect();
    let lcard = total as f64 / m as f64;
    Ok(Indicators {
        lcard,
        lden: lcard / q as f64,
        ldiv: distinct.len(),
        pldiv: distinct.len() as f64 / m as f64,
    })
}

/// q×q matrix whose (i, j) entry counts examples carrying both labels i and j.
pub fn cooccurrence(ds: &MultiLabelDataset) -> Result<Vec<Vec<u64>>> {
    if ds.is_empty() {
        return Err(Error::InvalidDataset("co-occurrence of an empty dataset".into()));
    }
    let q = ds.num_labels();
    let mut co = vec![vec![0u64; q]; q];
    for row in ds.labels().iter_rows() {
        let on: Vec<usize> = (0..q).filter(|&j| row[j]).collect();
        for &a in &on {
            for &b in &on {
                co[a][b] += 1;
            }
        }
    }
    Ok(co)
}
