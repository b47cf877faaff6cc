use std::collections::HashMap;

use super::ResampleConfig;
use crate::dataset::MultiLabelDataset;
use crate::error::{Error, Result};
use crate::neighbors::k_nearest;

fn label_similarity(a: &[bool], b: &[bool]) -> f64 {
    let diff = a.iter().zip(b).filter(|(x, y)| x != y).count();
    1.0 - diff as f64 / a.len() as f64
}

/// Mutual 1-NN pairs `(a, b)`, `a < b`, whose label similarity is below
/// the threshold.
pub fn tomek_links(ds: &MultiLabelDataset, threshold: f64) -> Result<Vec<(usize, usize)>> {
    let x = &ds.require_features()?.data;
    let m = ds.len();
    if m < 2 {
        return Err(Error::InvalidDataset("MLTL needs at least 2 examples".into()));
    }
    let nn: Vec<usize> = (0..m).map(|i| k_nearest(x, x.row(i), 1, Some(i))[0]).collect();
    let labels = ds.labels();
    Ok((0..m)
        .filter_map(|a| {
            let b = nn[a];
            (a < b && nn[b] == a && label_similarity(labels.row(a), labels.row(b)) < threshold)
                .then_some((a, b))
        })
        .collect())
}

/// Removes one member of each Tomek link: the one whose exact label set is
/// more frequent in `ds`, or both when the frequencies tie.
pub fn mltl(ds: &MultiLabelDataset, cfg: &ResampleConfig) -> Result<MultiLabelDataset> {
    cfg.validate()?;
    let links = tomek_links(ds, cfg.mltl_threshold)?;
    if links.is_empty() {
        return Ok(ds.clone());
    }
    let labels = ds.labels();
    let mut freq: HashMap<&[bool], usize> = HashMap::new();
    for row in labels.iter_rows() {
        *freq.entry(row).or_default() += 1;
    }
    let mut remove = vec![false; ds.len()];
    for (a, b) in links {
        let (fa, fb) = (freq[labels.row(a)], freq[labels.row(b)]);
        if fa >= fb {
            remove[a] = true;
        }
        if fb >= fa {
            remove[b] = true;
        }
    }
    let keep: Vec<usize> = (0..ds.len()).filter(|&i| !remove[i]).collect();
    Ok(ds.subset(&keep))
}
