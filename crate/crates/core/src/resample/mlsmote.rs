use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ResampleConfig;
use crate::dataset::MultiLabelDataset;
use crate::error::Result;
use crate::matrix::{LabelMatrix, Matrix};
use crate::neighbors::k_nearest_among;
use crate::seed::derive_seed;

/// `max_count / count(l)` per label; `None` for labels with no examples.
pub fn imbalance_ratios(labels: &LabelMatrix) -> Vec<Option<f64>> {
    let counts: Vec<usize> = (0..labels.cols()).map(|j| labels.column_count(j)).collect();
    let max = counts.iter().copied().max().unwrap_or(0) as f64;
    counts
        .iter()
        .map(|&c| (c > 0).then(|| max / c as f64))
        .collect()
}

/// Labels whose imbalance ratio exceeds the mean ratio over present labels.
pub fn minority_labels(labels: &LabelMatrix) -> Vec<usize> {
    let ir = imbalance_ratios(labels);
    let present: Vec<f64> = ir.iter().flatten().copied().collect();
    if present.is_empty() {
        return Vec::new();
    }
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    ir.iter()
        .enumerate()
        .filter_map(|(j, r)| r.filter(|&r| r > mean).map(|_| j))
        .collect()
}

/// ML-SMOTE. Up to `ceil(resize_rate * m)` synthetic examples are drawn from
/// a seeded shuffle of all (minority label, instance) pairs. Each synthetic
/// interpolates its seed towards one of the seed's `k` nearest same-label
/// neighbours; its labels are those held by more than half of the seed and
/// its neighbours (the seed's own labels if that vote is empty).
pub fn mlsmote(ds: &MultiLabelDataset, cfg: &ResampleConfig) -> Result<MultiLabelDataset> {
    cfg.validate()?;
    let x = &ds.require_features()?.data;
    let labels = ds.labels();
    let m = ds.len();
    let q = ds.num_labels();

    let mut pairs = Vec::new();
    for l in minority_labels(labels) {
        let members: Vec<usize> = (0..m).filter(|&i| labels.get(i, l)).collect();
        if members.len() < 2 {
            log::warn!(
                "ML-SMOTE skips label {:?}: only one example",
                ds.label_space().names()[l]
            );
            continue;
        }
        pairs.extend(members.into_iter().map(|i| (l, i)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "mlsmote"));
    pairs.shuffle(&mut rng);
    let budget = (cfg.resize_rate * m as f64).ceil() as usize;
    pairs.truncate(budget);

    let mut taken: HashSet<String> = ds.ids().iter().cloned().collect();
    let mut new_ids = Vec::with_capacity(pairs.len());
    let mut new_x = Matrix::zeros(0, 0);
    let mut new_y = LabelMatrix::zeros(0, q);
    for (n, &(l, seed_row)) in pairs.iter().enumerate() {
        let candidates = (0..m).filter(|&i| i != seed_row && labels.get(i, l));
        let neighbours = k_nearest_among(x, candidates, x.row(seed_row), cfg.k_neighbors);
        let pick = neighbours[rng.random_range(0..neighbours.len())];
        let u: f64 = rng.random();
        let (s, r) = (x.row(seed_row), x.row(pick));
        let synth: Vec<f64> = s.iter().zip(r).map(|(a, b)| a + u * (b - a)).collect();

        let voters = neighbours.len() + 1;
        let mut row: Vec<bool> = (0..q)
            .map(|j| {
                let votes = usize::from(labels.get(seed_row, j))
                    + neighbours.iter().filter(|&&i| labels.get(i, j)).count();
                2 * votes > voters
            })
            .collect();
        if !row.iter().any(|&b| b) {
            row = labels.row(seed_row).to_vec();
        }

        let mut id = format!("{}~syn{}", ds.ids()[seed_row], n);
        while taken.contains(&id) {
            id.push('_');
        }
        taken.insert(id.clone());
        new_ids.push(id);
        new_x.push_row(&synth)?;
        new_y.push_row(&row)?;
    }

    let mut out = ds.clone();
    if !new_ids.is_empty() {
        out.append(new_ids, new_x, new_y)?;
    }
    Ok(out)
}
