//! Lloyd's k-means with k-means++ seeding, used to build visual codebooks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neighbors::squared_distance;

pub const DEFAULT_MAX_ITERS: usize = 100;

/// `k` centroids for one frame descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub descriptor_name: String,
    pub k: usize,
    pub d: usize,
    pub seed: u64,
    pub centroids: Matrix,
}

/// A fitted codebook plus the within-cluster sum of squares after seeding
/// (entry 0) and after every Lloyd iteration.
#[derive(Debug, Clone)]
pub struct KmeansFit {
    pub codebook: Codebook,
    pub wcss_history: Vec<f64>,
    pub converged: bool,
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn nearest_centroid(centroids: &Matrix, v: &[f64]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for j in 0..centroids.rows() {
        let d = squared_distance(centroids.row(j), v);
        if d < best.0 {
            best = (d, j);
        }
    }
    best.1
}

fn assign(points: &Matrix, centroids: &Matrix) -> Vec<usize> {
    points.iter_rows().map(|p| nearest_centroid(centroids, p)).collect()
}

fn wcss(points: &Matrix, centroids: &Matrix, labels: &[usize]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| squared_distance(points.row(i), centroids.row(c)))
        .sum()
}

fn plus_plus_seed(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let m = points.rows();
    let mut chosen = vec![rng.random_range(0..m)];
    let mut d2: Vec<f64> = points
        .iter_rows()
        .map(|p| squared_distance(p, points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // fewer distinct points than k: take the lowest unused index
            (0..m).find(|i| !chosen.contains(i)).expect("m >= k")
        };
        chosen.push(next);
        for (i, p) in points.iter_rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, points.row(next)));
        }
    }
    points.select_rows(&chosen)
}

pub fn kmeans_fit(vectors: &Matrix, k: usize, seed: u64, max_iters: usize) -> Result<Codebook> {
    kmeans_fit_traced(vectors, k, seed, max_iters).map(|f| f.codebook)
}

pub fn kmeans_fit_traced(vectors: &Matrix, k: usize, seed: u64, max_iters: usize) -> Result<KmeansFit> {
    let (m, d) = vectors.shape();
    if k == 0 {
        return Err(Error::param("k-means needs k >= 1"));
    }
    if m < k {
        return Err(Error::param(format!("k-means with k={k} needs at least {k} vectors, got {m}")));
    }
    if !vectors.is_finite() {
        return Err(Error::Numeric("k-means input contains non-finite values".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_seed(vectors, k, &mut rng);
    let mut labels = assign(vectors, &centroids);
    let mut history = vec![wcss(vectors, &centroids, &labels)];
    let mut converged = false;

    for _ in 0..max_iters {
        let mut sums = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, &x) in sums.row_mut(c).iter_mut().zip(vectors.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let n = counts[c] as f64;
                for s in sums.row_mut(c) {
                    *s /= n;
                }
            }
        }
        // empty clusters take the point farthest from its own centroid
        let mut taken = Vec::new();
        for c in (0..k).filter(|&c| counts[c] == 0) {
            let far = (0..m)
                .filter(|i| !taken.contains(i))
                .map(|i| (squared_distance(vectors.row(i), sums.row(labels[i])), i))
                .fold((f64::NEG_INFINITY, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
                .1;
            taken.push(far);
            sums.row_mut(c).copy_from_slice(vectors.row(far));
        }
        centroids = sums;
        let next = assign(vectors, &centroids);
        history.push(wcss(vectors, &centroids, &next));
        let stable = next == labels;
        labels = next;
        if stable {
            converged = true;
            break;
        }
    }

    Ok(KmeansFit {
        codebook: Codebook {
            descriptor_name: String::new(),
            k,
            d,
            seed,
            centroids,
        },
        wcss_history: history,
        converged,
    })
}

/// Normalised histogram of nearest-centroid assignments.
pub fn bovf_encode(frame_vectors: &Matrix, cb: &Codebook) -> Result<Vec<f64>> {
    if frame_vectors.rows() == 0 {
        return Err(Error::param("bag of visual features needs at least one frame"));
    }
    if frame_vectors.cols() != cb.d {
        return Err(Error::shape(format!(
            "frame vectors have dimension {}, codebook {:?} expects {}",
            frame_vectors.cols(),
            cb.descriptor_name,
            cb.d
        )));
    }
    let mut hist = vec![0.0; cb.k];
    for v in frame_vectors.iter_rows() {
        hist[nearest_centroid(&cb.centroids, v)] += 1.0;
    }
    let n = frame_vectors.rows() as f64;
    hist.iter_mut().for_each(|h| *h /= n);
    Ok(hist)
}
