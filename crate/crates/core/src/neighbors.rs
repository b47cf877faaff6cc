//! Exhaustive Euclidean nearest-neighbour search shared by the kNN-style
//! learners and the resampling algorithms.
//!
//! Distances are compared as squared Euclidean distances; ties are broken by
//! the lower row index, so every search is deterministic.

use crate::matrix::Matrix;

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` rows of `points` nearest to `query`, nearest first.
///
/// Rows whose index is in `exclude` are skipped. Returns fewer than `k`
/// indices when not enough rows are eligible.
pub fn k_nearest(points: &Matrix, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    k_nearest_among(points, (0..points.rows()).filter(|&i| Some(i) != exclude), query, k)
}

/// Like [`k_nearest`] but restricted to a candidate subset of rows.
pub fn k_nearest_among(
    points: &Matrix,
    candidates: impl IntoIterator<Item = usize>,
    query: &[f64],
    k: usize,
) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = candidates
        .into_iter()
        .map(|i| (squared_distance(points.row(i), query), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_lower_index() {
        let pts = Matrix::from_rows(&[[1.0], [-1.0], [1.0], [5.0]]).unwrap();
        assert_eq!(k_nearest(&pts, &[0.0], 3, None), vec![0, 1, 2]);
        assert_eq!(k_nearest(&pts, &[0.0], 2, Some(0)), vec![1, 2]);
    }

    #[test]
    fn short_candidate_list() {
        let pts = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert_eq!(k_nearest(&pts, &[0.0], 5, Some(1)), vec![0]);
    }
}
