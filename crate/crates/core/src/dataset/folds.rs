use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seeded partition of `m` examples into `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
    pub seed: u64,
}

/// Uniform random (unstratified) k-fold split. Examples are shuffled with the
/// seed and dealt round-robin, so fold sizes differ by at most one.
pub fn kfold_split(m: usize, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::param(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > m {
        return Err(Error::param(format!("cannot split {m} examples into {k} folds")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; m];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % k;
    }
    Ok(FoldAssignment { k, fold_of, seed })
}

impl FoldAssignment {
    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let f = kfold_split(10, 5, 1).unwrap();
        assert_eq!(f.fold_sizes(), vec![2; 5]);
    }

    #[test]
    fn remainder_goes_to_first_fold() {
        let f = kfold_split(11, 5, 1).unwrap();
        assert_eq!(f.fold_sizes(), vec![3, 2, 2, 2, 2]);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(kfold_split(30, 5, 9).unwrap(), kfold_split(30, 5, 9).unwrap());
        assert_ne!(kfold_split(30, 5, 9).unwrap(), kfold_split(30, 5, 10).unwrap());
    }

    #[test]
    fn too_many_folds() {
        assert!(kfold_split(3, 4, 0).is_err());
        assert!(kfold_split(3, 1, 0).is_err());
    }
}
