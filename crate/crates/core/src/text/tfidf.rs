use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::fnv1a64;

pub const MAX_NGRAM: usize = 4;

/// Sparse vector keyed by 64-bit feature identity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub entries: Vec<(u64, f64)>,
}

impl SparseVector {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, w)| *w == 0.0)
    }
}

/// Identity of an n-gram key (tokens joined by single spaces).
pub fn ngram_key_hash(key: &str) -> u64 {
    fnv1a64(key.as_bytes())
}

/// Contiguous n-grams of exactly `n` tokens, joined with a space.
pub fn ngrams(tokens: &[String], n: usize) -> Vec<String> {
    if n == 0 || tokens.len() < n {
        return Vec::new();
    }
    tokens.windows(n).map(|w| w.join(" ")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfidfModelRepr", into = "TfidfModelRepr")]
pub struct TfidfModel {
    n: usize,
    vocabulary: Vec<String>,
    df: Vec<u64>,
    doc_count: u64,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct TfidfModelRepr {
    n: usize,
    doc_count: u64,
    vocabulary: Vec<String>,
    df: Vec<u64>,
}

impl From<TfidfModel> for TfidfModelRepr {
    fn from(m: TfidfModel) -> Self {
        TfidfModelRepr { n: m.n, doc_count: m.doc_count, vocabulary: m.vocabulary, df: m.df }
    }
}

impl TryFrom<TfidfModelRepr> for TfidfModel {
    type Error = String;

    fn try_from(r: TfidfModelRepr) -> std::result::Result<Self, String> {
        if r.vocabulary.len() != r.df.len() {
            return Err("vocabulary and df lengths differ".into());
        }
        if r.df.iter().any(|&d| d == 0 || d > r.doc_count) {
            return Err("df entries must lie in [1, doc_count]".into());
        }
        let index: HashMap<String, usize> =
            r.vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if index.len() != r.vocabulary.len() {
            return Err("duplicate vocabulary entry".into());
        }
        Ok(TfidfModel { n: r.n, vocabulary: r.vocabulary, df: r.df, doc_count: r.doc_count, index })
    }
}

impl TfidfModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn df(&self, ngram: &str) -> Option<u64> {
        self.index.get(ngram).map(|&i| self.df[i])
    }

    pub fn column(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).copied()
    }

    pub fn idf(&self, column: usize) -> f64 {
        ((1.0 + self.doc_count as f64) / (1.0 + self.df[column] as f64)).ln() + 1.0
    }
}

/// Vocabulary is ordered by first occurrence across the corpus.
pub fn tfidf_fit(corpus: &[Vec<String>], n: usize) -> Result<TfidfModel> {
    if corpus.is_empty() {
        return Err(Error::InvalidDataset("TF-IDF corpus is empty".into()));
    }
    if !(1..=MAX_NGRAM).contains(&n) {
        return Err(Error::param(format!("n-gram order must be in 1..=4, got {n}")));
    }
    let mut vocabulary = Vec::new();
    let mut df: Vec<u64> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for doc in corpus {
        let mut seen = vec![];
        for g in ngrams(doc, n) {
            let i = match index.get(&g) {
                Some(&i) => i,
                None => {
                    let i = vocabulary.len();
                    index.insert(g.clone(), i);
                    vocabulary.push(g);
                    df.push(0);
                    i
                }
            };
            seen.push(i);
        }
        seen.sort_unstable();
        seen.dedup();
        for i in seen {
            df[i] += 1;
        }
    }
    if vocabulary.is_empty() {
        log::warn!("TF-IDF fit with n={n} produced an empty vocabulary");
    }
    Ok(TfidfModel { n, vocabulary, df, doc_count: corpus.len() as u64, index })
}

/// L2-normalised TF-IDF weights, entries ordered by vocabulary column.
/// Out-of-vocabulary n-grams are ignored.
pub fn tfidf_transform(doc: &[String], model: &TfidfModel) -> Result<SparseVector> {
    let (columns, weights) = tfidf_weights(doc, model)?;
    Ok(SparseVector {
        entries: columns
            .into_iter()
            .zip(weights)
            .map(|(c, w)| (ngram_key_hash(&model.vocabulary[c]), w))
            .collect(),
    })
}

/// Column indices and normalised weights, before keying.
pub fn tfidf_weights(doc: &[String], model: &TfidfModel) -> Result<(Vec<usize>, Vec<f64>)> {
    if model.vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut tf: HashMap<usize, u64> = HashMap::new();
    for g in ngrams(doc, model.n) {
        if let Some(&c) = model.index.get(&g) {
            *tf.entry(c).or_default() += 1;
        }
    }
    let mut columns: Vec<usize> = tf.keys().copied().collect();
    columns.sort_unstable();
    let mut weights: Vec<f64> = columns.iter().map(|c| tf[c] as f64 * model.idf(*c)).collect();
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        weights.iter_mut().for_each(|w| *w /= norm);
    }
    Ok((columns, weights))
}
