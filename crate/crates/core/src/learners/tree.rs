//! CART classification tree on a single binary target, split by Gini gain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_leaf: 1 }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 || self.max_depth == Some(0) {
            return Err(Error::param("tree min_leaf and max_depth must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// `p` is the fraction of positive training examples reaching the leaf.
    Leaf { p: f64, n: usize },
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub inputs: usize,
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Best {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn best_split(x: &Matrix, y: &[bool], rows: &[usize], min_leaf: usize) -> Option<Best> {
    let n = rows.len();
    let pos = rows.iter().filter(|&&i| y[i]).count();
    let parent = gini(pos, n);
    let mut best: Option<Best> = None;
    let mut sorted = rows.to_vec();
    for f in 0..x.cols() {
        sorted.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)).then(a.cmp(&b)));
        let mut left_pos = 0;
        for s in 1..n {
            left_pos += usize::from(y[sorted[s - 1]]);
            let (lo, hi) = (x.get(sorted[s - 1], f), x.get(sorted[s], f));
            if lo == hi || s < min_leaf || n - s < min_leaf {
                continue;
            }
            let weighted = (s as f64 * gini(left_pos, s)
                + (n - s) as f64 * gini(pos - left_pos, n - s))
                / n as f64;
            let gain = parent - weighted;
            if best.as_ref().map_or(true, |b| gain > b.gain) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(Best { feature: f, threshold, gain });
            }
        }
    }
    best
}

pub fn tree_binary_train(x: &Matrix, y: &[bool], params: &TreeParams) -> Result<TreeModel> {
    params.validate()?;
    if x.rows() == 0 {
        return Err(Error::InvalidDataset("empty training set".into()));
    }
    let mut nodes = Vec::new();
    let rows: Vec<usize> = (0..x.rows()).collect();
    grow(x, y, &rows, 0, params, &mut nodes);
    Ok(TreeModel { inputs: x.cols(), nodes })
}

fn grow(x: &Matrix, y: &[bool], rows: &[usize], depth: usize, params: &TreeParams, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    let n = rows.len();
    let pos = rows.iter().filter(|&&i| y[i]).count();
    nodes.push(Node::Leaf { p: pos as f64 / n as f64, n });
    let pure = pos == 0 || pos == n;
    let capped = params.max_depth.is_some_and(|d| depth >= d);
    if pure || capped || n < 2 * params.min_leaf {
        return id;
    }
    let Some(best) = best_split(x, y, rows, params.min_leaf) else {
        return id;
    };
    let (l, r): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&i| x.get(i, best.feature) <= best.threshold);
    let left = grow(x, y, &l, depth + 1, params, nodes);
    let right = grow(x, y, &r, depth + 1, params, nodes);
    nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
    id
}

impl TreeModel {
    pub fn leaf_of(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_of(row)] {
            Node::Leaf { p, .. } => p,
            Node::Split { .. } => unreachable!("leaf_of returns a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        fn d(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + d(nodes, *left).max(d(nodes, *right)),
            }
        }
        d(&self.nodes, 0)
    }
}
