//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each and exits nonzero when any criterion fails.
//!
//! Run with `cargo test -p genrefuse-cli --test acceptance`.

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use genrefuse_cli::config::{FeatureSpec, RunConfig};
use genrefuse_cli::pipeline;
use genrefuse_core::dataset::{indicators, FeatureMatrix};
use genrefuse_core::eval::{average_precision, fscore, Averaging};
use genrefuse_core::frames::{lbp_u2_8_2, GrayImage, LBP_BINS};
use genrefuse_core::fusion::{
    best_on_data_select, fuse, top_n_select, ClassifierResult, DataSource, FusionRule,
};
use genrefuse_core::learners::mlp::{loss_and_gradient, MlpWeights};
use genrefuse_core::learners::{mlknn_train, mlp_binary_train, MlknnParams, MlpParams};
use genrefuse_core::projection::Projector;
use genrefuse_core::resample::{minority_labels, mlsmote, mlsmote_then_mltl, mltl, ResampleConfig};
use genrefuse_core::text::SparseVector;
use genrefuse_core::{LabelMatrix, LabelSpace, Matrix, MultiLabelDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy")
}

// ---------------------------------------------------------------------------
// 1. dataset indicators

const PUBLISHED_GENRES: [&str; 18] = [
    "Action", "Adventure", "Animation", "Comedy", "Crime", "Documentary", "Drama", "Family", "Fantasy", "History",
    "Horror", "Music", "Mystery", "Romance", "Science Fiction", "TV Movie", "Thriller", "War",
];

/// A 10,594-title corpus over 18 genres with the published aggregates:
/// 922 distinct label sets and 25,702 assignments.
fn corpus_with_published_aggregates() -> MultiLabelDataset {
    let q = PUBLISHED_GENRES.len();
    let singles: Vec<Vec<usize>> = (0..q).map(|a| vec![a]).collect();
    let pairs: Vec<Vec<usize>> = (0..q).flat_map(|a| (a + 1..q).map(move |b| vec![a, b])).collect();
    let triples: Vec<Vec<usize>> = (0..q)
        .flat_map(|a| (a + 1..q).flat_map(move |b| (b + 1..q).map(move |c| vec![a, b, c])))
        .take(751)
        .collect();
    let mut rows: Vec<Vec<usize>> = singles;
    rows.extend(pairs.iter().cloned());
    rows.extend(triples.iter().cloned());
    rows.extend((0..5891).map(|i| pairs[i % pairs.len()].clone()));
    rows.extend((0..3781).map(|i| triples[i % triples.len()].clone()));
    let mut y = LabelMatrix::zeros(rows.len(), q);
    for (i, r) in rows.iter().enumerate() {
        for &l in r {
            y.set(i, l, true);
        }
    }
    let ids = (0..rows.len()).map(|i| format!("tmdb{i}")).collect();
    MultiLabelDataset::new(ids, y, LabelSpace::new(PUBLISHED_GENRES).unwrap()).unwrap()
}

fn truncate3(v: f64) -> f64 {
    (v * 1000.0).floor() / 1000.0
}

fn indicators_check() -> Check {
    let (_, ds) = pipeline::load_manifest(&fixture_dir().join("manifest.json")).map_err(|e| e.to_string())?;
    let s = pipeline::compute_stats(&ds).map_err(|e| e.to_string())?;
    let ind = s.indicators;
    // 30 assignments over 20 titles and 4 genres; 10 distinct label sets
    ensure!(ind.lcard == 1.5, "toy LCard {}", ind.lcard);
    ensure!(ind.lden == 0.375, "toy LDen {}", ind.lden);
    ensure!(ind.ldiv == 10, "toy LDiv {}", ind.ldiv);
    ensure!(ind.pldiv == 0.5, "toy PLDiv {}", ind.pldiv);

    let full = corpus_with_published_aggregates();
    ensure!(full.len() == 10594, "corpus has {} titles", full.len());
    let ind = indicators(&full).map_err(|e| e.to_string())?;
    let got = (truncate3(ind.lcard), truncate3(ind.lden), ind.ldiv, truncate3(ind.pldiv));
    ensure!(got == (2.426, 0.134, 922, 0.087), "published-aggregate corpus gives {got:?}");
    Ok("toy 1.5/0.375/10/0.5; corpus 2.426/0.134/922/0.087".into())
}

// ---------------------------------------------------------------------------
// 2. ML-kNN

struct MlknnOracle {
    priors: Vec<f64>,
    cond_pos: Vec<Vec<f64>>,
    cond_neg: Vec<Vec<f64>>,
    scores: Vec<f64>,
}

/// Direct transcription of the ML-kNN estimates: full sorts for every
/// neighbour query, counts per label, Laplace smoothing `s`.
fn brute_force_mlknn(x: &Matrix, y: &LabelMatrix, k: usize, s: f64, query: &[f64]) -> MlknnOracle {
    let (m, q) = (x.rows(), y.cols());
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, r)| (p - r).powi(2)).sum::<f64>();
    let knn = |pt: &[f64], skip: Option<usize>| -> Vec<usize> {
        let mut all: Vec<(f64, usize)> =
            (0..m).filter(|&j| Some(j) != skip).map(|j| (dist(pt, x.row(j)), j)).collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.iter().take(k).map(|p| p.1).collect()
    };
    let mut o = MlknnOracle { priors: vec![], cond_pos: vec![], cond_neg: vec![], scores: vec![] };
    for l in 0..q {
        let count = (0..m).filter(|&i| y.get(i, l)).count();
        o.priors.push((s + count as f64) / (2.0 * s + m as f64));
        let mut a = vec![0.0; k + 1];
        let mut b = vec![0.0; k + 1];
        for i in 0..m {
            let c = knn(x.row(i), Some(i)).iter().filter(|&&j| y.get(j, l)).count();
            if y.get(i, l) {
                a[c] += 1.0;
            } else {
                b[c] += 1.0;
            }
        }
        let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
        o.cond_pos.push(a.iter().map(|v| (s + v) / (s * (k as f64 + 1.0) + sa)).collect());
        o.cond_neg.push(b.iter().map(|v| (s + v) / (s * (k as f64 + 1.0) + sb)).collect());
    }
    let nn = knn(query, None);
    o.scores = (0..q)
        .map(|l| {
            let j = nn.iter().filter(|&&i| y.get(i, l)).count();
            let p = o.priors[l] * o.cond_pos[l][j];
            let n = (1.0 - o.priors[l]) * o.cond_neg[l][j];
            p / (p + n)
        })
        .collect();
    o
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, r)| (p - r).abs() <= tol)
}

/// Number of quantities where the model and the oracle disagree.
fn mlknn_mismatches(x: &Matrix, y: &LabelMatrix, k: usize, query: &[f64]) -> Result<usize, String> {
    let model = mlknn_train(x, y, &MlknnParams { k, s: 1.0 }).map_err(|e| e.to_string())?;
    let o = brute_force_mlknn(x, y, k, 1.0, query);
    let mut bad = usize::from(!close(&model.priors, &o.priors, 1e-12));
    for l in 0..y.cols() {
        bad += usize::from(!close(&model.cond_pos[l], &o.cond_pos[l], 1e-12));
        bad += usize::from(!close(&model.cond_neg[l], &o.cond_neg[l], 1e-12));
    }
    let (scores, pred) = model.predict(query).map_err(|e| e.to_string())?;
    bad += usize::from(!close(&scores, &o.scores, 1e-12));
    bad += usize::from(pred != o.scores.iter().map(|&v| v >= 0.5).collect::<Vec<_>>());
    Ok(bad)
}

fn random_problem(rng: &mut ChaCha8Rng, m: usize, d: usize, q: usize) -> (Matrix, LabelMatrix) {
    let x: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y: Vec<Vec<bool>> = (0..m).map(|_| (0..q).map(|_| rng.random_bool(0.4)).collect()).collect();
    (Matrix::from_rows(&x).unwrap(), LabelMatrix::from_rows(&y).unwrap())
}

fn mlknn_check() -> Check {
    // points 0, 1, 2, 10, 11 on a line; the label is held by 0, 1 and 10
    let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [10.0], [11.0]]).unwrap();
    let y = LabelMatrix::from_rows(&[[true], [true], [false], [true], [false]]).unwrap();
    let model = mlknn_train(&x, &y, &MlknnParams { k: 2, s: 1.0 }).map_err(|e| e.to_string())?;
    ensure!(close(&model.priors, &[4.0 / 7.0], 1e-12), "hand prior {:?}", model.priors);
    ensure!(close(&model.cond_pos[0], &[2.0 / 6.0, 3.0 / 6.0, 1.0 / 6.0], 1e-12), "hand cond_pos");
    ensure!(close(&model.cond_neg[0], &[1.0 / 5.0, 2.0 / 5.0, 2.0 / 5.0], 1e-12), "hand cond_neg");
    let (s, _) = model.predict(&[0.4]).map_err(|e| e.to_string())?;
    let num = 4.0 / 7.0 * (1.0 / 6.0);
    let hand = num / (num + 3.0 / 7.0 * (2.0 / 5.0));
    ensure!((s[0] - hand).abs() <= 1e-12, "hand score {} vs {hand}", s[0]);
    for query in [[0.4], [5.0], [10.6], [-3.0]] {
        let bad = mlknn_mismatches(&x, &y, 2, &query)?;
        ensure!(bad == 0, "hand set, query {query:?}: {bad} mismatches against the oracle");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xacc2);
    let mut total = 0;
    for _ in 0..100 {
        let m = rng.random_range(3..=30);
        let d = rng.random_range(1..=5);
        let q = rng.random_range(1..=4);
        let k = rng.random_range(1..m.min(11));
        let (x, y) = random_problem(&mut rng, m, d, q);
        let query: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        total += mlknn_mismatches(&x, &y, k, &query)?;
    }
    ensure!(total == 0, "{total} mismatches over 100 random datasets");
    Ok("hand trace and 100 random datasets agree to 1e-12".into())
}

// ---------------------------------------------------------------------------
// 3. MLP

fn mlp_check() -> Check {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inputs, hidden, m) = (rng.random_range(1..=5), rng.random_range(1..=8), rng.random_range(2..=12));
        let (x, y) = random_problem(&mut rng, m, inputs, 1);
        let t: Vec<f64> = (0..m).map(|i| f64::from(u8::from(y.get(i, 0)))).collect();
        let w = MlpWeights::init(inputs, hidden, &mut rng);
        let rows: Vec<usize> = (0..m).collect();
        let (_, grad) = loss_and_gradient(&w, &x, &t, &rows);
        let flat = w.to_flat();
        ensure!(grad.len() == flat.len(), "gradient has {} entries for {} weights", grad.len(), flat.len());
        let h = 1e-6;
        for (i, g) in grad.iter().enumerate() {
            let mut p = flat.clone();
            p[i] += h;
            let up = loss_and_gradient(&MlpWeights::from_flat(inputs, hidden, &p), &x, &t, &rows).0;
            p[i] -= 2.0 * h;
            let down = loss_and_gradient(&MlpWeights::from_flat(inputs, hidden, &p), &x, &t, &rows).0;
            let fd = (up - down) / (2.0 * h);
            // absolute floor keeps vanishing components from dominating
            let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-7);
            worst = worst.max(rel);
        }
    }
    ensure!(worst < 1e-4, "max relative gradient error {worst:e}");

    let x = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
    let y = [false, true, true, false];
    let params = MlpParams::default();
    let model = mlp_binary_train(&x, &y, &params, params.seed).map_err(|e| e.to_string())?;
    let correct = (0..4).filter(|&i| (model.predict_proba(x.row(i)) >= 0.5) == y[i]).count();
    ensure!(correct == 4, "XOR training accuracy {correct}/4 with the default budget");
    Ok(format!("max rel error {worst:.1e} over 20 seeds; XOR 4/4"))
}

// ---------------------------------------------------------------------------
// 4. LBP

fn bit_transitions(p: u32) -> u32 {
    (0..8).filter(|&i| (p >> i) & 1 != (p >> ((i + 1) % 8)) & 1).count() as u32
}

/// Per-pixel LBP(8, 2) oracle: neighbour positions from the circle
/// equation, bilinear sampling, `>=` against the centre, uniform patterns
/// ranked in ascending order with the non-uniform catch-all last.
fn oracle_lbp_histogram(img: &GrayImage) -> Vec<f64> {
    let uniform: Vec<u32> = (0..256).filter(|&p| bit_transitions(p) <= 2).collect();
    let px = |x: i64, y: i64| f64::from(img.get(x as usize, y as usize));
    let sample = |sx: f64, sy: f64| {
        let (x0, y0) = (sx.floor(), sy.floor());
        let (fx, fy) = (sx - x0, sy - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        if fx == 0.0 && fy == 0.0 {
            return px(x0, y0);
        }
        let top = px(x0, y0) + fx * (px(x0 + 1, y0) - px(x0, y0));
        let bottom = px(x0, y0 + 1) + fx * (px(x0 + 1, y0 + 1) - px(x0, y0 + 1));
        top + fy * (bottom - top)
    };
    let snap = |v: f64| if (v - v.round()).abs() < 1e-9 { v.round() } else { v };
    let mut counts = vec![0u64; LBP_BINS];
    for y in 2..img.height - 2 {
        for x in 2..img.width - 2 {
            let c = f64::from(img.get(x, y));
            let mut code = 0u32;
            for p in 0..8 {
                let a = std::f64::consts::FRAC_PI_4 * f64::from(p);
                let sx = snap(x as f64 + 2.0 * a.cos());
                let sy = snap(y as f64 - 2.0 * a.sin());
                if sample(sx, sy) >= c {
                    code |= 1 << p;
                }
            }
            let bin = uniform.iter().position(|&u| u == code).unwrap_or(LBP_BINS - 1);
            counts[bin] += 1;
        }
    }
    let n = ((img.width - 4) * (img.height - 4)) as f64;
    counts.iter().map(|&c| c as f64 / n).collect()
}

fn lbp_check() -> Check {
    let uniform = (0..256u32).filter(|&p| bit_transitions(p) <= 2).count();
    ensure!(uniform == 58, "{uniform} uniform patterns");

    let mut rng = ChaCha8Rng::seed_from_u64(0xacc4);
    for i in 0..100 {
        let (w, h) = (rng.random_range(5..40), rng.random_range(5..40));
        let px: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
        let img = GrayImage::new(w, h, px).map_err(|e| e.to_string())?;
        let hist = lbp_u2_8_2(&img).map_err(|e| e.to_string())?;
        ensure!(hist.len() == 59, "image {i}: {} bins", hist.len());
        let sum: f64 = hist.iter().sum();
        ensure!((sum - 1.0).abs() <= 1e-9, "image {i}: histogram sums to {sum}");
        if i < 10 {
            ensure!(hist == oracle_lbp_histogram(&img), "image {i}: differs from the per-pixel oracle");
        }
    }

    // 7x7 ramp, and the same ramp clipped so flat runs exercise the >= rule
    let ramp = GrayImage::from_fn(7, 7, |x, y| (17 * x + 5 * y) as u8);
    let clipped = GrayImage::from_fn(7, 7, |x, y| (17 * x + 5 * y).min(60) as u8);
    for (name, img) in [("ramp", ramp), ("clipped ramp", clipped)] {
        let got = lbp_u2_8_2(&img).map_err(|e| e.to_string())?;
        let want = oracle_lbp_histogram(&img);
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        ensure!(bits(&got) == bits(&want), "7x7 {name}: {got:?} vs oracle {want:?}");
    }
    Ok("58 uniform patterns; 100 random images; 7x7 fixtures bit-exact".into())
}

// ---------------------------------------------------------------------------
// 5. projection

fn random_sparse(rng: &mut ChaCha8Rng, nnz: usize) -> SparseVector {
    let mut keys: Vec<u64> = (0..nnz).map(|_| rng.random()).collect();
    keys.sort_unstable();
    keys.dedup();
    SparseVector { entries: keys.into_iter().map(|k| (k, rng.random_range(-1.0..1.0))).collect() }
}

/// Euclidean distance between sorted sparse vectors by merge.
fn sparse_distance(a: &SparseVector, b: &SparseVector) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.entries.len() || j < b.entries.len() {
        let ka = a.entries.get(i).map_or(u64::MAX, |e| e.0);
        let kb = b.entries.get(j).map_or(u64::MAX, |e| e.0);
        let d = if ka == kb {
            i += 1;
            j += 1;
            a.entries[i - 1].1 - b.entries[j - 1].1
        } else if ka < kb {
            i += 1;
            a.entries[i - 1].1
        } else {
            j += 1;
            -b.entries[j - 1].1
        };
        acc += d * d;
    }
    acc.sqrt()
}

fn projection_check() -> Check {
    let p = Projector::with_seed(0xacc5);
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc5);
    let vs: Vec<SparseVector> = (0..1000)
        .map(|_| {
            let nnz = rng.random_range(20..200);
            random_sparse(&mut rng, nnz)
        })
        .collect();
    let ps: Vec<Vec<f64>> = vs.iter().map(|v| p.project(v)).collect();
    ensure!(ps.iter().all(|v| v.len() == 128), "projected width is not 128");
    let (mut ok, mut total) = (0u64, 0u64);
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let orig = sparse_distance(&vs[i], &vs[j]);
            let proj = ps[i].iter().zip(&ps[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            total += 1;
            ok += u64::from((proj - orig).abs() <= 0.25 * orig);
        }
    }
    let frac = ok as f64 / total as f64;
    ensure!(frac >= 0.9, "{ok} of {total} pairwise distances within 25% ({frac:.4})");

    ensure!(p.project(&SparseVector::default()).iter().all(|&v| v == 0.0), "zero vector does not map to zero");
    // dyadic weights and small integer coefficients keep every sum exact
    let dyadic = |rng: &mut ChaCha8Rng| {
        let mut keys: Vec<u64> = (0..30).map(|_| rng.random_range(0..5000)).collect();
        keys.sort_unstable();
        keys.dedup();
        SparseVector { entries: keys.into_iter().map(|k| (k, f64::from(rng.random_range(-64..=64)) / 8.0)).collect() }
    };
    for _ in 0..50 {
        let (u, v) = (dyadic(&mut rng), dyadic(&mut rng));
        let (a, b) = (f64::from(rng.random_range(-4..=4)), f64::from(rng.random_range(-4..=4)));
        let mut combo: BTreeMap<u64, f64> = BTreeMap::new();
        for &(k, w) in &u.entries {
            *combo.entry(k).or_default() += a * w;
        }
        for &(k, w) in &v.entries {
            *combo.entry(k).or_default() += b * w;
        }
        let lhs = p.project(&SparseVector { entries: combo.into_iter().collect() });
        let (pu, pv) = (p.project(&u), p.project(&v));
        let rhs: Vec<f64> = pu.iter().zip(&pv).map(|(x, y)| a * x + b * y).collect();
        ensure!(lhs == rhs, "projection is not linear for a = {a}, b = {b}");
    }

    let sub = FeatureSpec::SubTfidf { n: 1, projection_dim: genrefuse_core::projection::DEFAULT_OUTPUT_DIM };
    ensure!(sub.descriptor() == "SUB-TFIDF-1-CS128", "default text descriptor {}", sub.descriptor());
    let fm: FeatureMatrix = p.project_matrix("SUB-TFIDF-1", &vs[..3]);
    ensure!(fm.dim() == 128, "matrix width {}", fm.dim());
    Ok(format!("{:.2}% of {total} distances within 25%; linear; width 128", 100.0 * frac))
}

// ---------------------------------------------------------------------------
// 6. fusion

fn fusion_check() -> Check {
    let a = Matrix::from_rows(&[[0.5, 0.2]]).unwrap();
    let b = Matrix::from_rows(&[[0.4, 0.3]]).unwrap();
    let cases: [(FusionRule, f64, [f64; 2], [bool; 2]); 3] = [
        (FusionRule::Prod, 0.01, [0.20, 0.06], [true, true]),
        (FusionRule::Max, 0.3, [0.5, 0.3], [true, true]),
        (FusionRule::Mean, 0.3, [0.45, 0.25], [true, false]),
    ];
    for (rule, t, fused, pred) in cases {
        let (f, p) = fuse(&[&a, &b], rule, t).map_err(|e| e.to_string())?;
        ensure!(f.as_slice() == fused, "{rule:?}: fused {:?}, expected {fused:?}", f.as_slice());
        ensure!(p.row(0) == pred, "{rule:?}: predictions {:?}, expected {pred:?}", p.row(0));
    }

    use DataSource::*;
    let mut table: Vec<ClassifierResult> = [
        ("SYN-LSTM", Synopsis, 0.488),
        ("TRAILER-C3D/BR_MLP", TrailerFrames, 0.471),
        ("TRAILER-C3D/MLkNN", TrailerFrames, 0.457),
        ("TRAILER-C3D/BR_SVM", TrailerFrames, 0.457),
        ("SUB-LSTM", Subtitle, 0.436),
        ("POSTER-INCv3/BR_MLP", Poster, 0.409),
        ("TRAILER-C3D/BR_DT", TrailerFrames, 0.402),
        ("SUB-TFIDF-1/BR_MLP", Subtitle, 0.366),
        ("POSTER-INCv3/MLkNN", Poster, 0.355),
        ("AUDIO-SPEC-INCv3/BR_MLP", TrailerAudio, 0.334),
        ("AUDIO-SSD/BR_MLP", TrailerAudio, 0.326),
        ("AUDIO-MFCC/MLkNN", TrailerAudio, 0.312),
    ]
    .into_iter()
    .map(|(id, src, f)| ClassifierResult::new(id, src, vec![f]))
    .collect();
    // presentation order must not matter
    table.reverse();
    let top2 = top_n_select(&table, 2).map_err(|e| e.to_string())?;
    ensure!(top2 == ["SYN-LSTM", "TRAILER-C3D/BR_MLP"], "TOP-2 {top2:?}");
    let best = best_on_data_select(&table).map_err(|e| e.to_string())?;
    let want = ["TRAILER-C3D/BR_MLP", "AUDIO-SPEC-INCv3/BR_MLP", "POSTER-INCv3/BR_MLP", "SUB-LSTM", "SYN-LSTM"];
    ensure!(
        best.iter().collect::<HashSet<_>>() == want.iter().map(|s| s.to_string()).collect::<Vec<_>>().iter().collect(),
        "BEST-ON-DATA {best:?}"
    );
    Ok("prod/max/mean examples exact; TOP-2 and BEST-ON-DATA member sets".into())
}

// ---------------------------------------------------------------------------
// 7. metrics

fn lm(rows: &[&[u8]]) -> LabelMatrix {
    LabelMatrix::from_rows(&rows.iter().map(|r| r.iter().map(|&v| v == 1).collect::<Vec<_>>()).collect::<Vec<_>>())
        .unwrap()
}

fn metrics_check() -> Check {
    // TP = 2, FP = 1, FN = 1
    let truth = lm(&[&[1, 0], &[0, 1], &[1, 0]]);
    let pred = lm(&[&[1, 1], &[0, 1], &[0, 0]]);
    let micro = fscore(&truth, &pred, Averaging::Micro).map_err(|e| e.to_string())?;
    ensure!(micro == 2.0 / 3.0, "micro F {micro}");

    let ap = average_precision(&[true, false, true, false], &[0.9, 0.8, 0.7, 0.1]).ok_or("AP undefined")?;
    ensure!((ap - 5.0 / 6.0).abs() <= 1e-12, "AP {ap}");

    let mut rng = ChaCha8Rng::seed_from_u64(0xacc7);
    let transforms: [(&str, fn(f64) -> f64); 4] = [
        ("affine", |s| 3.0 * s - 7.0),
        ("exp", f64::exp),
        ("cube", |s| s * s * s + s),
        ("logit", |s| (s / (1.0 - s)).ln()),
    ];
    for inst in 0..50 {
        let m = rng.random_range(2..60);
        let mut truth: Vec<bool> = (0..m).map(|_| rng.random_bool(0.3)).collect();
        truth[0] = true;
        // a coarse grid so that ties occur and must survive the transform
        let scores: Vec<f64> = (0..m).map(|_| f64::from(rng.random_range(1..40)) / 40.0).collect();
        let base = average_precision(&truth, &scores).ok_or("AP undefined")?;
        for (name, f) in transforms {
            let moved: Vec<f64> = scores.iter().map(|&s| f(s)).collect();
            let ap = average_precision(&truth, &moved).ok_or("AP undefined")?;
            ensure!(ap == base, "instance {inst}: AP {base} became {ap} under {name}");
        }
    }
    Ok("micro F 2/3; AP 5/6; 50 instances invariant".into())
}

// ---------------------------------------------------------------------------
// 8. end-to-end determinism

fn tree_bytes(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn determinism_check() -> Check {
    let base = RunConfig::load(&fixture_dir().join("config.toml")).map_err(|e| e.to_string())?;
    ensure!(base.fusion.iter().any(|f| f.selection_label() == "TOP-2"), "toy config has no TOP-2 fusion");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let cfg = RunConfig { output_dir: tmp.path().join(run), ..base.clone() };
        let summary = pipeline::run(&cfg).map_err(|e| e.to_string())?;
        ensure!(!summary.classifiers.is_empty() && !summary.fusions.is_empty(), "run {run}: empty report");
        trees.push(tree_bytes(&cfg.output_dir));
    }
    let (a, b) = (&trees[0], &trees[1]);
    let report = Path::new("report.json");
    ensure!(a.get(report).is_some() && a.get(report) == b.get(report), "report.json differs between runs");
    let differing: Vec<_> = a.keys().chain(b.keys()).filter(|k| a.get(*k) != b.get(*k)).collect();
    ensure!(differing.is_empty(), "{} files differ, first {:?}", differing.len(), differing[0]);
    Ok(format!("{} output files byte-identical across two runs", a.len()))
}

// ---------------------------------------------------------------------------
// 9. resampling

fn labelled(labels: &[Vec<bool>], x: &[Vec<f64>]) -> MultiLabelDataset {
    let space = LabelSpace::new((0..labels[0].len()).map(|i| format!("G{i}"))).unwrap();
    let ids = (0..labels.len()).map(|i| format!("m{i:03}")).collect();
    MultiLabelDataset::new(ids, LabelMatrix::from_rows(labels).unwrap(), space)
        .unwrap()
        .with_features(FeatureMatrix::new("X", Matrix::from_rows(x).unwrap()))
        .unwrap()
}

/// True when `p = s + u (r - s)` for a single `u` in [0, 1].
fn on_segment(p: &[f64], s: &[f64], r: &[f64]) -> bool {
    let mut u: Option<f64> = None;
    p.iter().zip(s).zip(r).all(|((&pv, &sv), &rv)| {
        if pv < sv.min(rv) - 1e-12 || pv > sv.max(rv) + 1e-12 {
            return false;
        }
        if (rv - sv).abs() < 1e-12 {
            return true;
        }
        let t = (pv - sv) / (rv - sv);
        match u {
            None => {
                u = Some(t);
                true
            }
            Some(prev) => (prev - t).abs() < 1e-9,
        }
    })
}

/// Tomek links by exhaustive search: mutual nearest neighbours whose
/// Hamming label similarity is below `threshold`.
fn oracle_links(x: &[Vec<f64>], labels: &[Vec<bool>], threshold: f64) -> Vec<(usize, usize)> {
    let nearest = |i: usize| {
        (0..x.len())
            .filter(|&j| j != i)
            .map(|j| (x[i].iter().zip(&x[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), j))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .unwrap()
            .1
    };
    let mut links = vec![];
    for a in 0..x.len() {
        let b = nearest(a);
        let same = labels[a].iter().zip(&labels[b]).filter(|(p, q)| p == q).count();
        if a < b && nearest(b) == a && (same as f64 / labels[a].len() as f64) < threshold {
            links.push((a, b));
        }
    }
    links
}

fn resampling_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc9);
    let mut synthesised = 0;
    for run in 0..100u64 {
        let m = rng.random_range(8..40);
        let q = rng.random_range(2..5);
        let d = rng.random_range(1..4);
        let labels: Vec<Vec<bool>> = (0..m)
            .map(|_| {
                let mut r: Vec<bool> = (0..q).map(|j| rng.random_bool(if j == 0 { 0.9 } else { 0.2 })).collect();
                r[0] |= !r.iter().any(|&b| b);
                r
            })
            .collect();
        let x: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let ds = labelled(&labels, &x);
        let cfg = ResampleConfig { seed: run, k_neighbors: 3, ..Default::default() };
        let out = mlsmote(&ds, &cfg).map_err(|e| e.to_string())?;
        ensure!(out.subset(&(0..m).collect::<Vec<_>>()) == ds, "run {run}: original rows changed");
        let ox = &out.features().unwrap().data;
        for i in m..out.len() {
            synthesised += 1;
            ensure!(out.labels().row(i).iter().any(|&b| b), "run {run}: synthetic row {i} has no labels");
            let seed_id = out.ids()[i].split('~').next().unwrap_or_default();
            let s = ds.ids().iter().position(|id| id == seed_id).ok_or(format!("run {run}: unknown seed"))?;
            ensure!(
                (0..m).any(|r| on_segment(ox.row(i), &x[s], &x[r])),
                "run {run}: synthetic row {i} leaves every seed-neighbour segment"
            );
        }
    }
    ensure!(synthesised > 0, "no synthetic rows were produced");

    // 1-D: mutual pairs (0,1) with {A} vs {B} and (2,3) with {A} vs {A};
    // {A} is the more frequent label set, so only row 0 goes
    let (a, b, c) = (vec![true, false, false], vec![false, true, false], vec![false, false, true]);
    let labels = vec![a.clone(), b, a.clone(), a, c.clone(), c];
    let x: Vec<Vec<f64>> = [0.0, 1.0, 5.0, 5.5, 9.0, 20.0].iter().map(|&v| vec![v]).collect();
    let ds = labelled(&labels, &x);
    let cfg = ResampleConfig::default();
    let links = oracle_links(&x, &labels, cfg.mltl_threshold);
    ensure!(links == [(0, 1)], "oracle links {links:?}");
    let out = mltl(&ds, &cfg).map_err(|e| e.to_string())?;
    ensure!(out.ids() == ["m001", "m002", "m003", "m004", "m005"], "MLTL kept {:?}", out.ids());

    let balanced = labelled(
        &[vec![true, false], vec![true, false], vec![false, true], vec![false, true]],
        &[vec![0.0], vec![0.1], vec![10.0], vec![10.1]],
    );
    ensure!(minority_labels(balanced.labels()).is_empty(), "balanced set reports minority labels");
    for (name, out) in [
        ("ML-SMOTE", mlsmote(&balanced, &cfg)),
        ("MLTL", mltl(&balanced, &cfg)),
        ("ML-SMOTE+MLTL", mlsmote_then_mltl(&balanced, &cfg)),
    ] {
        ensure!(out.map_err(|e| e.to_string())? == balanced, "{name} changed a balanced dataset");
    }
    Ok(format!("{synthesised} synthetic rows on segments; MLTL removes m000 only; balanced unchanged"))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Option<Duration>); 9] = [
        ("1 dataset indicators", indicators_check, Some(Duration::from_secs(1))),
        ("2 ML-kNN oracle", mlknn_check, Some(Duration::from_secs(10))),
        ("3 MLP gradient and XOR", mlp_check, Some(Duration::from_secs(30))),
        ("4 uniform LBP(8,2)", lbp_check, None),
        ("5 random projection", projection_check, None),
        ("6 late fusion", fusion_check, None),
        ("7 F-score and AP", metrics_check, None),
        ("8 end-to-end determinism", determinism_check, Some(Duration::from_secs(120))),
        ("9 ML-SMOTE and MLTL", resampling_check, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<26} {:>7.2} s  {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<26} {:>7.2} s  {why}", elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
