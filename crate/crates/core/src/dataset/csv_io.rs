//! CSV interchange formats.
//!
//! * Feature matrix: optional leading `# key: value` comment lines (the first
//!   one is `# descriptor: NAME`), then a header `id,f0,f1,...` and one row per
//!   example.
//! * Score matrix: same layout with the header `id,<label>,<label>,...`.
//! * Sparse vectors: long format `id,ngram_hash,weight`, one row per non-zero.
//!
//! Floats are written in Rust's shortest round-trip form, so export followed
//! by ingest is bit-identical.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::FeatureMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::persist::write_atomic;

/// A parsed id-keyed CSV table (features or scores).
#[derive(Debug, Clone, PartialEq)]
pub struct IdTable {
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub ids: Vec<String>,
    pub data: Matrix,
}

impl IdTable {
    pub fn descriptor(&self) -> Option<&str> {
        self.meta.get("descriptor").map(String::as_str)
    }

    /// Reorders rows to follow `ids`, joining by id. Extra rows are ignored.
    pub fn align_to(&self, ids: &[String]) -> Result<Matrix> {
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(self.ids.len());
        for (i, id) in self.ids.iter().enumerate() {
            if index.insert(id.as_str(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let mut rows = Vec::with_capacity(ids.len());
        for id in ids {
            let &i = index.get(id.as_str()).ok_or_else(|| Error::MissingId(id.clone()))?;
            rows.push(i);
        }
        Ok(self.data.select_rows(&rows))
    }
}

fn fmt_meta(out: &mut String, meta: &[(&str, String)]) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

fn render(meta: &[(&str, String)], header: &[String], ids: &[String], data: &Matrix) -> Result<String> {
    if ids.len() != data.rows() {
        return Err(Error::shape(format!("{} ids for {} rows", ids.len(), data.rows())));
    }
    let mut out = String::new();
    fmt_meta(&mut out, meta);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut rec: Vec<String> = Vec::with_capacity(header.len() + 1);
    rec.push("id".into());
    rec.extend(header.iter().cloned());
    w.write_record(&rec).map_err(csv_err)?;
    for (id, row) in ids.iter().zip(data.iter_rows()) {
        rec.clear();
        rec.push(id.clone());
        rec.extend(row.iter().map(|v| format!("{v}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| Error::Malformed {
        what: "csv output",
        detail: e.to_string(),
    })?;
    out.push_str(std::str::from_utf8(&body).expect("csv writer emits utf-8"));
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Malformed {
        what: "csv",
        detail: e.to_string(),
    }
}

/// Renders a feature matrix as CSV text. `extra_meta` lines follow the
/// `# descriptor:` line.
pub fn feature_csv_string(ids: &[String], fm: &FeatureMatrix, extra_meta: &[(&str, String)]) -> Result<String> {
    let mut meta = vec![("descriptor", fm.descriptor.clone())];
    meta.extend(extra_meta.iter().cloned());
    let header: Vec<String> = (0..fm.dim()).map(|j| format!("f{j}")).collect();
    render(&meta, &header, ids, &fm.data)
}

pub fn write_feature_csv(
    path: impl AsRef<Path>,
    ids: &[String],
    fm: &FeatureMatrix,
    extra_meta: &[(&str, String)],
) -> Result<()> {
    write_atomic(path, feature_csv_string(ids, fm, extra_meta)?.as_bytes())
}

pub fn score_csv_string(
    ids: &[String],
    labels: &[String],
    scores: &Matrix,
    meta: &[(&str, String)],
) -> Result<String> {
    if labels.len() != scores.cols() {
        return Err(Error::shape(format!(
            "{} label names for {} score columns",
            labels.len(),
            scores.cols()
        )));
    }
    render(meta, labels, ids, scores)
}

pub fn write_score_csv(
    path: impl AsRef<Path>,
    ids: &[String],
    labels: &[String],
    scores: &Matrix,
    meta: &[(&str, String)],
) -> Result<()> {
    write_atomic(path, score_csv_string(ids, labels, scores, meta)?.as_bytes())
}

/// Parses an id-keyed table from CSV text.
pub fn parse_id_table(text: &str) -> Result<IdTable> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut meta = BTreeMap::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(comment) = line.trim_end().strip_prefix('#') else {
            break;
        };
        if let Some((k, v)) = comment.split_once(':') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
        body_start += line.len();
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(&text.as_bytes()[body_start..]);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.get(0).map(str::trim) != Some("id") {
        return Err(Error::Malformed {
            what: "csv header",
            detail: "first column must be `id`".into(),
        });
    }
    let columns: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != columns.len() + 1 {
            return Err(Error::Malformed {
                what: "csv row",
                detail: format!(
                    "data row {} has {} fields, header has {}",
                    n + 1,
                    rec.len(),
                    columns.len() + 1
                ),
            });
        }
        ids.push(rec[0].to_string());
        for field in rec.iter().skip(1) {
            let v: f64 = field.trim().parse().map_err(|_| Error::Malformed {
                what: "csv value",
                detail: format!("row {:?}: {field:?} is not a number", &rec[0]),
            })?;
            data.push(v);
        }
    }
    let data = Matrix::from_vec(ids.len(), columns.len(), data)?;
    Ok(IdTable {
        meta,
        columns,
        ids,
        data,
    })
}

pub fn read_id_table(path: impl AsRef<Path>) -> Result<IdTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_id_table(&text)
}

/// Loads a feature CSV and aligns it to `ids` by id join.
///
/// The descriptor name comes from the `# descriptor:` line when present,
/// otherwise from `fallback_descriptor`.
pub fn ingest_features(path: impl AsRef<Path>, ids: &[String], fallback_descriptor: &str) -> Result<FeatureMatrix> {
    let table = read_id_table(path)?;
    let data = table.align_to(ids)?;
    let descriptor = table.descriptor().unwrap_or(fallback_descriptor).to_string();
    Ok(FeatureMatrix::new(descriptor, data))
}

/// Sparse vectors keyed by a 64-bit n-gram hash, one list per example.
pub fn sparse_csv_string(ids: &[String], vectors: &[Vec<(u64, f64)>], meta: &[(&str, String)]) -> Result<String> {
    if ids.len() != vectors.len() {
        return Err(Error::shape("one sparse vector per id required"));
    }
    let mut out = String::new();
    fmt_meta(&mut out, meta);
    out.push_str("id,ngram_hash,weight\n");
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for (id, v) in ids.iter().zip(vectors) {
        for (h, x) in v {
            w.write_record([id.as_str(), &h.to_string(), &format!("{x}")]).map_err(csv_err)?;
        }
    }
    let body = w.into_inner().map_err(|e| Error::Malformed {
        what: "csv output",
        detail: e.to_string(),
    })?;
    out.push_str(std::str::from_utf8(&body).expect("utf-8"));
    Ok(out)
}

/// Parses the long sparse format, grouping rows by id in first-seen order.
pub fn parse_sparse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<(u64, f64)>>)> {
    let mut ids: Vec<String> = Vec::new();
    let mut vectors: Vec<Vec<(u64, f64)>> = Vec::new();
    let mut pos: HashMap<String, usize> = HashMap::new();
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 3 {
            return Err(Error::Malformed {
                what: "sparse csv row",
                detail: format!("expected 3 fields, got {}", rec.len()),
            });
        }
        let h: u64 = rec[1].trim().parse().map_err(|_| Error::Malformed {
            what: "sparse csv hash",
            detail: rec[1].to_string(),
        })?;
        let w: f64 = rec[2].trim().parse().map_err(|_| Error::Malformed {
            what: "sparse csv weight",
            detail: rec[2].to_string(),
        })?;
        let slot = *pos.entry(rec[0].to_string()).or_insert_with(|| {
            ids.push(rec[0].to_string());
            vectors.push(Vec::new());
            ids.len() - 1
        });
        vectors[slot].push((h, w));
    }
    Ok((ids, vectors))
}
