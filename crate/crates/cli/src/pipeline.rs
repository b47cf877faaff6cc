//! The composite `run`: extract, cross-validate every feature/classifier
//! pair, fuse, and write every artifact under the output directory.
//!
//! Output layout:
//!
//! ```text
//! stats.json  folds.json  report.json
//! features/<DESC>.csv       codebooks/<DESC>.json   text/<DESC>.json  text/<DESC>.sparse.csv
//! scores/<DESC>__<LEARNER>.csv   models/<DESC>__<LEARNER>.json   reports/<DESC>__<LEARNER>.json
//! fusion/<NN>_<SELECTION>_<RULE>.csv   reports/fusion_<NN>_<SELECTION>_<RULE>.json
//! ```

use std::path::{Path, PathBuf};

use genrefuse_core::dataset::csv_io::{score_csv_string, sparse_csv_string, write_feature_csv, write_score_csv};
use genrefuse_core::dataset::Manifest;
use genrefuse_core::dataset::{cooccurrence, indicators, kfold_split};
use genrefuse_core::eval::{crossval_run, evaluate_folds, ResampleStep};
use genrefuse_core::frames::Codebook;
use genrefuse_core::fusion::{best_on_data_select, fuse_plan, top_n_select, ClassifierResult, DataSource, FusionPlan};
use genrefuse_core::learners::train;
use genrefuse_core::persist::{write_atomic, Artifact};
use genrefuse_core::projection::Projector;
use genrefuse_core::resample;
use genrefuse_core::seed::derive_seed;
use genrefuse_core::text::TfidfModel;
use genrefuse_core::{
    ClassifierSpec, EvaluationReport, FeatureMatrix, FoldAssignment, Indicators, Matrix, MultiLabelDataset,
    FORMAT_VERSION,
};
use log::info;
use serde::{Deserialize, Serialize};

use crate::config::{FeatureSpec, FusionSpec, RunConfig, Selection};
use crate::error::{CliError, CliResult, StageExt};
use crate::extract::{extract_feature, Extracted};
use crate::model_io::save_model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub titles: usize,
    pub labels: Vec<String>,
    pub indicators: Indicators,
    pub cooccurrence: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub descriptor: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierEntry {
    /// `DESCRIPTOR/LEARNER`, e.g. `AUDIO-SSD/BR_MLP`.
    pub id: String,
    pub descriptor: String,
    pub learner: String,
    pub source: Option<DataSource>,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionEntry {
    pub name: String,
    pub selection: String,
    pub plan: FusionPlan,
    pub report: EvaluationReport,
}

/// Everything a run measured. Written to `report.json`; contains no paths
/// or timestamps, so identical inputs give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub stats: StatsReport,
    pub folds: usize,
    pub features: Vec<FeatureSummary>,
    pub classifiers: Vec<ClassifierEntry>,
    pub fusions: Vec<FusionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TextModelArtifact {
    pub model: TfidfModel,
    pub projector: Projector,
}

/// Out-of-fold results for one feature/classifier pair.
#[derive(Debug, Clone)]
pub struct CrossvalResult {
    pub entry: ClassifierEntry,
    pub scores: Matrix,
}

pub fn load_manifest(path: &Path) -> CliResult<(Manifest, MultiLabelDataset)> {
    let manifest = Manifest::load(path).stage("manifest")?;
    let ds = manifest.to_dataset().stage("manifest")?;
    Ok((manifest, ds))
}

pub fn compute_stats(ds: &MultiLabelDataset) -> CliResult<StatsReport> {
    Ok(StatsReport {
        titles: ds.len(),
        labels: ds.label_space().names().to_vec(),
        indicators: indicators(ds).stage("stats")?,
        cooccurrence: cooccurrence(ds).stage("stats")?,
    })
}

/// Human-readable indicators and co-occurrence table.
pub fn render_stats(s: &StatsReport) -> String {
    let mut out = format!(
        "titles {}  labels {}\nLCard {:.3}  LDen {:.3}  LDiv {}  PLDiv {:.3}\n",
        s.titles,
        s.labels.len(),
        s.indicators.lcard,
        s.indicators.lden,
        s.indicators.ldiv,
        s.indicators.pldiv
    );
    let width = s.labels.iter().map(String::len).max().unwrap_or(0).max(5);
    out.push_str(&format!("{:width$}", ""));
    for l in &s.labels {
        out.push_str(&format!(" {l:>width$}"));
    }
    out.push('\n');
    for (l, row) in s.labels.iter().zip(&s.cooccurrence) {
        out.push_str(&format!("{l:width$}"));
        for c in row {
            out.push_str(&format!(" {c:>width$}"));
        }
        out.push('\n');
    }
    out
}

/// Writes artifacts under one directory.
pub struct Outputs {
    pub dir: PathBuf,
    pub seed: u64,
}

impl Outputs {
    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn json<T: Serialize>(&self, rel: &str, stage: &'static str, descriptor: &str, payload: T) -> CliResult<()> {
        Artifact::new(stage, descriptor, self.seed, payload)
            .save(self.path(rel))
            .stage(stage)
    }

    fn meta(&self, stage: &str) -> Vec<(&'static str, String)> {
        vec![
            ("stage", stage.to_string()),
            ("seed", self.seed.to_string()),
            ("format_version", FORMAT_VERSION.to_string()),
        ]
    }
}

fn file_stem(id: &str) -> String {
    id.replace('/', "__")
}

pub fn make_folds(cfg: &RunConfig, ds: &MultiLabelDataset) -> CliResult<FoldAssignment> {
    kfold_split(ds.len(), cfg.folds, derive_seed(cfg.seed, "kfold")).stage("folds")
}

/// Runs every configured extractor and writes the feature files.
pub fn extract_all(cfg: &RunConfig, manifest: &Manifest, out: &Outputs) -> CliResult<Vec<FeatureMatrix>> {
    let ids = manifest.ids();
    let mut all = Vec::with_capacity(cfg.features.len());
    for spec in &cfg.features {
        let desc = spec.descriptor();
        info!("extract {desc}");
        let Extracted { features, codebook, text } = extract_feature(spec, manifest, cfg.seed).stage("extract")?;
        if !matches!(spec, FeatureSpec::External { .. }) {
            write_feature_csv(out.path(&format!("features/{desc}.csv")), &ids, &features, &out.meta("extract"))
                .stage("extract")?;
        }
        if let Some(cb) = codebook {
            out.json::<Codebook>(&format!("codebooks/{desc}.json"), "extract", &desc, cb)?;
        }
        if let Some(t) = text {
            let base = desc.trim_end_matches(&t.projector.descriptor_suffix()).to_string();
            let entries: Vec<Vec<(u64, f64)>> = t.sparse.iter().map(|v| v.entries.clone()).collect();
            let mut meta = vec![("descriptor", base.clone())];
            meta.extend(out.meta("extract"));
            let text = sparse_csv_string(&ids, &entries, &meta).stage("extract")?;
            write_atomic(out.path(&format!("text/{base}.sparse.csv")), text.as_bytes()).stage("extract")?;
            let payload = TextModelArtifact { model: t.model, projector: t.projector };
            out.json(&format!("text/{desc}.json"), "extract", &desc, payload)?;
        }
        all.push(features);
    }
    Ok(all)
}

fn resample_step(cfg: &RunConfig) -> Option<ResampleStep> {
    cfg.resample.as_ref().and_then(|r| r.step())
}

/// Cross-validates one classifier on one feature set, then trains a final
/// model on all titles and saves it.
pub fn crossval_one(
    cfg: &RunConfig,
    ds: &MultiLabelDataset,
    features: &FeatureMatrix,
    spec: &ClassifierSpec,
    folds: &FoldAssignment,
    out: &Outputs,
) -> CliResult<CrossvalResult> {
    let id = format!("{}/{}", features.descriptor, spec.name());
    info!("crossval {id}");
    let with_x = ds.clone().with_features(features.clone()).stage("crossval")?;
    let step = resample_step(cfg);
    let run_seed = derive_seed(cfg.seed, "crossval");
    let cv = crossval_run(&id, &with_x, spec, folds, step.as_ref(), run_seed).stage("crossval")?;

    let stem = file_stem(&id);
    let mut meta = vec![("descriptor", features.descriptor.clone()), ("classifier", spec.name().to_string())];
    meta.extend(out.meta("crossval"));
    write_score_csv(
        out.path(&format!("scores/{stem}.csv")),
        ds.ids(),
        ds.label_space().names(),
        &cv.scores,
        &meta,
    )
    .stage("crossval")?;

    let full = match step {
        Some(s) => {
            let c = resample::ResampleConfig { seed: derive_seed(cfg.seed ^ s.config.seed, "resample/full"), ..s.config };
            resample::apply(s.method, &with_x, &c).stage("resample")?
        }
        None => with_x,
    };
    let final_spec = spec.with_seed(derive_seed(cfg.seed, &format!("train/{id}")));
    let model = train(&final_spec, &full).stage("train")?;
    save_model(&out.path(&format!("models/{stem}.json")), &model, &features.descriptor, cfg.seed).stage("train")?;

    let entry = ClassifierEntry {
        id: id.clone(),
        descriptor: features.descriptor.clone(),
        learner: spec.name().to_string(),
        source: DataSource::from_descriptor(&features.descriptor),
        report: cv.report,
    };
    out.json(&format!("reports/{stem}.json"), "crossval", &id, &entry)?;
    Ok(CrossvalResult { entry, scores: cv.scores })
}

/// Resolves a fusion spec's members against the cross-validated results.
pub fn fusion_members(spec: &FusionSpec, results: &[CrossvalResult]) -> CliResult<Vec<String>> {
    let ranked = || -> CliResult<Vec<ClassifierResult>> {
        results
            .iter()
            .map(|r| {
                let source = r.entry.source.ok_or_else(|| {
                    CliError::config(format!(
                        "{}: descriptor has no data-source prefix (TRAILER-, AUDIO-, POSTER-, SUB-, SYN-)",
                        r.entry.id
                    ))
                })?;
                Ok(ClassifierResult::new(r.entry.id.clone(), source, r.entry.report.fold_fscores()))
            })
            .collect()
    };
    match spec.select {
        Selection::TopN => top_n_select(&ranked()?, spec.n.unwrap_or(0)).stage("fusion"),
        Selection::BestOnData => best_on_data_select(&ranked()?).stage("fusion"),
        Selection::Explicit => Ok(spec.members.clone().unwrap_or_default()),
    }
}

pub fn fuse_one(
    index: usize,
    spec: &FusionSpec,
    results: &[CrossvalResult],
    ds: &MultiLabelDataset,
    folds: &FoldAssignment,
    out: &Outputs,
) -> CliResult<FusionEntry> {
    let members = fusion_members(spec, results)?;
    let mut plan = FusionPlan::new(spec.rule, spec.input, members);
    if let Some(t) = spec.threshold {
        plan = plan.with_threshold(t);
    }
    plan.validate().map_err(|e| CliError::config(e.to_string()))?;
    let matrices: Vec<&Matrix> = plan
        .members
        .iter()
        .map(|m| {
            results
                .iter()
                .find(|r| &r.entry.id == m)
                .map(|r| &r.scores)
                .ok_or_else(|| CliError::config(format!("fusion member {m:?} was not cross-validated")))
        })
        .collect::<CliResult<_>>()?;
    let (scores, preds) = fuse_plan(&plan, &matrices).stage("fusion")?;
    let name = format!("{} {}", spec.selection_label(), plan.label());
    info!("fusion {name}: {}", plan.members.join(" + "));
    let report = evaluate_folds(&name, ds.labels(), ds.label_space(), folds, &scores, &preds).stage("evaluate")?;

    let stem = format!("{index:02}_{}_{}", spec.selection_label(), plan.label());
    let mut meta = vec![("descriptor", name.clone()), ("members", plan.members.join(" "))];
    meta.extend(out.meta("fusion"));
    let labels = ds.label_space().names();
    let text = score_csv_string(ds.ids(), labels, &scores, &meta).stage("fusion")?;
    write_atomic(out.path(&format!("fusion/{stem}.csv")), text.as_bytes()).stage("fusion")?;
    let entry = FusionEntry { name: name.clone(), selection: spec.selection_label(), plan, report };
    out.json(&format!("reports/fusion_{stem}.json"), "fusion", &name, &entry)?;
    Ok(entry)
}

/// Extraction plus cross-validation of every feature/classifier pair.
pub fn crossval_all(
    cfg: &RunConfig,
    manifest: &Manifest,
    ds: &MultiLabelDataset,
    out: &Outputs,
) -> CliResult<(FoldAssignment, Vec<FeatureMatrix>, Vec<CrossvalResult>)> {
    let folds = make_folds(cfg, ds)?;
    out.json("folds.json", "folds", "kfold", &folds)?;
    let features = extract_all(cfg, manifest, out)?;
    let mut results = Vec::new();
    for fm in &features {
        for spec in &cfg.classifiers {
            results.push(crossval_one(cfg, ds, fm, spec, &folds, out)?);
        }
    }
    Ok((folds, features, results))
}

/// The full pipeline. Returns the summary that was written to `report.json`.
pub fn run(cfg: &RunConfig) -> CliResult<RunSummary> {
    let out = Outputs { dir: cfg.output_dir.clone(), seed: cfg.seed };
    let (manifest, ds) = load_manifest(&cfg.manifest)?;
    let stats = compute_stats(&ds)?;
    out.json("stats.json", "stats", "manifest", &stats)?;
    let (folds, features, results) = crossval_all(cfg, &manifest, &ds, &out)?;
    let fusions = cfg
        .fusion
        .iter()
        .enumerate()
        .map(|(i, f)| fuse_one(i, f, &results, &ds, &folds, &out))
        .collect::<CliResult<Vec<_>>>()?;
    let summary = RunSummary {
        stats,
        folds: cfg.folds,
        features: features
            .iter()
            .map(|f| FeatureSummary { descriptor: f.descriptor.clone(), dim: f.dim() })
            .collect(),
        classifiers: results.into_iter().map(|r| r.entry).collect(),
        fusions,
    };
    out.json("report.json", "run", "summary", &summary)?;
    Ok(summary)
}

