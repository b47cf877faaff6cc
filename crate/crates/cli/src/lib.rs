//! Command-line driver: configuration, external feature ingestion, model and
//! report persistence, and the stage subcommands.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
//! failure.

pub mod config;
pub mod error;
pub mod extract;
pub mod model_io;
pub mod pipeline;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use genrefuse_core::dataset::csv_io::{parse_sparse_csv, read_id_table, write_feature_csv, write_score_csv};
use genrefuse_core::dataset::{Manifest, ManifestExample};
use genrefuse_core::eval::evaluate_folds;
use genrefuse_core::fusion::{self, FusionPlan};
use genrefuse_core::learners::{KnnParams, MlknnParams, MlpParams, TreeParams};
use genrefuse_core::persist::{write_atomic, Artifact};
use genrefuse_core::projection::Projector;
use genrefuse_core::resample::{self, ResampleConfig, ResampleMethod};
use genrefuse_core::seed::derive_seed;
use genrefuse_core::text::SparseVector;
use genrefuse_core::{ClassifierSpec, Error, FoldAssignment, LabelMatrix, Matrix, FORMAT_VERSION};
use log::info;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, StageExt};
use crate::extract::ingest_external_features;
use crate::model_io::{load_model, save_model};
use crate::pipeline::{compute_stats, load_manifest, render_stats, Outputs};

#[derive(Debug, Parser)]
#[command(name = "genrefuse", version, about = "Multimodal multi-label movie genre classification")]
pub struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = config::THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print label indicators and the co-occurrence matrix of a manifest.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        /// Also write the statistics as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every configured extractor and write the feature files.
    Extract {
        #[arg(long)]
        config: PathBuf,
    },
    /// Project a sparse TF-IDF file to a dense feature file.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = genrefuse_core::projection::DEFAULT_OUTPUT_DIM)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        /// Base descriptor; defaults to the one recorded in the input.
        #[arg(long)]
        descriptor: Option<String>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Resample a labelled feature set; writes `manifest.json` and `features.csv`.
    Resample {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.25)]
        resize_rate: f64,
        #[arg(long, default_value_t = 5)]
        k_neighbors: usize,
        #[arg(long, default_value_t = 0.5)]
        mltl_threshold: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Train a classifier on all titles of a manifest and save the model.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, conflicts_with = "classifier")]
        learner: Option<LearnerArg>,
        /// TOML file holding one classifier table (`learner = "..."` plus parameters).
        #[arg(long)]
        classifier: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score a feature file with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Fuse two or more score files.
    Fuse {
        #[arg(long = "scores", required = true, num_args = 1..)]
        scores: Vec<PathBuf>,
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long, value_enum)]
        input: InputArg,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Evaluate a score file against a manifest, optionally per fold.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        /// A `folds.json` written by `crossval` or `run`.
        #[arg(long)]
        folds: Option<PathBuf>,
        /// Decision threshold applied to the scores.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Extract and cross-validate every configured feature/classifier pair.
    Crossval {
        #[arg(long)]
        config: PathBuf,
    },
    /// The whole pipeline, fusion included.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Mlsmote,
    Mltl,
    MlsmoteMltl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LearnerArg {
    BrMlp,
    BrDt,
    BrKnn,
    Mlknn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Sum,
    Mean,
    Max,
    Prod,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InputArg {
    Proba,
    Pred,
}

impl From<MethodArg> for ResampleMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mlsmote => ResampleMethod::Mlsmote,
            MethodArg::Mltl => ResampleMethod::Mltl,
            MethodArg::MlsmoteMltl => ResampleMethod::MlsmoteMltl,
        }
    }
}

impl From<LearnerArg> for ClassifierSpec {
    fn from(l: LearnerArg) -> Self {
        match l {
            LearnerArg::BrMlp => ClassifierSpec::BrMlp(MlpParams::default()),
            LearnerArg::BrDt => ClassifierSpec::BrDt(TreeParams::default()),
            LearnerArg::BrKnn => ClassifierSpec::BrKnn(KnnParams::default()),
            LearnerArg::Mlknn => ClassifierSpec::Mlknn(MlknnParams::default()),
        }
    }
}

impl From<RuleArg> for fusion::FusionRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Sum => fusion::FusionRule::Sum,
            RuleArg::Mean => fusion::FusionRule::Mean,
            RuleArg::Max => fusion::FusionRule::Max,
            RuleArg::Prod => fusion::FusionRule::Prod,
        }
    }
}

impl From<InputArg> for fusion::InputKind {
    fn from(i: InputArg) -> Self {
        match i {
            InputArg::Proba => fusion::InputKind::Proba,
            InputArg::Pred => fusion::InputKind::Pred,
        }
    }
}

/// Runs one command; the caller turns the error into an exit code.
pub fn execute(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        // a second call (tests running several commands) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Stats { manifest, output } => stats(&manifest, output.as_deref()),
        Command::Extract { config } => {
            let cfg = RunConfig::load(&config)?;
            let (manifest, _) = load_manifest(&cfg.manifest)?;
            pipeline::extract_all(&cfg, &manifest, &outputs(&cfg)).map(|_| ())
        }
        Command::Project { input, dim, seed, descriptor, output } => {
            project(&input, dim, seed, descriptor.as_deref(), &output)
        }
        Command::Resample {
            manifest,
            features,
            method,
            resize_rate,
            k_neighbors,
            mltl_threshold,
            seed,
            output_dir,
        } => {
            let cfg = ResampleConfig { resize_rate, k_neighbors, mltl_threshold, seed };
            resample_cmd(&manifest, &features, method.into(), cfg, &output_dir)
        }
        Command::Train { manifest, features, learner, classifier, seed, output } => {
            let spec = match (learner, classifier) {
                (_, Some(path)) => read_classifier(&path)?,
                (Some(l), None) => l.into(),
                (None, None) => return Err(CliError::config("train needs --learner or --classifier")),
            };
            train_cmd(&manifest, &features, spec, seed, &output)
        }
        Command::Predict { model, features, output } => predict(&model, &features, &output),
        Command::Fuse { scores, rule, input, threshold, output } => {
            fuse_cmd(&scores, rule.into(), input.into(), threshold, &output)
        }
        Command::Evaluate { manifest, scores, folds, threshold, output } => {
            evaluate_cmd(&manifest, &scores, folds.as_deref(), threshold, &output)
        }
        Command::Crossval { config } => {
            let cfg = RunConfig::load(&config)?;
            let (manifest, ds) = load_manifest(&cfg.manifest)?;
            let (_, _, results) = pipeline::crossval_all(&cfg, &manifest, &ds, &outputs(&cfg))?;
            for r in &results {
                println!("{}", report_line(&r.entry.id, &r.entry.report));
            }
            Ok(())
        }
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let summary = pipeline::run(&cfg)?;
            for c in &summary.classifiers {
                println!("{}", report_line(&c.id, &c.report));
            }
            for f in &summary.fusions {
                println!("{}  [{}]", report_line(&f.name, &f.report), f.plan.members.join(" + "));
            }
            println!("wrote {}", cfg.output_dir.join("report.json").display());
            Ok(())
        }
    }
}

fn outputs(cfg: &RunConfig) -> Outputs {
    Outputs { dir: cfg.output_dir.clone(), seed: cfg.seed }
}

fn report_line(name: &str, r: &genrefuse_core::EvaluationReport) -> String {
    format!(
        "{name:<32} F-micro {:.3}  F-macro {:.3}  F-samples {:.3}  AUC-PR {:.3}",
        r.fscore_micro, r.fscore_macro, r.fscore_samples, r.auc_pr_macro
    )
}

fn stats(manifest: &Path, output: Option<&Path>) -> CliResult<()> {
    let (_, ds) = load_manifest(manifest)?;
    let s = compute_stats(&ds)?;
    print!("{}", render_stats(&s));
    if let Some(out) = output {
        Artifact::new("stats", "manifest", 0, &s).save(out).stage("stats")?;
    }
    Ok(())
}

fn project(input: &Path, dim: usize, seed: u64, descriptor: Option<&str>, output: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(input).map_err(|e| Error::Io { path: input.to_path_buf(), source: e }).stage("project")?;
    let recorded = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.trim_start_matches('#').trim().strip_prefix("descriptor:").map(|d| d.trim().to_string()));
    let base = descriptor
        .map(str::to_string)
        .or(recorded)
        .ok_or_else(|| CliError::config("input records no descriptor; pass --descriptor"))?;
    let (ids, vectors) = parse_sparse_csv(&text).stage("project")?;
    let sparse: Vec<SparseVector> = vectors.into_iter().map(|entries| SparseVector { entries }).collect();
    let projector = Projector::new(dim, seed).stage("project")?;
    let fm = projector.project_matrix(&base, &sparse);
    let meta = stage_meta("project", seed);
    write_feature_csv(output, &ids, &fm, &meta).stage("project")?;
    info!("projected {} vectors to {}", ids.len(), fm.descriptor);
    Ok(())
}

fn stage_meta(stage: &str, seed: u64) -> Vec<(&'static str, String)> {
    vec![
        ("stage", stage.to_string()),
        ("seed", seed.to_string()),
        ("format_version", FORMAT_VERSION.to_string()),
    ]
}

/// Loads a manifest and a feature file aligned to it.
fn labelled_features(
    manifest: &Path,
    features: &Path,
) -> CliResult<(Manifest, genrefuse_core::MultiLabelDataset)> {
    let (m, ds) = load_manifest(manifest)?;
    let fallback = features.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let fm = ingest_external_features(features, &m, &read_descriptor(features).unwrap_or(fallback)).stage("features")?;
    let ds = ds.with_features(fm).stage("features")?;
    Ok((m, ds))
}

fn read_descriptor(path: &Path) -> Option<String> {
    read_id_table(path).ok()?.descriptor().map(str::to_string)
}

fn resample_cmd(
    manifest: &Path,
    features: &Path,
    method: ResampleMethod,
    cfg: ResampleConfig,
    out_dir: &Path,
) -> CliResult<()> {
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    let (_, ds) = labelled_features(manifest, features)?;
    let before = ds.len();
    let out = resample::apply(method, &ds, &cfg).stage("resample")?;
    let names = out.label_space().names();
    let examples = out
        .ids()
        .iter()
        .zip(out.labels().iter_rows())
        .map(|(id, row)| ManifestExample {
            id: id.clone(),
            labels: row.iter().zip(names).filter(|(&b, _)| b).map(|(_, n)| n.clone()).collect(),
            frames_dir: None,
            audio_wav: None,
            poster: None,
            subtitle_srt: None,
            synopsis_txt: None,
        })
        .collect();
    let m = Manifest { label_space: names.to_vec(), examples, base_dir: PathBuf::new() };
    let mut json = serde_json::to_string_pretty(&m)
        .map_err(|e| Error::Malformed { what: "manifest", detail: e.to_string() })
        .stage("resample")?;
    json.push('\n');
    write_atomic(out_dir.join("manifest.json"), json.as_bytes()).stage("resample")?;
    let fm = out.require_features().stage("resample")?;
    write_feature_csv(out_dir.join("features.csv"), out.ids(), fm, &stage_meta("resample", cfg.seed)).stage("resample")?;
    println!("{before} -> {} examples", out.len());
    Ok(())
}

fn read_classifier(path: &Path) -> CliResult<ClassifierSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let spec: ClassifierSpec = toml::from_str(&text).map_err(|e| CliError::config(e.to_string()))?;
    spec.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(spec)
}

fn train_cmd(manifest: &Path, features: &Path, spec: ClassifierSpec, seed: u64, output: &Path) -> CliResult<()> {
    let (_, ds) = labelled_features(manifest, features)?;
    let descriptor = ds.require_features().stage("train")?.descriptor.clone();
    let model = genrefuse_core::learners::train(&spec.with_seed(derive_seed(seed, "train")), &ds).stage("train")?;
    save_model(output, &model, &descriptor, seed).stage("train")
}

fn predict(model: &Path, features: &Path, output: &Path) -> CliResult<()> {
    let art = load_model(model).stage("predict")?;
    let table = read_id_table(features).stage("predict")?;
    let clf = &art.payload;
    if table.data.cols() != clf.input_dim() {
        return Err(Error::Shape(format!(
            "model expects {} features, file has {}",
            clf.input_dim(),
            table.data.cols()
        )))
        .stage("predict");
    }
    let scores = clf.predict_scores(&table.data).stage("predict")?;
    let mut meta = vec![("descriptor", art.descriptor.clone())];
    meta.extend(stage_meta("predict", art.seed));
    write_score_csv(output, &table.ids, clf.label_space().names(), &scores, &meta).stage("predict")
}

fn fuse_cmd(
    scores: &[PathBuf],
    rule: fusion::FusionRule,
    input: fusion::InputKind,
    threshold: Option<f64>,
    output: &Path,
) -> CliResult<()> {
    let tables = scores
        .iter()
        .map(|p| read_id_table(p).stage("fusion"))
        .collect::<CliResult<Vec<_>>>()?;
    let first = &tables[0];
    let mut aligned: Vec<Matrix> = Vec::with_capacity(tables.len());
    for (t, p) in tables.iter().zip(scores) {
        if t.columns != first.columns {
            return Err(CliError::config(format!("{}: label columns differ from {}", p.display(), scores[0].display())));
        }
        aligned.push(t.align_to(&first.ids).stage("fusion")?);
    }
    let names: Vec<String> = tables
        .iter()
        .zip(scores)
        .map(|(t, p)| t.descriptor().map(str::to_string).unwrap_or_else(|| p.display().to_string()))
        .collect();
    let mut plan = FusionPlan::new(rule, input, names);
    if let Some(t) = threshold {
        plan = plan.with_threshold(t);
    }
    plan.validate().map_err(|e| CliError::config(e.to_string()))?;
    let refs: Vec<&Matrix> = aligned.iter().collect();
    let (fused, preds) = fusion::fuse_plan(&plan, &refs).stage("fusion")?;
    let mut meta = vec![("descriptor", plan.label()), ("members", plan.members.join(" "))];
    meta.push(("threshold", plan.threshold.to_string()));
    meta.extend(stage_meta("fusion", 0));
    write_score_csv(output, &first.ids, &first.columns, &fused, &meta).stage("fusion")?;
    let positives: usize = preds.iter_rows().map(|r| r.iter().filter(|&&b| b).count()).sum();
    println!("{}: {} titles, {positives} labels assigned", plan.label(), first.ids.len());
    Ok(())
}

fn evaluate_cmd(manifest: &Path, scores: &Path, folds: Option<&Path>, threshold: f64, output: &Path) -> CliResult<()> {
    let (_, ds) = load_manifest(manifest)?;
    let table = read_id_table(scores).stage("evaluate")?;
    if table.columns != ds.label_space().names() {
        return Err(CliError::config("score columns do not match the manifest label space"));
    }
    let s = table.align_to(ds.ids()).stage("evaluate")?;
    let folds = match folds {
        Some(p) => Artifact::<FoldAssignment>::load(p).stage("evaluate")?.payload,
        None => FoldAssignment { k: 1, fold_of: vec![0; ds.len()], seed: 0 },
    };
    let preds = LabelMatrix::from_scores(&s, threshold);
    let name = table.descriptor().unwrap_or("scores").to_string();
    let report = evaluate_folds(&name, ds.labels(), ds.label_space(), &folds, &s, &preds).stage("evaluate")?;
    println!("{}", report_line(&name, &report));
    Artifact::new("evaluate", &name, folds.seed, &report).save(output).stage("evaluate")
}

