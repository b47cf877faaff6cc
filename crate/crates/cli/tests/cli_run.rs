use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy").join(rel)
}

fn genrefuse(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_genrefuse"));
    cmd.args(args).env("RUST_LOG", "warn").env_remove("GENREFUSE_OUTPUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("GENREFUSE_OUTPUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A config over the shipped fixture with three quick feature sets.
fn small_config(dir: &Path) -> PathBuf {
    let text = format!(
        r#"
manifest = "{manifest}"
seed = 7
folds = 4

[[features]]
kind = "audio_mfcc"

[[features]]
kind = "sub_tfidf"
n = 1

[[features]]
kind = "external"
descriptor = "TRAILER-C3D"
path = "{c3d}"

[[classifiers]]
learner = "mlknn"
k = 5
"#,
        manifest = s(&fixture("manifest.json")),
        c3d = s(&fixture("features/trailer_c3d.csv")),
    );
    let p = dir.join("config.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn stats_prints_and_writes_indicators() {
    let tmp = tempfile::tempdir().unwrap();
    let json = tmp.path().join("stats.json");
    let stdout = ok(&genrefuse(&["stats", "--manifest", s(&fixture("manifest.json")), "--output", s(&json)], None));
    assert!(stdout.contains("titles 20  labels 4"), "{stdout}");
    assert!(stdout.contains("LCard 1.500  LDen 0.375  LDiv 10  PLDiv 0.500"), "{stdout}");
    let v = read_json(&json);
    assert_eq!(v["stage"], "stats");
    assert_eq!(v["payload"]["indicators"]["ldiv"], 10);
    assert_eq!(v["payload"]["cooccurrence"][0][0], 8);
}

#[test]
fn toy_run_fills_every_report_field() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&genrefuse(&["run", "--config", s(&fixture("config.toml"))], Some(tmp.path())));
    let report = read_json(&tmp.path().join("report.json"));
    assert_eq!(report["format_version"], 1);
    assert_eq!(report["stage"], "run");
    let p = &report["payload"];
    assert_eq!(p["folds"], 5);
    assert_eq!(p["features"].as_array().unwrap().len(), 11);
    let classifiers = p["classifiers"].as_array().unwrap();
    assert_eq!(classifiers.len(), 22);
    let fusions = p["fusions"].as_array().unwrap();
    assert_eq!(fusions.len(), 2);
    assert_eq!(fusions[0]["selection"], "TOP-2");
    assert_eq!(fusions[0]["plan"]["members"].as_array().unwrap().len(), 2);
    assert_eq!(fusions[1]["selection"], "BEST-ON-DATA");
    assert_eq!(fusions[1]["plan"]["members"].as_array().unwrap().len(), 5);

    let reports = classifiers.iter().map(|c| &c["report"]).chain(fusions.iter().map(|f| &f["report"]));
    for r in reports {
        for key in ["fscore_micro", "fscore_macro", "fscore_samples", "auc_pr_macro"] {
            let v = r[key].as_f64().unwrap_or_else(|| panic!("{} lacks {key}", r["name"]));
            assert!((0.0..=1.0).contains(&v), "{} {key} = {v}", r["name"]);
        }
        assert_eq!(r["per_fold"].as_array().unwrap().len(), 5);
        assert_eq!(r["recall_per_label"].as_array().unwrap().len(), 4);
    }
    for rel in ["stats.json", "folds.json", "scores/SYN-LSTM__MLkNN.csv", "models/AUDIO-MFCC__BR_MLP.json"] {
        assert!(tmp.path().join(rel).is_file(), "missing {rel}");
    }
}

#[test]
fn bad_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "manifest = \"m.json\"\nseed = 1\nfolds = 1\n").unwrap();
    let out = genrefuse(&["run", "--config", s(&cfg)], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&cfg, "manifest = \"m.json\"\nseed = 1\ncolour = \"red\"\n").unwrap();
    let out = genrefuse(&["run", "--config", s(&cfg)], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_data_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = genrefuse(&["stats", "--manifest", s(&tmp.path().join("nope.json"))], None);
    assert_eq!(out.status.code(), Some(3));

    let csv = tmp.path().join("short.csv");
    std::fs::write(&csv, "id,f0\nt01,1\n").unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!(
            "manifest = \"{}\"\nseed = 1\n[[features]]\nkind = \"external\"\ndescriptor = \"X\"\npath = \"{}\"\n[[classifiers]]\nlearner = \"mlknn\"\n",
            s(&fixture("manifest.json")),
            s(&csv)
        ),
    )
    .unwrap();
    let out = genrefuse(&["extract", "--config", s(&cfg)], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t02"));
}

#[test]
fn non_finite_features_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csv = String::from("id,f0\n");
    for i in 1..=20 {
        csv.push_str(&format!("t{i:02},{}\n", if i == 5 { "NaN" } else { "0.5" }));
    }
    let path = tmp.path().join("nan.csv");
    std::fs::write(&path, csv).unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!(
            "manifest = \"{}\"\nseed = 1\n[[features]]\nkind = \"external\"\ndescriptor = \"X\"\npath = \"{}\"\n[[classifiers]]\nlearner = \"mlknn\"\n",
            s(&fixture("manifest.json")),
            s(&path)
        ),
    )
    .unwrap();
    let out = genrefuse(&["extract", "--config", s(&cfg)], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn stage_commands_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = dir.join("out");
    let manifest = fixture("manifest.json");
    ok(&genrefuse(&["extract", "--config", s(&small_config(dir))], Some(&out)));
    let mfcc = out.join("features/AUDIO-MFCC.csv");
    assert!(mfcc.is_file());
    // external inputs are read in place, not copied
    assert!(!out.join("features/TRAILER-C3D.csv").exists());
    let c3d = fixture("features/trailer_c3d.csv");

    // re-projecting the sparse TF-IDF with the recorded seed reproduces the extracted file's values
    let sparse = out.join("text/SUB-TFIDF-1.sparse.csv");
    let text_model = read_json(&out.join("text/SUB-TFIDF-1-CS128.json"));
    let seed = text_model["payload"]["projector"]["seed"].as_u64().unwrap().to_string();
    let projected = dir.join("projected.csv");
    ok(&genrefuse(
        &["project", "--input", s(&sparse), "--seed", &seed, "--dim", "128", "--output", s(&projected)],
        None,
    ));
    let data_rows = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
    };
    assert_eq!(data_rows(&projected), data_rows(&out.join("features/SUB-TFIDF-1-CS128.csv")));

    let mut score_files = vec![];
    for (features, learner) in [(&mfcc, "mlknn"), (&c3d, "br-knn")] {
        let model = dir.join(format!("{learner}.json"));
        ok(&genrefuse(
            &["train", "--manifest", s(&manifest), "--features", s(features), "--learner", learner, "--seed", "3", "--output", s(&model)],
            None,
        ));
        let scores = dir.join(format!("{learner}.scores.csv"));
        ok(&genrefuse(&["predict", "--model", s(&model), "--features", s(features), "--output", s(&scores)], None));
        score_files.push(scores);
    }
    let fused = dir.join("fused.csv");
    ok(&genrefuse(
        &[
            "fuse", "--scores", s(&score_files[0]), s(&score_files[1]), "--rule", "mean", "--input", "proba", "--output",
            s(&fused),
        ],
        None,
    ));
    let report = dir.join("eval.json");
    let line = ok(&genrefuse(
        &["evaluate", "--manifest", s(&manifest), "--scores", s(&fused), "--output", s(&report)],
        None,
    ));
    assert!(!line.trim().is_empty());
    let micro = read_json(&report)["payload"]["fscore_micro"].as_f64().unwrap();
    assert!(micro > 0.5, "training-set F of the fused scores is {micro}");

    let resampled = dir.join("resampled");
    ok(&genrefuse(
        &[
            "resample", "--manifest", s(&manifest), "--features", s(&c3d), "--method", "mlsmote-mltl", "--seed", "5",
            "--output-dir", s(&resampled),
        ],
        None,
    ));
    let m = read_json(&resampled.join("manifest.json"));
    assert!(!m["examples"].as_array().unwrap().is_empty());
    assert!(resampled.join("features.csv").is_file());
}
