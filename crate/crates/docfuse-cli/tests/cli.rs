//! End-to-end tests driving the `docfuse` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn docfuse() -> Command {
    Command::new(env!("CARGO_BIN_EXE_docfuse"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn docfuse");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn synth(dir: &Path, n: usize, mode: &str, seed: u64) -> PathBuf {
    run_ok(docfuse().args([
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--n",
        &n.to_string(),
        "--mode",
        mode,
        "--seed",
        &seed.to_string(),
        "--train-fraction",
        "0.75",
    ]));
    dir.join("manifest.csv")
}

/// Small text-model settings shared by the training tests.
fn tiny_text_sets() -> Vec<String> {
    [
        "embed.dim=12",
        "embed.buckets=1000",
        "text.max_len=48",
        "text.depth=1",
        "text.channels=8",
        "text.window=3",
        "text.feature_dim=8",
        "text.dropout=0.1",
        "train.batch=12",
        "train.lr=0.05",
        "train.epochs=12",
    ]
    .iter()
    .flat_map(|kv| ["--set".to_string(), kv.to_string()])
    .collect()
}

fn tiny_fusion_sets() -> Vec<String> {
    let mut sets = tiny_text_sets();
    for kv in [
        "vision.preset=micro",
        "vision.input_size=32",
        "vision.feature_dim=8",
        "fusion.hidden_width=8",
        "fusion.hidden_layers=1",
        "fusion.dropout=0.1",
    ] {
        sets.push("--set".to_string());
        sets.push(kv.to_string());
    }
    sets
}

#[test]
fn train_same_seed_gives_byte_identical_checkpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 24, "aligned", 9);
    for run in ["a", "b"] {
        let mut cmd = docfuse();
        cmd.args([
            "train",
            "--manifest",
            manifest.to_str().unwrap(),
            "--modality",
            "text",
            "--out",
            tmp.path().join(run).to_str().unwrap(),
            "--seed",
            "13",
        ]);
        cmd.args(tiny_text_sets());
        run_ok(&mut cmd);
    }
    let a = std::fs::read(tmp.path().join("a/model.ckpt")).unwrap();
    let b = std::fs::read(tmp.path().join("b/model.ckpt")).unwrap();
    assert_eq!(a, b, "checkpoints differ across identical runs");
    let ha = std::fs::read(tmp.path().join("a/history.jsonl")).unwrap();
    let hb = std::fs::read(tmp.path().join("b/history.jsonl")).unwrap();
    assert_eq!(ha, hb);
}

#[test]
fn fusion_training_writes_checkpoint_and_decreasing_loss() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 24, "aligned", 10);
    let out = tmp.path().join("fusion");
    let mut cmd = docfuse();
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "fusion",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    cmd.args(tiny_fusion_sets());
    let stdout = String::from_utf8(run_ok(&mut cmd).stdout).unwrap();
    assert!(stdout.trim().ends_with("model.ckpt"));
    assert!(out.join("model.ckpt").is_file());
    let history = std::fs::read_to_string(out.join("history.jsonl")).unwrap();
    let records: Vec<serde_json::Value> = history
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let first = records.first().unwrap()["loss"].as_f64().unwrap();
    let last = records.last().unwrap()["loss"].as_f64().unwrap();
    assert!(last < first, "loss did not decrease: {first} -> {last}");
}

#[test]
fn eval_report_is_valid_and_oracle_dominates() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 24, "aligned", 11);
    // An easily separable task: the image model reaches perfect accuracy.
    let img_out = tmp.path().join("img");
    run_ok(docfuse().args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "image",
        "--out",
        img_out.to_str().unwrap(),
        "--seed",
        "4",
        "--set",
        "vision.preset=micro",
        "--set",
        "vision.input_size=32",
        "--set",
        "train.batch=12",
        "--set",
        "train.lr=0.05",
        "--set",
        "train.epochs=25",
    ]));
    let txt_out = tmp.path().join("txt");
    let mut cmd = docfuse();
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "text",
        "--out",
        txt_out.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    cmd.args(tiny_text_sets());
    run_ok(&mut cmd);

    let report_path = tmp.path().join("report.json");
    let csv_path = tmp.path().join("confusion.csv");
    run_ok(docfuse().args([
        "eval",
        "--model",
        img_out.join("model.ckpt").to_str().unwrap(),
        "--model",
        txt_out.join("model.ckpt").to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--split",
        "train",
        "--report",
        report_path.to_str().unwrap(),
        "--confusion-csv",
        csv_path.to_str().unwrap(),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let models = report["models"].as_array().unwrap();
    assert_eq!(models.len(), 2);
    let oa0 = models[0]["overall_accuracy"].as_f64().unwrap();
    let oa1 = models[1]["overall_accuracy"].as_f64().unwrap();
    let oracle = report["oracle_accuracy"].as_f64().unwrap();
    assert_eq!(oa0, 1.0, "image model should be perfect on the train split");
    assert!(oracle >= oa0.max(oa1));
    assert!(report["config"]["seed"].is_string() || report["config"]["seed"].is_null() == false);
    assert_eq!(report["label_names"].as_array().unwrap().len(), 2);
    // all-provenance: the effective config is embedded
    assert_eq!(report["config"]["vision.preset"], "micro");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("label,"));
}

#[test]
fn predict_is_deterministic_and_probabilities_sum_to_one() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 24, "aligned", 12);
    let out = tmp.path().join("model");
    let mut cmd = docfuse();
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "text",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "6",
    ]);
    cmd.args(tiny_text_sets());
    run_ok(&mut cmd);

    let text_file = tmp.path().join("data/texts/s00000.txt");
    let run_predict = || {
        run_ok(docfuse().args([
            "predict",
            "--model",
            out.join("model.ckpt").to_str().unwrap(),
            "--text",
            text_file.to_str().unwrap(),
        ]))
        .stdout
    };
    let out1 = run_predict();
    let out2 = run_predict();
    assert_eq!(out1, out2, "identical invocations must print identical output");
    let text = String::from_utf8(out1).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("predicted\t"));
    let sum: f64 = lines
        .map(|l| l.split('\t').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((sum - 1.0).abs() < 1e-6, "probabilities sum to {sum}");
}

#[test]
fn usage_errors_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 16, "aligned", 13);

    // unknown modality: clap rejects the value
    let out = docfuse()
        .args([
            "train",
            "--manifest",
            manifest.to_str().unwrap(),
            "--modality",
            "audio",
            "--out",
            tmp.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // too few bench iterations: config error
    let out = docfuse()
        .args([
            "bench",
            "--model",
            "missing.ckpt",
            "--manifest",
            manifest.to_str().unwrap(),
            "--iterations",
            "5",
        ])
        .output()
        .unwrap();
    assert_ne!(out.status.code(), Some(0));

    // runtime failure (missing file) exits 1
    let out = docfuse()
        .args([
            "eval",
            "--model",
            "missing.ckpt",
            "--manifest",
            manifest.to_str().unwrap(),
            "--report",
            tmp.path().join("r.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fusion_predict_requires_text_or_explicit_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 16, "aligned", 14);
    let out_dir = tmp.path().join("fusion");
    let mut cmd = docfuse();
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "fusion",
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "7",
        "--set",
        "train.epochs=2",
    ]);
    cmd.args(tiny_fusion_sets());
    run_ok(&mut cmd);

    let image = tmp.path().join("data/images/s00001.pgm");
    let out = docfuse()
        .args([
            "predict",
            "--model",
            out_dir.join("model.ckpt").to_str().unwrap(),
            "--image",
            image.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--allow-missing-text"), "{stderr}");

    run_ok(docfuse().args([
        "predict",
        "--model",
        out_dir.join("model.ckpt").to_str().unwrap(),
        "--image",
        image.to_str().unwrap(),
        "--allow-missing-text",
    ]));
}

#[test]
fn synth_rerun_is_byte_identical_and_manifest_validates() {
    let tmp = tempfile::tempdir().unwrap();
    let d1 = tmp.path().join("one");
    let d2 = tmp.path().join("two");
    synth(&d1, 20, "joint", 21);
    synth(&d2, 20, "joint", 21);
    let m1 = std::fs::read(d1.join("manifest.csv")).unwrap();
    let m2 = std::fs::read(d2.join("manifest.csv")).unwrap();
    assert_eq!(m1, m2);
    for i in 0..20 {
        let rel = format!("images/s{i:05}.pgm");
        assert_eq!(
            std::fs::read(d1.join(&rel)).unwrap(),
            std::fs::read(d2.join(&rel)).unwrap(),
            "{rel}"
        );
    }
    // the generated manifest passes validation on load
    docfuse_cli::manifest::load_manifest(&d1.join("manifest.csv")).unwrap();
}

#[test]
fn config_file_via_env_var_is_honored() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 16, "aligned", 15);
    let config_path = tmp.path().join("run.conf");
    let mut config = String::from("train.epochs = 3\ntrain.batch = 8\ntrain.lr = 0.02\n");
    for kv in [
        "embed.dim = 12",
        "embed.buckets = 1000",
        "text.max_len = 48",
        "text.depth = 1",
        "text.channels = 8",
        "text.window = 3",
        "text.feature_dim = 8",
    ] {
        config.push_str(kv);
        config.push('\n');
    }
    std::fs::write(&config_path, config).unwrap();
    let out_dir = tmp.path().join("run");
    let mut cmd = docfuse();
    cmd.env("DOCFUSE_CONFIG", &config_path);
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "text",
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "8",
    ]);
    run_ok(&mut cmd);
    let history = std::fs::read_to_string(out_dir.join("history.jsonl")).unwrap();
    assert_eq!(history.lines().count(), 3, "config epochs not honored");
}

#[test]
fn export_branch_yields_loadable_standalone_checkpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 16, "aligned", 16);
    let out_dir = tmp.path().join("fusion");
    let mut cmd = docfuse();
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "fusion",
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "9",
        "--set",
        "train.epochs=2",
    ]);
    cmd.args(tiny_fusion_sets());
    run_ok(&mut cmd);

    for (branch, kind) in [("text", "text_cnn"), ("image", "vision")] {
        let branch_path = tmp.path().join(format!("{branch}.ckpt"));
        run_ok(docfuse().args([
            "export-branch",
            "--model",
            out_dir.join("model.ckpt").to_str().unwrap(),
            "--branch",
            branch,
            "--out",
            branch_path.to_str().unwrap(),
        ]));
        let ckpt = docfuse_cli::checkpoint::read_checkpoint(&branch_path).unwrap();
        assert_eq!(ckpt.kind.as_str(), kind);
    }
}

#[test]
fn bench_report_stage_sum_tracks_total() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 16, "aligned", 17);
    let out_dir = tmp.path().join("model");
    let mut cmd = docfuse();
    cmd.args([
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--modality",
        "text",
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "10",
        "--set",
        "train.epochs=2",
    ]);
    cmd.args(tiny_text_sets());
    run_ok(&mut cmd);

    let bench_path = tmp.path().join("bench.json");
    run_ok(docfuse().args([
        "bench",
        "--model",
        out_dir.join("model.ckpt").to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--iterations",
        "15",
        "--out",
        bench_path.to_str().unwrap(),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&bench_path).unwrap()).unwrap();
    let total = report["total"]["mean_ms"].as_f64().unwrap();
    let sum = report["stage_mean_sum_ms"].as_f64().unwrap();
    assert!(total > 0.0);
    assert!(
        (sum - total).abs() <= 0.05 * total,
        "stage sum {sum} vs total {total}"
    );
    assert!(report["ocr_ms"].is_null());
    // image stages are zero for a text model
    assert_eq!(report["stages"]["image_forward"]["mean_ms"].as_f64(), Some(0.0));
}
