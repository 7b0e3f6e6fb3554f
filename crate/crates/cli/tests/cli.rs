use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use valuekit_core::curation::io::{read_samples, write_samples};
use valuekit_core::{AnnotatedSample, Scenario, ValueDimension};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_valuekit"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    if !out.status.success() {
        eprintln!("stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn corpus(n: usize) -> Vec<AnnotatedSample> {
    let markers = ["against", "neutrally", "supports"];
    let dims = [ValueDimension::Benevolence, ValueDimension::Power, ValueDimension::Tradition];
    (0..n)
        .map(|i| {
            let label = (i % 3) as i8 - 1;
            let dim = dims[(i / 3) % dims.len()];
            let text = format!("person {i} {} the cause number {}", markers[i % 3], i % 7);
            AnnotatedSample::new(Scenario::new(format!("c{i}"), text).unwrap(), dim, label, 4).unwrap()
        })
        .collect()
}

#[test]
fn kappa_all_agree_prints_one() {
    let out = run(&["curate", "kappa", "--input", p(&fixture("all_agree.jsonl"))]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1.0000\n");
}

#[test]
fn aggregate_reports_tie() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("samples.jsonl");
    let out = run(&["curate", "aggregate", "--input", p(&fixture("annotations.jsonl")), "--output", p(&output)]);
    assert!(out.status.success());
    let dropped = std::fs::read_to_string(dir.path().join("samples.jsonl.dropped.tsv")).unwrap();
    let rows: Vec<&str> = dropped.lines().skip(1).collect();
    assert_eq!(rows, ["s2\tTRA\tyes,yes,no,no\t2\ttie"]);
    assert_eq!(read_samples(&output).unwrap().len(), 2);
    assert!(dir.path().join("samples.jsonl.meta.json").exists());
}

#[test]
fn empty_score_input_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "\n \n").unwrap();
    let output = dir.path().join("scores.tsv");
    let out = run(&["score", "--model", "unused.vkm", "--input", p(&empty), "--output", p(&output)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!output.exists());
}

#[test]
fn data_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"scenario_id\":\"x\"}\n").unwrap();
    let out = run(&["curate", "kappa", "--input", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.jsonl:1"), "{msg}");
}

#[test]
fn split_train_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let all = d.join("all.jsonl");
    write_samples(&all, &corpus(300)).unwrap();

    let out = run(&["--seed", "5", "curate", "split", "--input", p(&all), "--out-dir", p(&d.join("split"))]);
    assert!(out.status.success());
    let printed = String::from_utf8(out.stdout).unwrap();
    let counts: Vec<usize> = printed.trim().split(" / ").map(|s| s.parse().unwrap()).collect();
    assert_eq!(counts.iter().sum::<usize>(), 300);

    let model_a = d.join("a.vkm");
    let model_b = d.join("b.vkm");
    for m in [&model_a, &model_b] {
        let out = run(&[
            "--seed", "5", "train",
            "--train", p(&d.join("split/train.jsonl")),
            "--valid", p(&d.join("split/valid.jsonl")),
            "--output", p(m),
            "--hash-dim", "4096", "--embed-dim", "8", "--epochs", "10",
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&model_a).unwrap(), std::fs::read(&model_b).unwrap());
    let loss = std::fs::read_to_string(d.join("a.vkm.loss.tsv")).unwrap();
    assert_eq!(loss.lines().count(), 11);

    let report = d.join("report.txt");
    let out = run(&["eval", "--model", p(&model_a), "--input", p(&d.join("split/test.jsonl")), "--output", p(&report)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("F1(-1)\tF1(0)\tF1(1)\tP(-1)\tP(0)\tP(1)\tR(-1)\tR(0)\tR(1)\tAcc.\tMSE\n"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.txt.json")).unwrap()).unwrap();
    assert!(json["accuracy"].as_f64().unwrap() >= 0.9);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("report.txt.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 0);
    assert_eq!(meta["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn score_profile_reward_rerank() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let all = d.join("all.jsonl");
    write_samples(&all, &corpus(90)).unwrap();
    let model = d.join("m.vkm");
    assert!(run(&["train", "--train", p(&all), "--output", p(&model), "--hash-dim", "1024", "--embed-dim", "4", "--epochs", "3"])
        .status
        .success());

    let texts = d.join("texts.txt");
    std::fs::write(&texts, "I miss mom\nwe won\n").unwrap();
    let scores = d.join("scores.tsv");
    let mut child = bin()
        .args(["score", "--model", p(&model), "--output", p(&scores)])
        .stdin(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b"I miss mom\nwe won\n").unwrap();
    assert!(child.wait().unwrap().success());
    let tsv = std::fs::read_to_string(&scores).unwrap();
    assert_eq!(tsv.lines().count(), 3);
    assert!(tsv.starts_with("ACH\tBEN\tCON\tHED\tPOW\tSEC\tSD\tSTI\tTRA\tUNI\ttext\n"));

    let prof = d.join("profile.tsv");
    assert!(run(&["profile", "--model", p(&model), "--input", p(&texts), "--output", p(&prof)]).status.success());
    assert_eq!(std::fs::read_to_string(d.join("profile.tsv.radar.tsv")).unwrap().lines().count(), 11);

    let trace = d.join("trace.tsv");
    let out = run(&[
        "reward", "--model", p(&model), "--persona", p(&texts), "--utterances", p(&texts),
        "--clamp-terms", "--output", p(&trace),
    ]);
    assert!(out.status.success());
    let r: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(r.is_finite());
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("turn\tutterance\tr\tm\tgamma\tterm\tnotes\n"));

    let ranked = d.join("ranked.tsv");
    assert!(run(&[
        "rerank", "--model", p(&model), "--persona", p(&texts), "--candidates", p(&texts), "--output", p(&ranked),
    ])
    .status
    .success());
    assert_eq!(std::fs::read_to_string(&ranked).unwrap().lines().count(), 3);
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let all = d.join("all.jsonl");
    write_samples(&all, &corpus(30)).unwrap();
    let cfg = d.join("cfg.toml");
    std::fs::write(&cfg, "seed = 9\n[train]\nepochs = 2\nhash_dim = 512\nembed_dim = 4\n").unwrap();
    let model = d.join("m.vkm");
    assert!(run(&["--config", p(&cfg), "train", "--train", p(&all), "--output", p(&model), "--epochs", "4"])
        .status
        .success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("m.vkm.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 9);
    assert_eq!(meta["params"]["train"]["epochs"], 4);
    assert_eq!(meta["params"]["model"]["hash_dim"], 512);

    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = run(&["--config", p(&cfg), "curate", "kappa", "--input", p(&fixture("all_agree.jsonl"))]);
    assert_eq!(out.status.code(), Some(2));
}
