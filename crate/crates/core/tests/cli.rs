use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/desk_corpus.txt")
}

fn semcom(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semcom"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn one_line_error(o: &Output, kind: &str) {
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error kind={kind} ")), "{err}");
}

#[test]
fn build_kb_writes_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus();
    let out = stdout(&semcom(dir.path(), &["build-kb", "--corpus", c.to_str().unwrap(), "--kb", "kb.txt", "--theta", "0.4"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("theta,kb_size,index_bits,objective"));
    assert!(lines.next().unwrap().starts_with("0.4,"));
    assert!(dir.path().join("kb.txt").exists());
}

#[test]
fn baseline_eval_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus();
    let out = stdout(&semcom(
        dir.path(),
        &[
            "baseline-eval",
            "--corpus",
            c.to_str().unwrap(),
            "--snr-grid=-3,0,6",
            "--seed",
            "1,2",
            "--channel",
            "rayleigh",
            "--max-sentences",
            "5",
        ],
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("method,channel,snr_db,bleu_1"));
    assert_eq!(lines.len(), 1 + 3 * 2 * 4);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("rayleigh")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus();
    fs::write(
        dir.path().join("run.cfg"),
        format!("corpus = {}\nsnr_grid = 0, 10\nseeds = 3\nmax_sentences = 4\n", c.display()),
    )
    .unwrap();
    let out = stdout(&semcom(dir.path(), &["baseline-eval", "--config", "run.cfg", "--snr-grid", "5"]));
    assert_eq!(out.lines().count(), 1 + 4);
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(2) == Some("5")));
}

#[test]
fn eval_with_ablation_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus();
    let c = c.to_str().unwrap();
    stdout(&semcom(dir.path(), &["build-kb", "--corpus", c, "--kb", "kb.txt"]));
    stdout(&semcom(dir.path(), &["train", "--corpus", c, "--kb", "kb.txt", "--model", "kb.ckpt", "--epochs", "1", "--out", "loss.csv"]));
    stdout(&semcom(dir.path(), &["train", "--corpus", c, "--no-kb", "--model", "nokb.ckpt", "--epochs", "1"]));
    let loss = fs::read_to_string(dir.path().join("loss.csv")).unwrap();
    assert_eq!(loss.lines().count(), 2);
    stdout(&semcom(
        dir.path(),
        &[
            "eval",
            "--corpus",
            c,
            "--kb",
            "kb.txt",
            "--model",
            "kb.ckpt",
            "--ablation-model",
            "nokb.ckpt",
            "--snr-grid",
            "0,6",
            "--max-sentences",
            "6",
            "--out",
            "eval.csv",
        ],
    ));
    let csv = fs::read_to_string(dir.path().join("eval.csv")).unwrap();
    let methods: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["kb", "kb", "no-kb", "no-kb"]);
    // identical symbol budgets
    let symbols: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(8).unwrap()).collect();
    assert!(symbols.iter().all(|s| *s == symbols[0]));
}

#[test]
fn errors_are_one_line_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus();
    let c = c.to_str().unwrap();
    one_line_error(&semcom(dir.path(), &["eval", "--corpus", c]), "missing");
    one_line_error(&semcom(dir.path(), &["eval", "--corpus", c, "--model", "absent.ckpt"]), "neural");
    one_line_error(&semcom(dir.path(), &["baseline-eval", "--corpus", "nope.txt"]), "corpus");
    one_line_error(&semcom(dir.path(), &["baseline-eval", "--corpus", c, "--snr-grid", "9,3"]), "config");
    one_line_error(&semcom(dir.path(), &["build-kb", "--corpus", c, "--kb", "k.txt", "--theta", "2"]), "config");
    one_line_error(&semcom(dir.path(), &["baseline-eval", "--corpus", c, "--channel", "fm"]), "config");
    one_line_error(&semcom(dir.path(), &["entropy-report", "--corpus", c, "--kb", "missing.txt"]), "knowledge_base");
}
