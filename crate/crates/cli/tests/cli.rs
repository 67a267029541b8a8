use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use relex_core::corpus::{synth, write_corpus};
use relex_core::induction::parse_theory;

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn relex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relex"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn learn_on_planted_corpus_writes_one_rule() {
    let d = dir("cli-learn");
    let corpus = d.join("planted.jsonl");
    fs::write(&corpus, write_corpus(&synth::planted_corpus(0))).unwrap();
    let out = relex(&["learn", "--corpus", corpus.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = parse_theory(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(t.len(), 1);
}

#[test]
fn missing_input_is_a_config_error() {
    let out = relex(&["stats", "--corpus", "/nonexistent/corpus.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("relex: "));
}

#[test]
fn malformed_corpus_is_a_data_error() {
    let d = dir("cli-bad");
    let corpus = d.join("bad.jsonl");
    fs::write(&corpus, "{\"id\": 3}\n").unwrap();
    let out = relex(&["stats", "--corpus", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_parameter_is_a_config_error() {
    let d = dir("cli-param");
    let corpus = d.join("planted.jsonl");
    fs::write(&corpus, write_corpus(&synth::planted_corpus(0))).unwrap();
    for args in [["--noise", "1.5"], ["--evalfn", "entropy"]] {
        let mut all = vec!["learn", "--corpus", corpus.to_str().unwrap()];
        all.extend(args);
        assert_eq!(relex(&all).status.code(), Some(2), "{args:?}");
    }
}
