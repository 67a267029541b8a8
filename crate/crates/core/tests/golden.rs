//! Fact files generated from the committed fixtures must match the committed
//! golden files byte for byte. Set `RELEX_BLESS=1` to rewrite them.

use std::path::PathBuf;

use relex_core::corpus::{
    emit_bk, load_corpus, load_taxonomy, parse_rules, Thresholds, DEFAULT_RULES,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn check(corpus: &str, taxonomy: Option<&str>, golden: &str) {
    let c = load_corpus(&std::fs::read_to_string(fixture(corpus)).unwrap()).unwrap();
    let tax =
        taxonomy.map(|t| load_taxonomy(&std::fs::read_to_string(fixture(t)).unwrap()).unwrap());
    let rules = parse_rules(DEFAULT_RULES).unwrap();
    let bk = emit_bk(&c, tax.as_ref(), &rules, &Thresholds::default()).unwrap();
    if std::env::var_os("RELEX_BLESS").is_some() {
        std::fs::write(fixture(golden), &bk).unwrap();
    }
    let expected = std::fs::read_to_string(fixture(golden)).unwrap();
    assert_eq!(bk, expected, "{golden} differs");
}

#[test]
fn myron_golden() {
    check("myron.jsonl", Some("news.taxonomy"), "myron.bk");
}

#[test]
fn ppi_small_golden() {
    check("ppi_small.jsonl", None, "ppi_small.bk");
}
