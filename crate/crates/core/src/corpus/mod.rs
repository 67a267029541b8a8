//! Pre-parsed corpus ingestion, the graph sentence model, entity-oriented
//! graph reduction, background-knowledge emission and example generation.
//!
//! Corpus files are JSON Lines: one document object per line. See
//! `schema/corpus.schema.json` at the repository root for the field list.

mod bk;
mod examples;
mod graph;
mod reduce;
pub mod synth;
mod taxonomy;

pub use bk::{emit_bk, emit_intentional_bk, token_features, BkError, Thresholds, TokenFeatures};
pub use examples::{candidates, corpus_stats, generate_examples, Candidate, CorpusStats, Examples};
pub use graph::{build_graph, DepEdge, SentenceGraph};
pub use reduce::{parse_rules, reduce_graph, Action, ReductionRule, RuleError, DEFAULT_RULES};
pub use taxonomy::{load_taxonomy, Taxonomy, TaxonomyError};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chunks: Vec<Chunk>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dependencies: Vec<DependencyEdge>,
    /// Root token of the dependency tree; derived when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entities: Vec<EntityMention>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationInstance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub id: String,
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    pub char_start: usize,
    pub char_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkType {
    Np,
    Vp,
    Pp,
}

impl ChunkType {
    pub fn as_str(self) -> &'static str {
        match self {
            ChunkType::Np => "np",
            ChunkType::Vp => "vp",
            ChunkType::Pp => "pp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chunk {
    pub id: String,
    #[serde(rename = "type")]
    pub chunk_type: ChunkType,
    pub token_ids: Vec<String>,
    /// Rightmost token; filled in by the loader when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_token: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyEdge {
    pub label: String,
    pub governor: String,
    pub dependent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityMention {
    pub id: String,
    pub token_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_token: Option<String>,
    #[serde(rename = "type")]
    pub entity_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtype: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mention_type: Option<String>,
    /// Mentions sharing a reference denote the same entity; pairs of them are
    /// self-interactions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_ref: Option<String>,
}

impl EntityMention {
    pub fn head(&self) -> &str {
        self.head_token
            .as_deref()
            .or(self.token_ids.last().map(String::as_str))
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationInstance {
    #[serde(rename = "type")]
    pub relation: String,
    pub arg1: String,
    pub arg2: String,
    #[serde(default = "yes")]
    pub gold: bool,
}

fn yes() -> bool {
    true
}

impl Sentence {
    pub fn token_index(&self) -> HashMap<&str, usize> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect()
    }
}

impl Corpus {
    pub fn sentences(&self) -> impl Iterator<Item = (&Document, &Sentence)> {
        self.documents
            .iter()
            .flat_map(|d| d.sentences.iter().map(move |s| (d, s)))
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    /// Sub-corpus of the documents at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Corpus {
        Corpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: {path}: {message}")]
    Schema {
        line: usize,
        path: String,
        message: String,
    },
    #[error("line {line}: {path}: {message}")]
    Invalid {
        line: usize,
        path: String,
        message: String,
    },
}

/// Accepted dependency labels: exact labels plus label prefixes such as
/// `prep_` for collapsed prepositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepInventory {
    labels: Vec<String>,
    prefixes: Vec<String>,
}

/// Stanford typed dependencies plus the collapsed `prep_*`, `prepc_*` and
/// `conj_*` families.
pub const DEFAULT_DEP_INVENTORY: &str = "\
root dep aux auxpass cop arg agent comp acomp ccomp xcomp complm obj dobj iobj pobj
mark rel subj nsubj nsubjpass csubj csubjpass cc conj expl mod abbrev amod appos
advcl purpcl det predet preconj infmod mwe partmod advmod neg rcmod quantmod nn
npadvmod tmod num number prep poss possessive prt parataxis punct ref sdep xsubj
pcomp discourse goeswith vmod
prep_* prepc_* conj_*
";

impl DepInventory {
    /// Whitespace-separated labels; a trailing `*` marks a prefix.
    /// `%` starts a comment.
    pub fn parse(text: &str) -> DepInventory {
        let mut labels = Vec::new();
        let mut prefixes = Vec::new();
        for line in text.lines() {
            let line = line.split('%').next().unwrap_or_default();
            for word in line.split_whitespace() {
                match word.strip_suffix('*') {
                    Some(p) => prefixes.push(p.to_string()),
                    None => labels.push(word.to_string()),
                }
            }
        }
        DepInventory { labels, prefixes }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
            || self
                .prefixes
                .iter()
                .any(|p| label.len() > p.len() && label.starts_with(p.as_str()))
    }
}

impl Default for DepInventory {
    fn default() -> Self {
        DepInventory::parse(DEFAULT_DEP_INVENTORY)
    }
}

struct Path(Vec<String>);

impl Path {
    fn at(&self, field: impl fmt::Display) -> String {
        let mut s = self.0.join(".");
        if !s.is_empty() {
            s.push('.');
        }
        s.push_str(&field.to_string());
        s
    }
}

/// Parse and validate a JSON Lines corpus with the default dependency inventory.
pub fn load_corpus(text: &str) -> Result<Corpus, CorpusError> {
    load_corpus_with(text, &DepInventory::default())
}

pub fn load_corpus_with(text: &str, deps: &DepInventory) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    let mut seen = Seen::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(line);
        let mut doc: Document =
            serde_path_to_error::deserialize(de).map_err(|e| CorpusError::Schema {
                line: line_no,
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        validate_document(&mut doc, line_no, deps, &mut seen)?;
        corpus.documents.push(doc);
    }
    Ok(corpus)
}

/// Serialise a corpus back to JSON Lines.
pub fn write_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for d in &corpus.documents {
        out.push_str(&serde_json::to_string(d).expect("corpus serialises"));
        out.push('\n');
    }
    out
}

#[derive(Default)]
struct Seen {
    docs: rustc_hash::FxHashSet<String>,
    sentences: rustc_hash::FxHashSet<String>,
    tokens: rustc_hash::FxHashSet<String>,
    chunks: rustc_hash::FxHashSet<String>,
    entities: rustc_hash::FxHashSet<String>,
}

fn validate_document(
    doc: &mut Document,
    line: usize,
    deps: &DepInventory,
    seen: &mut Seen,
) -> Result<(), CorpusError> {
    let err = |path: String, message: String| CorpusError::Invalid {
        line,
        path,
        message,
    };
    if !seen.docs.insert(doc.id.clone()) {
        return Err(err(
            "id".into(),
            format!("duplicate document id '{}'", doc.id),
        ));
    }
    for (si, s) in doc.sentences.iter_mut().enumerate() {
        let base = Path(vec![format!("sentences[{si}]")]);
        if !seen.sentences.insert(s.id.clone()) {
            return Err(err(
                base.at("id"),
                format!("duplicate sentence id '{}'", s.id),
            ));
        }
        let mut prev_end = 0;
        for (ti, t) in s.tokens.iter().enumerate() {
            let p = base.at(format!("tokens[{ti}]"));
            if !seen.tokens.insert(t.id.clone()) {
                return Err(err(p, format!("duplicate token id '{}'", t.id)));
            }
            if t.char_end < t.char_start {
                return Err(err(p, "char_end precedes char_start".into()));
            }
            if ti > 0 && t.char_start < prev_end {
                return Err(err(
                    p,
                    format!("offsets of '{}' overlap the previous token", t.id),
                ));
            }
            prev_end = t.char_end;
        }
        let index: HashMap<String, usize> = s
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.clone(), i))
            .collect();
        let resolve = |path: String, id: &str| -> Result<usize, CorpusError> {
            index.get(id).copied().ok_or_else(|| {
                err(
                    path,
                    format!("token '{id}' is not a token of sentence '{}'", s.id),
                )
            })
        };
        // spans must be contiguous runs of tokens in sentence order
        let span = |path: String, ids: &[String]| -> Result<Vec<usize>, CorpusError> {
            if ids.is_empty() {
                return Err(err(path, "empty token list".into()));
            }
            let idx = ids
                .iter()
                .enumerate()
                .map(|(k, id)| resolve(format!("{path}[{k}]"), id))
                .collect::<Result<Vec<_>, _>>()?;
            if idx.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(err(path, "tokens are not contiguous and ordered".into()));
            }
            Ok(idx)
        };
        let mut in_chunk = vec![false; s.tokens.len()];
        for (ci, c) in s.chunks.iter_mut().enumerate() {
            let p = base.at(format!("chunks[{ci}]"));
            if !seen.chunks.insert(c.id.clone()) {
                return Err(err(p, format!("duplicate chunk id '{}'", c.id)));
            }
            let idx = span(format!("{p}.token_ids"), &c.token_ids)?;
            for &i in &idx {
                if std::mem::replace(&mut in_chunk[i], true) {
                    return Err(err(
                        p,
                        format!("token '{}' is in two chunks", s.tokens[i].id),
                    ));
                }
            }
            let rightmost = c.token_ids.last().cloned().unwrap_or_default();
            match &c.head_token {
                Some(h) if *h != rightmost => {
                    return Err(err(
                        format!("{p}.head_token"),
                        format!("head '{h}' is not the rightmost token '{rightmost}'"),
                    ))
                }
                _ => c.head_token = Some(rightmost),
            }
        }
        for (di, d) in s.dependencies.iter().enumerate() {
            let p = base.at(format!("dependencies[{di}]"));
            resolve(format!("{p}.governor"), &d.governor)?;
            resolve(format!("{p}.dependent"), &d.dependent)?;
            if d.governor == d.dependent {
                return Err(err(p, "governor equals dependent".into()));
            }
            if !deps.contains(&d.label) {
                return Err(err(
                    format!("{p}.label"),
                    format!("unknown dependency label '{}'", d.label),
                ));
            }
        }
        if let Some(r) = &s.root {
            resolve(base.at("root"), r)?;
        }
        let mut entity_ids = HashMap::new();
        for (ei, e) in s.entities.iter_mut().enumerate() {
            let p = base.at(format!("entities[{ei}]"));
            if !seen.entities.insert(e.id.clone()) {
                return Err(err(p, format!("duplicate entity id '{}'", e.id)));
            }
            span(format!("{p}.token_ids"), &e.token_ids)?;
            let rightmost = e.token_ids.last().cloned().unwrap_or_default();
            match &e.head_token {
                Some(h) if *h != rightmost => {
                    return Err(err(
                        format!("{p}.head_token"),
                        format!("head '{h}' is not the rightmost token '{rightmost}'"),
                    ))
                }
                _ => e.head_token = Some(rightmost),
            }
            entity_ids.insert(e.id.clone(), ei);
        }
        for (ri, r) in s.relations.iter_mut().enumerate() {
            let p = base.at(format!("relations[{ri}]"));
            let a = *entity_ids.get(&r.arg1).ok_or_else(|| {
                err(
                    format!("{p}.arg1"),
                    format!("'{}' is not an entity of this sentence", r.arg1),
                )
            })?;
            let b = *entity_ids.get(&r.arg2).ok_or_else(|| {
                err(
                    format!("{p}.arg2"),
                    format!("'{}' is not an entity of this sentence", r.arg2),
                )
            })?;
            if a == b {
                return Err(err(p, "arg1 equals arg2".into()));
            }
            // relations are symmetric: store in entity declaration order
            if b < a {
                std::mem::swap(&mut r.arg1, &mut r.arg2);
            }
        }
    }
    Ok(())
}
