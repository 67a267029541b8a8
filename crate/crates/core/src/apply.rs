//! Applying a learned theory to unseen text and exporting the extracted
//! relation instances as a typed, tab-separated instance file.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{Candidate, Corpus, EntityMention, Taxonomy};
use crate::eval::{best_rule, round4, to_f64, Frac};
use crate::induction::Theory;
use crate::logic::kb::KnowledgeBase;
use crate::logic::solve::{CoverError, Prover};

/// Column header of the instance file.
pub const INSTANCE_HEADER: &str =
    "subject_id\trelation\tobject_id\tconfidence\tsubject_class\tobject_class\tsentence_id";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedInstance {
    pub relation: String,
    pub arg1: String,
    pub arg2: String,
    pub head1: String,
    pub head2: String,
    pub sentence_id: String,
    pub confidence: Frac,
    /// Index of the covering rule with the highest confidence.
    pub matched_rule: usize,
}

/// One parsed line of an instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub subject_id: String,
    pub relation: String,
    pub object_id: String,
    pub confidence: f64,
    pub subject_class: String,
    pub object_class: String,
    pub sentence_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("entity '{0}' does not occur in the corpus")]
    UnknownEntity(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Extract an instance for every candidate some rule covers. Output keeps
/// the sentence order of `candidates`; within a sentence, higher confidence
/// first.
pub fn apply_theory(
    t: &Theory,
    kb: &KnowledgeBase,
    candidates: &[Candidate],
) -> Result<Vec<ExtractedInstance>, CoverError> {
    let matches: Vec<Option<(usize, Frac)>> = candidates
        .par_iter()
        .map_init(
            || Prover::new(kb, t.params.bounds),
            |prover, c| best_rule(t, prover, &c.literal),
        )
        .collect::<Result<_, _>>()?;
    let mut sentence_rank: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<(usize, ExtractedInstance)> = Vec::new();
    for (c, m) in candidates.iter().zip(matches) {
        let next = sentence_rank.len();
        let rank = *sentence_rank.entry(c.sentence_id.as_str()).or_insert(next);
        let Some((rule, confidence)) = m else {
            continue;
        };
        let arg = |i: usize| c.literal.args[i].to_string();
        out.push((
            rank,
            ExtractedInstance {
                relation: c.literal.pred.to_string(),
                arg1: c.arg1.clone(),
                arg2: c.arg2.clone(),
                head1: arg(0),
                head2: arg(1),
                sentence_id: c.sentence_id.clone(),
                confidence,
                matched_rule: rule,
            },
        ));
    }
    // stable: candidates of equal confidence keep their pair order
    out.sort_by(|(ra, a), (rb, b)| ra.cmp(rb).then(b.confidence.cmp(&a.confidence)));
    Ok(out.into_iter().map(|(_, x)| x).collect())
}

/// The most specific class of a mention: its subtype when present, unless a
/// taxonomy places the type below it.
fn most_specific(e: &EntityMention, tax: Option<&Taxonomy>) -> String {
    let Some(sub) = &e.subtype else {
        return e.entity_type.clone();
    };
    if let Some(tax) = tax {
        let depth = |c: &str| tax.ancestors(c).map(|a| a.len()).ok();
        if let (Some(dt), Some(ds)) = (depth(&e.entity_type), depth(sub)) {
            if dt > ds {
                return e.entity_type.clone();
            }
        }
    }
    sub.clone()
}

/// Render the instance file: header, then one record per instance in order.
pub fn export_instances(
    xs: &[ExtractedInstance],
    tax: Option<&Taxonomy>,
    corpus: &Corpus,
) -> Result<String, ApplyError> {
    let mentions: HashMap<&str, &EntityMention> = corpus
        .sentences()
        .flat_map(|(_, s)| s.entities.iter())
        .map(|e| (e.id.as_str(), e))
        .collect();
    let class = |id: &str| {
        mentions
            .get(id)
            .map(|e| most_specific(e, tax))
            .ok_or_else(|| ApplyError::UnknownEntity(id.to_string()))
    };
    let mut out = String::from(INSTANCE_HEADER);
    out.push('\n');
    for x in xs {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            x.arg1,
            x.relation,
            x.arg2,
            round4(x.confidence),
            class(&x.arg1)?,
            class(&x.arg2)?,
            x.sentence_id
        );
    }
    Ok(out)
}

pub fn parse_instances(text: &str) -> Result<Vec<InstanceRecord>, ApplyError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == INSTANCE_HEADER => {}
        _ => {
            return Err(ApplyError::Format {
                line: 1,
                message: "missing instance header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ApplyError::Format {
            line: i + 1,
            message,
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 columns, found {}", f.len())));
        }
        let confidence: f64 = f[3]
            .parse()
            .map_err(|_| err(format!("bad confidence '{}'", f[3])))?;
        out.push(InstanceRecord {
            subject_id: f[0].into(),
            relation: f[1].into(),
            object_id: f[2].into(),
            confidence,
            subject_class: f[4].into(),
            object_class: f[5].into(),
            sentence_id: f[6].into(),
        });
    }
    Ok(out)
}

impl ExtractedInstance {
    /// The record this instance exports to, given the two classes.
    pub fn record(&self, subject_class: &str, object_class: &str) -> InstanceRecord {
        InstanceRecord {
            subject_id: self.arg1.clone(),
            relation: self.relation.clone(),
            object_id: self.arg2.clone(),
            confidence: to_f64(self.confidence),
            subject_class: subject_class.into(),
            object_class: object_class.into(),
            sentence_id: self.sentence_id.clone(),
        }
    }
}
