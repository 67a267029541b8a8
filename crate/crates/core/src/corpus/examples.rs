//! Relation examples from co-occurring entity mentions.

use super::{Corpus, Sentence};
use crate::logic::term::{Literal, Term};

/// One candidate pair with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub literal: Literal,
    pub gold: bool,
    pub doc: usize,
    pub sentence_id: String,
    pub arg1: String,
    pub arg2: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Examples {
    pub pos: Vec<Literal>,
    pub neg: Vec<Literal>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub sentences: usize,
    pub pos: usize,
    pub neg: usize,
}

/// Entity index pairs of a sentence that yield examples, in declaration
/// order. Self-interactions (shared entity reference) and pairs sharing a
/// head token are skipped.
pub(crate) fn candidate_pairs(s: &Sentence) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..s.entities.len() {
        for j in i + 1..s.entities.len() {
            let (a, b) = (&s.entities[i], &s.entities[j]);
            let same_ref = a.entity_ref.is_some() && a.entity_ref == b.entity_ref;
            if !same_ref && a.head() != b.head() {
                out.push((i, j));
            }
        }
    }
    out
}

/// Every candidate pair of the corpus, labelled against gold instances of
/// `relation`.
pub fn candidates(c: &Corpus, relation: &str) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (d, doc) in c.documents.iter().enumerate() {
        for s in &doc.sentences {
            for (i, j) in candidate_pairs(s) {
                let (a, b) = (&s.entities[i], &s.entities[j]);
                let gold = s.relations.iter().any(|r| {
                    r.gold
                        && r.relation == relation
                        && ((r.arg1 == a.id && r.arg2 == b.id)
                            || (r.arg1 == b.id && r.arg2 == a.id))
                });
                out.push(Candidate {
                    literal: Literal::new(
                        relation,
                        vec![Term::constant(a.head()), Term::constant(b.head())],
                    ),
                    gold,
                    doc: d,
                    sentence_id: s.id.clone(),
                    arg1: a.id.clone(),
                    arg2: b.id.clone(),
                });
            }
        }
    }
    out
}

/// Positive and negative example literals `relation(head1, head2)`.
pub fn generate_examples(c: &Corpus, relation: &str) -> Examples {
    let mut ex = Examples::default();
    for cand in candidates(c, relation) {
        if cand.gold {
            ex.pos.push(cand.literal);
        } else {
            ex.neg.push(cand.literal);
        }
    }
    ex
}

pub fn corpus_stats(c: &Corpus, relation: &str) -> CorpusStats {
    let ex = generate_examples(c, relation);
    CorpusStats {
        sentences: c.sentence_count(),
        pos: ex.pos.len(),
        neg: ex.neg.len(),
    }
}
