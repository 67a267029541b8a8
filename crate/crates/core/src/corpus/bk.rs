//! Background-knowledge emission: one fact file per corpus.

use rayon::prelude::*;
use thiserror::Error;

use super::examples::candidate_pairs;
use super::graph::{build_graph, SentenceGraph};
use super::reduce::{reduce_graph, ReductionRule};
use super::taxonomy::{Taxonomy, TaxonomyError};
use super::{ChunkType, Corpus, Sentence};
use crate::logic::kb::{KbError, KnowledgeBase};
use crate::logic::syntax::{parse_program, Item};
use crate::logic::term::{Clause, Literal, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BkError {
    #[error("entity '{entity}': {source}")]
    Taxonomy {
        entity: String,
        source: TaxonomyError,
    },
    #[error("inconsistent thresholds: {0}")]
    Thresholds(String),
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Cut points of the discretising intensional predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    /// Longest `short` token.
    pub short_max: i64,
    /// Longest `medium` token.
    pub medium_max: i64,
    /// Largest absolute chunk offset that is `near` the root.
    pub near: i64,
    /// Largest absolute chunk offset that is `far`; beyond is `very_far`.
    pub far: i64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            short_max: 5,
            medium_max: 15,
            near: 3,
            far: 8,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), BkError> {
        if self.short_max < 0 || self.short_max >= self.medium_max {
            return Err(BkError::Thresholds(format!(
                "need 0 <= short ({}) < medium ({})",
                self.short_max, self.medium_max
            )));
        }
        if self.near < 0 || self.near >= self.far {
            return Err(BkError::Thresholds(format!(
                "need 0 <= near ({}) < far ({})",
                self.near, self.far
            )));
        }
        Ok(())
    }
}

/// The token-length and chunk-distance clauses, disjunctions split into
/// separate clauses.
pub fn emit_intentional_bk(t: &Thresholds) -> Result<Vec<Clause>, BkError> {
    t.validate()?;
    let Thresholds {
        short_max: s,
        medium_max: m,
        near: n,
        far: f,
    } = *t;
    let text = format!(
        "tok_length(T, short) :- token(T), t_length(T, X), X =< {s}.
tok_length(T, medium) :- token(T), t_length(T, X), X > {s}, X =< {m}.
tok_length(T, long) :- token(T), t_length(T, X), X > {m}.
ck_dist_root(CK, near) :- ck_posRelPred(CK, X), X >= -{n}, X =< {n}.
ck_dist_root(CK, far) :- ck_posRelPred(CK, X), X >= -{f}, X < -{n}.
ck_dist_root(CK, far) :- ck_posRelPred(CK, X), X > {n}, X =< {f}.
ck_dist_root(CK, very_far) :- ck_posRelPred(CK, X), X < -{f}.
ck_dist_root(CK, very_far) :- ck_posRelPred(CK, X), X > {f}.
"
    );
    let items = parse_program(&text).expect("intensional template parses");
    Ok(items
        .into_iter()
        .filter_map(|i| match i {
            Item::Clause { clause, .. } => Some(clause),
            Item::Directive { .. } => None,
        })
        .collect())
}

/// Per-token lexical and POS features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenFeatures {
    pub stem: String,
    pub length: usize,
    pub orth: &'static str,
    pub morph: &'static str,
    pub pos: String,
    pub gpos: String,
    pub big_bef: String,
    pub big_aft: String,
    pub trig_bef: String,
    pub trig_aft: String,
}

fn orth(surface: &str) -> &'static str {
    if !surface.chars().any(char::is_alphanumeric) {
        return "punct";
    }
    if surface.chars().any(|c| c.is_numeric()) {
        return "hasDigit";
    }
    let letters: Vec<char> = surface.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.iter().all(|c| !c.is_uppercase()) {
        "allLower"
    } else if letters.len() >= 2 && letters.iter().all(|c| !c.is_lowercase()) {
        "allCaps"
    } else if letters[0].is_uppercase() && letters[1..].iter().all(|c| !c.is_uppercase()) {
        "upperInit"
    } else {
        "mixedCaps"
    }
}

fn morph(surface: &str) -> &'static str {
    if surface.chars().any(char::is_alphabetic) {
        "word"
    } else if surface.chars().any(|c| c.is_ascii_digit())
        && surface
            .chars()
            .all(|c| c.is_ascii_digit() || c == '.' || c == ',')
    {
        "number"
    } else {
        "symbol"
    }
}

fn gpos(pos: &str) -> String {
    let prefix: String = pos
        .chars()
        .take_while(|c| c.is_alphabetic())
        .take(2)
        .collect();
    if prefix.is_empty() {
        pos.to_string()
    } else {
        prefix
    }
}

/// Features of token `i`; POS n-grams run over the whole sentence, padded
/// with `bos` and `eos`.
pub fn token_features(s: &Sentence, i: usize) -> TokenFeatures {
    let t = &s.tokens[i];
    let tag = |j: isize| -> String {
        if j < 0 {
            "bos".into()
        } else if j as usize >= s.tokens.len() {
            "eos".into()
        } else {
            s.tokens[j as usize].pos.to_lowercase()
        }
    };
    let gram = |from: isize, len: isize| -> String {
        (from..from + len).map(tag).collect::<Vec<_>>().join("-")
    };
    let i = i as isize;
    let pos = t.pos.to_lowercase();
    TokenFeatures {
        stem: t.lemma.clone(),
        length: t.surface.chars().count(),
        orth: orth(&t.surface),
        morph: morph(&t.surface),
        gpos: gpos(&pos),
        pos,
        big_bef: gram(i - 2, 2),
        big_aft: gram(i + 1, 2),
        trig_bef: gram(i - 3, 3),
        trig_aft: gram(i + 1, 3),
    }
}

fn c(name: &str) -> Term {
    Term::constant(name)
}

fn lit(pred: &str, args: Vec<Term>) -> Literal {
    Literal::new(pred, args)
}

/// Union of the reductions for every candidate pair of the sentence; the
/// unreduced graph when there is none.
fn reduced<'s>(s: &'s Sentence, rules: &[ReductionRule]) -> SentenceGraph<'s> {
    let g = build_graph(s);
    let pairs = candidate_pairs(s);
    if pairs.is_empty() || rules.is_empty() {
        return g;
    }
    let mut out = g.emptied();
    for (a, b) in pairs {
        out.union_with(&reduce_graph(&g, rules, (&s.entities[a], &s.entities[b])));
    }
    out
}

fn class_facts(
    out: &mut Vec<Literal>,
    pred: &str,
    tok: Term,
    class: &str,
    taxonomy: Option<&Taxonomy>,
    entity: &str,
) -> Result<(), BkError> {
    out.push(lit(pred, vec![tok, c(class)]));
    let Some(tax) = taxonomy else { return Ok(()) };
    let err = |source| BkError::Taxonomy {
        entity: entity.to_string(),
        source,
    };
    let canonical = tax
        .resolve(class)
        .ok_or_else(|| err(TaxonomyError::UnknownClass(class.to_string())))?;
    if canonical != class {
        out.push(lit(pred, vec![tok, c(canonical)]));
    }
    for anc in tax.ancestors(canonical).map_err(err)? {
        out.push(lit(pred, vec![tok, c(&anc)]));
    }
    Ok(())
}

fn sentence_facts(
    s: &Sentence,
    taxonomy: Option<&Taxonomy>,
    rules: &[ReductionRule],
) -> Result<Vec<Literal>, BkError> {
    let g = reduced(s, rules);
    let tid = |i: usize| c(&s.tokens[i].id);
    let cid = |ci: usize| c(&s.chunks[ci].id);
    let tokens: Vec<usize> = g.alive_tokens().collect();
    let chunks = g.alive_chunks();
    let mut out = Vec::new();

    out.push(lit("sent", vec![c(&s.id)]));
    out.extend(chunks.iter().map(|&ci| lit("chunk", vec![cid(ci)])));
    out.extend(tokens.iter().map(|&i| lit("token", vec![tid(i)])));

    let feats: Vec<TokenFeatures> = tokens.iter().map(|&i| token_features(s, i)).collect();
    for (&i, f) in tokens.iter().zip(&feats) {
        out.push(lit("t_stem", vec![tid(i), Term::string(&f.stem)]));
        out.push(lit("t_length", vec![tid(i), Term::Int(f.length as i64)]));
        out.push(lit("t_orth", vec![tid(i), c(f.orth)]));
        out.push(lit("t_morph_type", vec![tid(i), c(f.morph)]));
    }
    for (&i, f) in tokens.iter().zip(&feats) {
        out.push(lit("t_pos", vec![tid(i), c(&f.pos)]));
        out.push(lit("t_gpos", vec![tid(i), c(&f.gpos)]));
        out.push(lit("t_bigPosBef", vec![tid(i), c(&f.big_bef)]));
        out.push(lit("t_bigPosAft", vec![tid(i), c(&f.big_aft)]));
        out.push(lit("t_trigPosBef", vec![tid(i), c(&f.trig_bef)]));
        out.push(lit("t_trigPosAft", vec![tid(i), c(&f.trig_aft)]));
    }

    let heads: Vec<(usize, usize)> = chunks
        .iter()
        .filter_map(|&ci| g.chunk_head(ci).map(|h| (ci, h)))
        .collect();
    let root_chunk = g
        .root()
        .and_then(|r| g.chunk_of(r))
        .and_then(|rc| chunks.iter().position(|&ci| ci == rc));
    for (k, &(ci, h)) in heads.iter().enumerate() {
        out.push(lit("ck_hasHead", vec![cid(ci), tid(h)]));
        out.push(lit(
            "ck_hasType",
            vec![cid(ci), c(s.chunks[ci].chunk_type.as_str())],
        ));
        if let Some(r) = root_chunk {
            out.push(lit(
                "ck_posRelPred",
                vec![cid(ci), Term::Int(k as i64 - r as i64)],
            ));
        }
    }
    for &i in &tokens {
        let Some(ci) = g.chunk_of(i) else { continue };
        let ty = s.chunks[ci].chunk_type;
        if ty == ChunkType::Np && g.chunk_head(ci) == Some(i) {
            out.push(lit("t_isHeadNP", vec![tid(i)]));
        }
        out.push(lit("t_ck_tag_type", vec![tid(i), c(ty.as_str())]));
    }

    for &i in &tokens {
        if let Some(ner) = &s.tokens[i].ner {
            out.push(lit("t_ner", vec![tid(i), c(&ner.to_lowercase())]));
        }
    }

    let index = s.token_index();
    for e in &s.entities {
        for t in &e.token_ids {
            let i = index[t.as_str()];
            if !g.is_alive(i) {
                continue;
            }
            class_facts(&mut out, "t_type", tid(i), &e.entity_type, taxonomy, &e.id)?;
            match &e.subtype {
                Some(sub) => class_facts(&mut out, "t_subtype", tid(i), sub, taxonomy, &e.id)?,
                None => out.push(lit("t_subtype", vec![tid(i), c("none")])),
            }
            if let Some(m) = &e.mention_type {
                out.push(lit("t_mtype", vec![tid(i), c(m)]));
            }
        }
    }

    for (a, b) in g.next_edges() {
        out.push(lit("t_next", vec![tid(a), tid(b)]));
    }
    for w in heads.windows(2) {
        out.push(lit("t_next_head", vec![tid(w[0].1), tid(w[1].1)]));
    }
    for &ci in &chunks {
        for i in g.chunk_tokens(ci) {
            out.push(lit("ck_hasToken", vec![cid(ci), tid(i)]));
        }
    }
    for (a, b) in g.chunk_succession() {
        out.push(lit("ck_hasSucc", vec![cid(a), cid(b)]));
    }
    for e in g.edges() {
        out.push(lit("t_hasDep", vec![c(&e.label), tid(e.gov), tid(e.dep)]));
    }
    if let Some(r) = g.root() {
        out.push(lit("t_root", vec![tid(r)]));
    }
    Ok(out)
}

/// Emit the fact file for a corpus: per sentence, the facts of the union of
/// its pair-focused reduced graphs, grouped as corpus entities, lexical,
/// syntactic, chunking, semantic, annotation and structural; then the
/// intensional clauses.
pub fn emit_bk(
    corpus: &Corpus,
    taxonomy: Option<&Taxonomy>,
    rules: &[ReductionRule],
    thresholds: &Thresholds,
) -> Result<String, BkError> {
    let intensional = emit_intentional_bk(thresholds)?;
    let sentences: Vec<(usize, &Sentence)> = corpus
        .documents
        .iter()
        .enumerate()
        .flat_map(|(d, doc)| doc.sentences.iter().map(move |s| (d, s)))
        .collect();
    let per_sentence: Vec<Vec<Literal>> = sentences
        .par_iter()
        .map(|(_, s)| sentence_facts(s, taxonomy, rules))
        .collect::<Result<_, _>>()?;
    let mut kb = KnowledgeBase::new();
    let mut last_doc = None;
    for ((d, _), facts) in sentences.iter().zip(per_sentence) {
        if last_doc != Some(*d) {
            kb.add_fact(lit("doc", vec![c(&corpus.documents[*d].id)]))?;
            last_doc = Some(*d);
        }
        for f in facts {
            kb.add_fact(f)?;
        }
    }
    for ty in ["short", "medium", "long"] {
        kb.add_fact(lit("length_type", vec![c(ty)]))?;
    }
    for clause in intensional {
        kb.add_clause(clause)?;
    }
    Ok(kb.to_text())
}
