//! Fold planning, exact metrics and the evaluation protocols.
//!
//! All metric arithmetic is done on exact rationals; values are rounded to
//! four decimals only when printed.

mod protocol;

pub use protocol::{cross_corpus, cross_validate, FoldReport, Report};

use std::fmt;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::induction::Theory;
use crate::logic::kb::KnowledgeBase;
use crate::logic::solve::{CoverError, Prover};
use crate::logic::term::Literal;
use crate::pipeline::PipelineError;

/// An exact fraction.
pub type Frac = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("invalid fold plan: {0}")]
    Folds(String),
    #[error("AUC needs at least one positive and one negative example")]
    Degenerate,
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Four-decimal rendering, rounding half up.
pub fn round4(x: Frac) -> String {
    let (n, d) = (*x.numer() as u128, *x.denom() as u128);
    let scaled = (n * 20_000 + d) / (2 * d);
    format!("{}.{:04}", scaled / 10_000, scaled % 10_000)
}

/// A fraction as the nearest f64 of its four-decimal rendering.
pub fn to_f64(x: Frac) -> f64 {
    round4(x).parse().expect("rendered fraction parses")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;
    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl ConfusionCounts {
    pub fn record(&mut self, predicted: bool, gold: bool) {
        match (predicted, gold) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub precision: Frac,
    pub recall: Frac,
    pub f1: Frac,
    /// Absent when the scored examples are all of one class.
    pub auc: Option<Frac>,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={} R={} F1={} AUC={}",
            round4(self.precision),
            round4(self.recall),
            round4(self.f1),
            self.auc.map_or("-".to_string(), round4)
        )
    }
}

fn ratio(n: u64, d: u64) -> Frac {
    if d == 0 {
        Frac::from_integer(0)
    } else {
        Frac::new(n, d)
    }
}

/// Precision, recall and F1; AUC is left empty.
pub fn prf(cc: ConfusionCounts) -> Metrics {
    Metrics {
        precision: ratio(cc.tp, cc.tp + cc.fp),
        recall: ratio(cc.tp, cc.tp + cc.fn_),
        // equals 2PR/(P+R), and 0 when P+R = 0
        f1: ratio(2 * cc.tp, 2 * cc.tp + cc.fp + cc.fn_),
        auc: None,
    }
}

/// Mann-Whitney AUC: (concordant + ties/2) / (|pos| * |neg|).
pub fn auc(scored: &[(Frac, bool)]) -> Result<Frac, EvalError> {
    let mut neg: Vec<Frac> = scored.iter().filter(|s| !s.1).map(|s| s.0).collect();
    let pos: Vec<Frac> = scored.iter().filter(|s| s.1).map(|s| s.0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(EvalError::Degenerate);
    }
    neg.sort_unstable();
    // twice the statistic keeps everything integral
    let mut twice = 0u64;
    for p in &pos {
        let below = neg.partition_point(|n| n < p) as u64;
        let tied = neg.partition_point(|n| n <= p) as u64 - below;
        twice += 2 * below + tied;
    }
    Ok(Frac::new(twice, 2 * pos.len() as u64 * neg.len() as u64))
}

/// Laplace confidence `(pos + 1) / (pos + neg + 2)` of a rule's training statistics.
pub fn laplace(pos: usize, neg: usize) -> Frac {
    Frac::new(pos as u64 + 1, (pos + neg) as u64 + 2)
}

/// The covering rule with the highest Laplace confidence (first on ties).
pub fn best_rule(
    t: &Theory,
    prover: &mut Prover<'_>,
    e: &Literal,
) -> Result<Option<(usize, Frac)>, CoverError> {
    let mut best: Option<(usize, Frac)> = None;
    for (i, r) in t.rules.iter().enumerate() {
        let conf = laplace(r.scored.pos_cov, r.scored.neg_cov);
        if best.is_some_and(|(_, b)| b >= conf) {
            continue;
        }
        if prover.covers(&r.scored.clause, e)? {
            best = Some((i, conf));
        }
    }
    Ok(best)
}

/// Confidence of an example: the best covering rule's Laplace value, or 0.
pub fn score_example(t: &Theory, kb: &KnowledgeBase, e: &Literal) -> Result<Frac, CoverError> {
    let mut prover = Prover::new(kb, t.params.bounds);
    Ok(best_rule(t, &mut prover, e)?.map_or(Frac::from_integer(0), |(_, c)| c))
}

/// Document-level fold assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold of each document, by document position in the corpus.
    pub assignment: Vec<usize>,
    pub rng_seed: u64,
}

impl FoldPlan {
    /// Document positions of fold `f`, in corpus order.
    pub fn fold(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&d| self.assignment[d] == f)
            .collect()
    }

    /// Document positions outside fold `f`, in corpus order.
    pub fn rest(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&d| self.assignment[d] != f)
            .collect()
    }
}

/// Shuffle the documents with a seeded generator and deal them round-robin.
pub fn kfold(docs: usize, k: usize, rng_seed: u64) -> Result<FoldPlan, EvalError> {
    if k < 2 {
        return Err(EvalError::Folds(format!("k must be at least 2, got {k}")));
    }
    if k > docs {
        return Err(EvalError::Folds(format!(
            "k = {k} exceeds the {docs} documents"
        )));
    }
    let mut order: Vec<usize> = (0..docs).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let mut assignment = vec![0; docs];
    for (i, d) in order.into_iter().enumerate() {
        assignment[d] = i % k;
    }
    Ok(FoldPlan {
        k,
        assignment,
        rng_seed,
    })
}
