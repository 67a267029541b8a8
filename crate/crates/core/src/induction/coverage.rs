use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{EvalFn, ScoredClause};
use crate::logic::kb::KnowledgeBase;
use crate::logic::solve::{CoverError, Prover, SolveBounds};
use crate::logic::term::{Clause, Literal};

/// Which training examples a clause covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSet {
    pub pos: Vec<bool>,
    pub neg: Vec<bool>,
    pub pos_count: usize,
    pub neg_count: usize,
}

impl CoverSet {
    fn from_flags(pos: Vec<bool>, neg: Vec<bool>) -> Self {
        CoverSet {
            pos_count: pos.iter().filter(|&&b| b).count(),
            neg_count: neg.iter().filter(|&&b| b).count(),
            pos,
            neg,
        }
    }
}

/// Coverage tester over a fixed example set, memoised by canonical clause.
///
/// Examples are tested in parallel on the current rayon pool; results are
/// per-example flags so the outcome does not depend on scheduling.
pub struct Evaluator<'a> {
    kb: &'a KnowledgeBase,
    pos: &'a [Literal],
    neg: &'a [Literal],
    bounds: SolveBounds,
    cache: Mutex<FxHashMap<Clause, Arc<CoverSet>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        kb: &'a KnowledgeBase,
        pos: &'a [Literal],
        neg: &'a [Literal],
        bounds: SolveBounds,
    ) -> Self {
        Evaluator {
            kb,
            pos,
            neg,
            bounds,
            cache: Mutex::new(FxHashMap::default()),
        }
    }

    pub fn kb(&self) -> &'a KnowledgeBase {
        self.kb
    }

    pub fn pos(&self) -> &'a [Literal] {
        self.pos
    }

    pub fn neg(&self) -> &'a [Literal] {
        self.neg
    }

    pub fn bounds(&self) -> SolveBounds {
        self.bounds
    }

    fn flags(
        &self,
        c: &Clause,
        examples: &[Literal],
        floor: Option<&[bool]>,
    ) -> Result<Vec<bool>, CoverError> {
        examples
            .par_iter()
            .enumerate()
            .with_min_len(8)
            .map_init(
                || Prover::new(self.kb, self.bounds),
                |prover, (i, e)| match floor {
                    Some(f) if f[i] => Ok(true),
                    _ => prover.covers(c, e),
                },
            )
            .collect()
    }

    fn compute(&self, c: &Clause, floor: Option<&CoverSet>) -> Result<Arc<CoverSet>, CoverError> {
        let key = c.canonical();
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let pos = self.flags(c, self.pos, floor.map(|f| &f.pos[..]))?;
        let neg = self.flags(c, self.neg, floor.map(|f| &f.neg[..]))?;
        let set = Arc::new(CoverSet::from_flags(pos, neg));
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, set.clone());
        Ok(set)
    }

    pub fn coverage(&self, c: &Clause) -> Result<Arc<CoverSet>, CoverError> {
        self.compute(c, None)
    }

    /// Coverage of `c` given that it covers at least `floor`; only the
    /// examples outside `floor` are tested. Valid when `c` generalises the
    /// clause `floor` was computed for.
    pub fn coverage_above(
        &self,
        c: &Clause,
        floor: &CoverSet,
    ) -> Result<Arc<CoverSet>, CoverError> {
        self.compute(c, Some(floor))
    }

    pub fn score(&self, c: &Clause, evalfn: EvalFn) -> Result<ScoredClause, CoverError> {
        let cov = self.coverage(c)?;
        Ok(ScoredClause::new(
            c.clone(),
            cov.pos_count,
            cov.neg_count,
            evalfn,
        ))
    }
}
