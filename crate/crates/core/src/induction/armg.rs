use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use super::{CoverSet, Evaluator, InductionError, LearnParams, ScoredClause};
use crate::logic::kb::KnowledgeBase;
use crate::logic::solve::{Prover, SolveBounds};
use crate::logic::term::{Clause, Literal};
use crate::modes::{bottom_clause, repair_linkedness, ModeSet};

pub(crate) fn armg_with(
    prover: &mut Prover<'_>,
    c: &Clause,
    e: &Literal,
    modes: &ModeSet,
) -> Result<Clause, InductionError> {
    let mut current = c.clone();
    loop {
        let Some(k) = prover.provable_prefix(&current, e)? else {
            return Err(InductionError::HeadMismatch {
                example: e.to_string(),
                head: current.head.to_string(),
            });
        };
        if k == current.body.len() {
            return Ok(current);
        }
        let mut body = current.body;
        body.remove(k);
        current = repair_linkedness(&Clause::new(current.head, body), modes);
    }
}

/// Asymmetric relative minimal generalisation of `c` against `e`: drop the
/// first blocking body literal, repair linkedness, repeat until `e` is covered.
pub fn armg(
    c: &Clause,
    e: &Literal,
    kb: &KnowledgeBase,
    modes: &ModeSet,
    bounds: SolveBounds,
) -> Result<Clause, InductionError> {
    armg_with(&mut Prover::new(kb, bounds), c, e, modes)
}

struct Entry {
    scored: ScoredClause,
    cov: Arc<CoverSet>,
}

/// Beam search of iterated ARMGs starting from the bottom clause of `seed`.
///
/// Each round samples up to `sample_size` positives not covered by the best
/// clause so far, generalises every beam clause against every sampled
/// example and keeps the `beam_width` best candidates. The search ends when
/// the best candidate does not strictly improve the best score.
pub fn best_armg(
    seed: &Literal,
    eval: &Evaluator<'_>,
    modes: &ModeSet,
    p: &LearnParams,
) -> Result<ScoredClause, InductionError> {
    if eval.pos().is_empty() {
        return Err(InductionError::NoPositives);
    }
    let bottom = bottom_clause(seed, eval.kb(), modes, &p.saturation())?;
    let cov = eval.coverage(&bottom)?;
    let mut best = Entry {
        scored: ScoredClause::new(bottom, cov.pos_count, cov.neg_count, p.evalfn),
        cov,
    };
    let mut beam = vec![Entry {
        scored: best.scored.clone(),
        cov: best.cov.clone(),
    }];
    let mut rng = ChaCha8Rng::seed_from_u64(p.rng_seed);
    let mut prover = Prover::new(eval.kb(), eval.bounds());
    loop {
        let pool: Vec<usize> = (0..eval.pos().len())
            .filter(|&i| !best.cov.pos[i])
            .collect();
        if pool.is_empty() {
            break;
        }
        let sample: Vec<usize> =
            rand::seq::index::sample(&mut rng, pool.len(), p.sample_size.min(pool.len()))
                .into_iter()
                .map(|j| pool[j])
                .collect();
        let mut seen = FxHashSet::default();
        let mut candidates = Vec::new();
        for entry in &beam {
            for &i in &sample {
                if entry.cov.pos[i] {
                    continue;
                }
                let g = match armg_with(&mut prover, &entry.scored.clause, &eval.pos()[i], modes) {
                    Ok(g) => g,
                    // a head with repeated variables cannot generalise to this example
                    Err(InductionError::HeadMismatch { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if !seen.insert(g.canonical()) {
                    continue;
                }
                let cov = eval.coverage_above(&g, &entry.cov)?;
                candidates.push(Entry {
                    scored: ScoredClause::new(g, cov.pos_count, cov.neg_count, p.evalfn),
                    cov,
                });
            }
        }
        if candidates.is_empty() {
            break;
        }
        candidates.sort_by(|a, b| a.scored.rank_cmp(&b.scored));
        candidates.truncate(p.beam_width);
        if candidates[0].scored.score <= best.scored.score {
            break;
        }
        best = Entry {
            scored: candidates[0].scored.clone(),
            cov: candidates[0].cov.clone(),
        };
        beam = candidates;
    }
    Ok(best.scored)
}
