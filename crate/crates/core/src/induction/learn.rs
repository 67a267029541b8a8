use rayon::prelude::*;
use rustc_hash::FxHashSet;

use super::{
    best_armg, is_acceptable, negative_based_reduction, Evaluator, InductionError, LearnParams,
    ScoredClause, Theory, TheoryConstruction, TheoryRule,
};
use crate::logic::kb::KnowledgeBase;
use crate::logic::term::{Clause, Literal};
use crate::modes::{is_well_formed, ModeSet};

/// Parameters for the search started from positive number `index`.
fn seeded(p: &LearnParams, index: usize) -> LearnParams {
    LearnParams {
        rng_seed: p.rng_seed.wrapping_add(index as u64),
        ..*p
    }
}

fn candidate(
    seed_index: usize,
    seed: &Literal,
    eval: &Evaluator<'_>,
    modes: &ModeSet,
    p: &LearnParams,
) -> Result<ScoredClause, InductionError> {
    let c = best_armg(seed, eval, modes, &seeded(p, seed_index))?;
    let reduced = negative_based_reduction(&c.clause, eval, modes)?;
    Ok(eval.score(&reduced, p.evalfn)?)
}

/// Learn a theory for the relation of `pos`.
///
/// Incremental construction is the classic covering loop: the first unseen
/// positive is the seed, an acceptable rule removes the positives it covers.
/// Global construction builds one candidate per positive, then greedily picks
/// candidates by the score of the positives they newly cover.
pub fn learn(
    pos: &[Literal],
    neg: &[Literal],
    kb: &KnowledgeBase,
    modes: &ModeSet,
    p: &LearnParams,
) -> Result<Theory, InductionError> {
    p.validate().map_err(InductionError::Params)?;
    if pos.is_empty() {
        return Err(InductionError::NoPositives);
    }
    let chosen = match p.theory_construction {
        TheoryConstruction::Incremental => incremental(pos, neg, kb, modes, p)?,
        TheoryConstruction::Global => global(pos, neg, kb, modes, p)?,
    };
    // training statistics are reported against the full training set
    let eval = Evaluator::new(kb, pos, neg, p.bounds);
    let mut rules = Vec::with_capacity(chosen.len());
    for (clause, seed) in chosen {
        let scored = eval.score(&clause, p.evalfn)?;
        debug_assert!(is_well_formed(&scored.clause, modes));
        debug_assert!(is_acceptable(&scored, p));
        rules.push(TheoryRule { scored, seed });
    }
    Ok(Theory { rules, params: *p })
}

fn incremental(
    pos: &[Literal],
    neg: &[Literal],
    kb: &KnowledgeBase,
    modes: &ModeSet,
    p: &LearnParams,
) -> Result<Vec<(Clause, Literal)>, InductionError> {
    let mut remaining: Vec<usize> = (0..pos.len()).collect();
    let mut seen = vec![false; pos.len()];
    let mut out = Vec::new();
    while let Some(&i) = remaining.iter().find(|&&i| !seen[i]) {
        seen[i] = true;
        let current: Vec<Literal> = remaining.iter().map(|&j| pos[j].clone()).collect();
        let eval = Evaluator::new(kb, &current, neg, p.bounds);
        let sc = candidate(i, &pos[i], &eval, modes, p)?;
        log::debug!(
            "seed {} -> {} ({}/{})",
            pos[i],
            sc.clause,
            sc.pos_cov,
            sc.neg_cov
        );
        if !is_acceptable(&sc, p) {
            continue;
        }
        let cov = eval.coverage(&sc.clause)?;
        remaining = remaining
            .iter()
            .zip(&cov.pos)
            .filter(|(_, &covered)| !covered)
            .map(|(&j, _)| j)
            .collect();
        out.push((sc.clause, pos[i].clone()));
    }
    Ok(out)
}

fn global(
    pos: &[Literal],
    neg: &[Literal],
    kb: &KnowledgeBase,
    modes: &ModeSet,
    p: &LearnParams,
) -> Result<Vec<(Clause, Literal)>, InductionError> {
    let eval = Evaluator::new(kb, pos, neg, p.bounds);
    let scored: Vec<ScoredClause> = (0..pos.len())
        .into_par_iter()
        .map(|i| candidate(i, &pos[i], &eval, modes, p))
        .collect::<Result<_, _>>()?;
    let mut seen = FxHashSet::default();
    let mut cands = Vec::new();
    for (i, sc) in scored.into_iter().enumerate() {
        log::debug!(
            "seed {} -> {} ({}/{})",
            pos[i],
            sc.clause,
            sc.pos_cov,
            sc.neg_cov
        );
        if is_acceptable(&sc, p) && seen.insert(sc.clause.canonical()) {
            let cov = eval.coverage(&sc.clause)?;
            cands.push((sc, cov, i));
        }
    }
    let mut covered = vec![false; pos.len()];
    let mut out = Vec::new();
    loop {
        let mut best: Option<(ScoredClause, usize)> = None;
        for (k, (sc, cov, _)) in cands.iter().enumerate() {
            let fresh = cov
                .pos
                .iter()
                .zip(&covered)
                .filter(|(&c, &done)| c && !done)
                .count();
            if fresh == 0 {
                continue;
            }
            let marginal = ScoredClause::new(sc.clause.clone(), fresh, sc.neg_cov, p.evalfn);
            let better = match &best {
                None => true,
                Some((b, _)) => marginal.rank_cmp(b).is_lt(),
            };
            if better {
                best = Some((marginal, k));
            }
        }
        let Some((marginal, k)) = best else { break };
        if marginal.score <= 0.0 {
            break;
        }
        let (sc, cov, seed) = cands.swap_remove(k);
        for (c, p) in covered.iter_mut().zip(&cov.pos) {
            *c |= *p;
        }
        out.push((sc.clause, pos[seed].clone()));
    }
    Ok(out)
}
