use super::{Evaluator, InductionError};
use crate::logic::term::Clause;
use crate::modes::{repair_linkedness, ModeSet};

/// Remove body literals that do not change which negatives are covered.
///
/// Backward passes tentatively delete each literal (with linkedness repair)
/// and keep the deletion when the covered negatives stay exactly the same and
/// no positive is lost. Passes repeat until one commits nothing, so the
/// result is 1-minimal.
pub fn negative_based_reduction(
    c: &Clause,
    eval: &Evaluator<'_>,
    modes: &ModeSet,
) -> Result<Clause, InductionError> {
    let mut current = c.clone();
    let mut cov = eval.coverage(&current)?;
    loop {
        let mut committed = false;
        let mut j = current.body.len();
        while j > 0 {
            j -= 1;
            if j >= current.body.len() {
                continue;
            }
            let mut body = current.body.clone();
            body.remove(j);
            let cand = repair_linkedness(&current.with_body(body), modes);
            let cand_cov = eval.coverage(&cand)?;
            if cand_cov.neg == cov.neg && cand_cov.pos_count >= cov.pos_count {
                current = cand;
                cov = cand_cov;
                committed = true;
            }
        }
        if !committed {
            return Ok(current);
        }
    }
}
