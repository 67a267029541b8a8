use rustc_hash::FxHashSet;

use super::{ArgMode, ModeDecl, ModeSet};
use crate::logic::term::{Clause, Literal, Term, Var};

/// Variables at `+` positions of the head.
pub fn head_inputs(clause: &Clause, modes: &ModeSet) -> FxHashSet<Var> {
    modes
        .head
        .args
        .iter()
        .zip(&clause.head.args)
        .filter(|(m, _)| m.mode == ArgMode::Input)
        .filter_map(|(_, t)| t.as_var())
        .collect()
}

fn vars_at<'a>(
    decl: &'a ModeDecl,
    lit: &'a Literal,
    mode: ArgMode,
) -> impl Iterator<Item = Var> + 'a {
    decl.args
        .iter()
        .zip(&lit.args)
        .filter(move |(m, _)| m.mode == mode)
        .filter_map(|(_, t)| t.as_var())
}

/// One flag per body literal: whether it is linked given that only the
/// linked literals before it supply output variables.
///
/// A literal is linked when some matching body mode has all of its `+`
/// variables available; it then supplies the `-` variables of every matching
/// mode whose inputs are available.
pub fn linked_mask(clause: &Clause, modes: &ModeSet) -> Vec<bool> {
    let mut avail = head_inputs(clause, modes);
    clause
        .body
        .iter()
        .map(|lit| {
            let mut linked = false;
            let mut outputs = Vec::new();
            for decl in modes.body_modes_for(lit) {
                if vars_at(decl, lit, ArgMode::Input).all(|v| avail.contains(&v)) {
                    linked = true;
                    outputs.extend(vars_at(decl, lit, ArgMode::Output));
                }
            }
            avail.extend(outputs);
            linked
        })
        .collect()
}

/// Drop every body literal that is not linked. A single forward pass suffices
/// since dropped literals never supply variables.
pub fn repair_linkedness(clause: &Clause, modes: &ModeSet) -> Clause {
    let mask = linked_mask(clause, modes);
    if mask.iter().all(|&m| m) {
        return clause.clone();
    }
    let body = clause
        .body
        .iter()
        .zip(mask)
        .filter(|(_, keep)| *keep)
        .map(|(l, _)| l.clone())
        .collect();
    clause.with_body(body)
}

fn head_matches(clause: &Clause, modes: &ModeSet) -> bool {
    let head = &modes.head;
    clause.head.pred == head.pred
        && clause.head.args.len() == head.args.len()
        && head
            .args
            .iter()
            .zip(&clause.head.args)
            .all(|(m, t)| match m.mode {
                ArgMode::Constant => t.is_ground(),
                ArgMode::Input | ArgMode::Output => matches!(t, Term::Var(_)),
            })
}

/// True iff the head fits the modeh scheme, every body literal fits some modeb
/// scheme and every body literal is linked.
pub fn is_well_formed(clause: &Clause, modes: &ModeSet) -> bool {
    head_matches(clause, modes) && linked_mask(clause, modes).into_iter().all(|m| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::parse_clause;
    use crate::modes::parse_mode_file;

    fn modes() -> ModeSet {
        parse_mode_file(
            ":- modeh(1, r(+token, +token)).
             :- modeb(*, t_next(+token, -token)).
             :- modeb(*, t_pos(+token, #pos)).
             :- modeb(*, t_hasDep(#dep, +token, -token)).
             :- modeb(*, t_hasDep(#dep, -token, +token)).",
        )
        .unwrap()
    }

    #[test]
    fn adjacent_tokens_linked() {
        let c = parse_clause("r(A,B) :- t_next(A,B).").unwrap();
        assert!(is_well_formed(&c, &modes()));
    }

    #[test]
    fn unlinked_variable() {
        let c = parse_clause("r(A,B) :- t_pos(C,nnp).").unwrap();
        assert!(!is_well_formed(&c, &modes()));
        assert_eq!(repair_linkedness(&c, &modes()).body.len(), 0);
    }

    #[test]
    fn unknown_predicate_not_well_formed() {
        let c = parse_clause("r(A,B) :- t_ner(A,person).").unwrap();
        assert!(!is_well_formed(&c, &modes()));
    }

    #[test]
    fn variable_at_constant_position_rejected() {
        let c = parse_clause("r(A,B) :- t_pos(A,C).").unwrap();
        assert!(!is_well_formed(&c, &modes()));
    }

    #[test]
    fn governor_reached_through_reverse_mode() {
        let c = parse_clause("r(A,B) :- t_hasDep(nsubj,C,A), t_hasDep(dobj,C,B), t_pos(C,vbz).")
            .unwrap();
        assert!(is_well_formed(&c, &modes()));
    }

    #[test]
    fn repair_cascades() {
        let c = parse_clause("r(A,B) :- t_next(C,D), t_next(D,E), t_pos(A,nn).").unwrap();
        let fixed = repair_linkedness(&c, &modes());
        assert_eq!(fixed.to_string(), "r(A,B) :- t_pos(A,nn).");
    }

    #[test]
    fn paper_rule_one() {
        let m = parse_mode_file(
            ":- modeh(1, part_w(+token, +token)).
             :- modeb(*, t_gpos(+token, #gpos)).
             :- modeb(*, t_next(+token, -token)).
             :- modeb(*, t_subtype(+token, #class)).",
        )
        .unwrap();
        let c = parse_clause(
            "part_w(A,B):- t_gpos(A,nn), t_next(A,B), t_subtype(B,state-or-province).",
        )
        .unwrap();
        assert!(is_well_formed(&c, &m));
    }
}
