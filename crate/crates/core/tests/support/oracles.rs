//! Brute-force reference implementations. Each one recomputes a result from
//! its definition, without the indexing, pruning or early exits of the code
//! under test.

use std::collections::{BTreeSet, HashMap, HashSet};

use relex_core::logic::kb::KnowledgeBase;
use relex_core::logic::solve::{Prover, SolveBounds};
use relex_core::logic::term::{Clause, Literal, Sym, Term, Var};
use relex_core::modes::{ArgMode, ModeSet, Recall};

/// Every assignment of `vars` over `domain`, in odometer order.
fn assignments(vars: usize, domain: &[Term]) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..vars {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                domain.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(*c);
                    p
                })
            })
            .collect();
    }
    out
}

fn ground(lit: &Literal, vars: &[Var], values: &[Term]) -> Literal {
    Literal {
        pred: lit.pred,
        args: lit
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => values[vars.iter().position(|w| w == v).expect("known var")],
                t => *t,
            })
            .collect(),
    }
}

/// Distinct variables of `goals` in ascending order.
pub fn query_vars(goals: &[Literal]) -> Vec<Var> {
    goals
        .iter()
        .flat_map(|l| l.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// The ground extension of `facts` plus one non-recursive `rule` whose body
/// only uses fact predicates, by enumerating every ground instance of it.
pub fn materialise(facts: &[Literal], rule: Option<&Clause>, domain: &[Term]) -> HashSet<Literal> {
    let mut ext: HashSet<Literal> = facts.iter().cloned().collect();
    if let Some(r) = rule {
        let vars: Vec<Var> = r.vars_in_order();
        let mut derived = Vec::new();
        for values in assignments(vars.len(), domain) {
            if r.body
                .iter()
                .all(|l| ext.contains(&ground(l, &vars, &values)))
            {
                derived.push(ground(&r.head, &vars, &values));
            }
        }
        ext.extend(derived);
    }
    ext
}

/// Answers to a conjunctive query by exhaustive ground substitution: one row
/// of values per satisfying assignment of [`query_vars`].
pub fn solve_oracle(
    goals: &[Literal],
    ext: &HashSet<Literal>,
    domain: &[Term],
) -> BTreeSet<Vec<Term>> {
    let vars = query_vars(goals);
    assignments(vars.len(), domain)
        .into_iter()
        .filter(|values| {
            goals
                .iter()
                .all(|g| ext.contains(&ground(g, &vars, values)))
        })
        .collect()
}

/// Renumber variables by first occurrence, head first.
pub fn renumber(c: &Clause) -> Clause {
    let mut map: HashMap<Var, Var> = HashMap::new();
    let mut rename = |l: &Literal| Literal {
        pred: l.pred,
        args: l
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => {
                    let n = map.len() as u32;
                    Term::Var(*map.entry(*v).or_insert(Var(n)))
                }
                t => *t,
            })
            .collect(),
    };
    let head = rename(&c.head);
    let body = c.body.iter().map(&mut rename).collect();
    Clause::new(head, body)
}

/// Layered saturation of `seed` by exhaustive query enumeration.
///
/// Each layer re-asks every mode under every filling of its `+` positions by
/// the (constant, type) pairs known at the start of the layer, reading the
/// matching facts of `facts` in insertion order and keeping the first
/// `recall` of them. New literals are appended in discovery order.
pub fn bottom_oracle(
    seed: &Literal,
    facts: &[Literal],
    modes: &ModeSet,
    depth: usize,
    recall_cap: usize,
) -> Clause {
    let mut pairs: Vec<(Term, Sym)> = Vec::new();
    let var_of = |pairs: &mut Vec<(Term, Sym)>, c: Term, ty: Sym| -> Term {
        let i = match pairs.iter().position(|p| *p == (c, ty)) {
            Some(i) => i,
            None => {
                pairs.push((c, ty));
                pairs.len() - 1
            }
        };
        Term::Var(Var(i as u32))
    };
    let head_args = modes
        .head
        .args
        .iter()
        .zip(&seed.args)
        .map(|(m, c)| match m.mode {
            ArgMode::Constant => *c,
            _ => var_of(&mut pairs, *c, m.ty),
        })
        .collect();
    let head = Literal {
        pred: seed.pred,
        args: head_args,
    };
    let mut body: Vec<Literal> = Vec::new();
    for _ in 0..depth {
        let known = pairs.len();
        for decl in &modes.body {
            let inputs: Vec<usize> = (0..decl.args.len())
                .filter(|&k| decl.args[k].mode == ArgMode::Input)
                .collect();
            let limit = match decl.recall {
                Recall::Bounded(n) => n,
                Recall::Unbounded => recall_cap,
            };
            let domains: Vec<Term> = (0..known).map(|i| Term::Int(i as i64)).collect();
            for filling in assignments(inputs.len(), &domains) {
                let filling: Vec<usize> = filling
                    .iter()
                    .map(|t| match t {
                        Term::Int(i) => *i as usize,
                        _ => unreachable!(),
                    })
                    .collect();
                if inputs
                    .iter()
                    .zip(&filling)
                    .any(|(&k, &i)| pairs[i].1 != decl.args[k].ty)
                {
                    continue;
                }
                let matching: Vec<&Literal> = facts
                    .iter()
                    .filter(|f| {
                        f.pred == decl.pred
                            && f.args.len() == decl.args.len()
                            && inputs
                                .iter()
                                .zip(&filling)
                                .all(|(&k, &i)| f.args[k] == pairs[i].0)
                    })
                    .take(limit)
                    .collect();
                for f in matching {
                    let mut next_input = filling.iter();
                    let args = decl
                        .args
                        .iter()
                        .zip(&f.args)
                        .map(|(m, v)| match m.mode {
                            ArgMode::Input => Term::Var(Var(*next_input.next().unwrap() as u32)),
                            ArgMode::Constant => *v,
                            ArgMode::Output => var_of(&mut pairs, *v, m.ty),
                        })
                        .collect();
                    let lit = Literal {
                        pred: decl.pred,
                        args,
                    };
                    if !body.contains(&lit) {
                        body.push(lit);
                    }
                }
            }
        }
    }
    renumber(&Clause::new(head, body))
}

/// Linkedness from its definition: a literal is linked when some body mode
/// it fits has all `+` variables supplied by the head inputs or by outputs
/// of earlier linked literals.
pub fn is_linked(c: &Clause, modes: &ModeSet) -> bool {
    let mut avail: HashSet<Var> = modes
        .head
        .args
        .iter()
        .zip(&c.head.args)
        .filter(|(m, _)| m.mode == ArgMode::Input)
        .filter_map(|(_, t)| t.as_var())
        .collect();
    for lit in &c.body {
        let fits: Vec<_> = modes
            .body
            .iter()
            .filter(|m| {
                m.pred == lit.pred
                    && m.args.len() == lit.args.len()
                    && m.args.iter().zip(&lit.args).all(|(a, t)| match a.mode {
                        ArgMode::Constant => t.is_ground(),
                        _ => matches!(t, Term::Var(_)),
                    })
            })
            .filter(|m| {
                m.args
                    .iter()
                    .zip(&lit.args)
                    .filter(|(a, _)| a.mode == ArgMode::Input)
                    .all(|(_, t)| t.as_var().is_some_and(|v| avail.contains(&v)))
            })
            .collect();
        if fits.is_empty() {
            return false;
        }
        for m in fits {
            for (a, t) in m.args.iter().zip(&lit.args) {
                if a.mode == ArgMode::Output {
                    avail.insert(t.as_var().unwrap());
                }
            }
        }
    }
    true
}

/// The subset of `c`'s body that covers `e` and is linked, choosing the
/// lexicographically greatest membership vector (earlier literals first).
/// Exhaustive over all `2^n` subsets.
pub fn armg_oracle(
    c: &Clause,
    e: &Literal,
    kb: &KnowledgeBase,
    modes: &ModeSet,
    bounds: SolveBounds,
) -> Option<Clause> {
    let n = c.body.len();
    assert!(n <= 16, "oracle is exponential");
    let mut prover = Prover::new(kb, bounds);
    // bit n-1-i stands for literal i, so descending numbers are descending lex order
    for mask in (0..1u32 << n).rev() {
        let body: Vec<Literal> = (0..n)
            .filter(|i| mask & (1 << (n - 1 - i)) != 0)
            .map(|i| c.body[i].clone())
            .collect();
        let cand = c.with_body(body);
        if is_linked(&cand, modes) && prover.covers(&cand, e).unwrap() {
            return Some(cand);
        }
    }
    None
}

/// True when `small` is a sub-multiset of `big`.
pub fn sub_multiset(small: &[Literal], big: &[Literal]) -> bool {
    let mut counts: HashMap<&Literal, i64> = HashMap::new();
    for l in big {
        *counts.entry(l).or_default() += 1;
    }
    small.iter().all(|l| {
        let c = counts.entry(l).or_default();
        *c -= 1;
        *c >= 0
    })
}

/// Mann-Whitney AUC by explicit pairwise comparison, as (numerator,
/// denominator) of twice the statistic over twice the pair count.
pub fn auc_pairs(scored: &[(u64, u64, bool)]) -> Option<(u128, u128)> {
    let pos: Vec<_> = scored.iter().filter(|s| s.2).collect();
    let neg: Vec<_> = scored.iter().filter(|s| !s.2).collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut twice = 0u128;
    for p in &pos {
        for n in &neg {
            // compare p.0/p.1 with n.0/n.1 by cross-multiplication
            let (l, r) = (p.0 as u128 * n.1 as u128, n.0 as u128 * p.1 as u128);
            twice += match l.cmp(&r) {
                std::cmp::Ordering::Greater => 2,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 0,
            };
        }
    }
    Some((twice, 2 * pos.len() as u128 * neg.len() as u128))
}
