//! Most-specific clause construction by layered saturation.

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use super::{ArgMode, ModeDecl, ModeSet};
use crate::logic::kb::KnowledgeBase;
use crate::logic::solve::{solve, SolveBounds, SolveError};
use crate::logic::term::{Clause, Literal, Sym, Term, Var};
use crate::logic::unify::Substitution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaturationParams {
    /// Number of saturation layers.
    pub depth_i: usize,
    /// Solutions taken per query for a `*` recall.
    pub recall_cap: usize,
    pub bounds: SolveBounds,
}

impl Default for SaturationParams {
    fn default() -> Self {
        SaturationParams {
            depth_i: 3,
            recall_cap: 100,
            bounds: SolveBounds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BottomError {
    #[error("seed {seed} does not match the head mode {pred}/{arity}")]
    HeadMismatch {
        seed: String,
        pred: String,
        arity: usize,
    },
    #[error("seed {0} is not ground")]
    NonGround(String),
    #[error("seed constant {constant} has no {ty}/1 typing fact")]
    Untyped { constant: String, ty: String },
    #[error("invalid saturation parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

struct Pairs {
    vars: FxHashMap<(Term, Sym), Var>,
    list: Vec<(Term, Sym)>,
}

impl Pairs {
    fn var(&mut self, c: Term, ty: Sym) -> Var {
        let next = Var(self.list.len() as u32);
        *self.vars.entry((c, ty)).or_insert_with(|| {
            self.list.push((c, ty));
            next
        })
    }
}

/// Build the bottom clause of `seed`.
///
/// Variables stand for (constant, type) pairs. Layer `d` queries each body
/// mode with its `+` positions filled by pairs known before layer `d`; only
/// fillings that use a pair first seen in layer `d-1` are queried, the rest
/// were already asked. Literal order is (layer, mode order, filling order,
/// solution order) and duplicates are dropped.
pub fn bottom_clause(
    seed: &Literal,
    kb: &KnowledgeBase,
    modes: &ModeSet,
    sp: &SaturationParams,
) -> Result<Clause, BottomError> {
    if sp.depth_i == 0 || sp.recall_cap == 0 {
        return Err(BottomError::Params(
            "depth_i and recall_cap must be at least 1".into(),
        ));
    }
    sp.bounds.validate().map_err(BottomError::Params)?;
    let hm = &modes.head;
    if seed.pred != hm.pred || seed.arity() != hm.args.len() {
        return Err(BottomError::HeadMismatch {
            seed: seed.to_string(),
            pred: hm.pred.to_string(),
            arity: hm.args.len(),
        });
    }
    if !seed.is_ground() {
        return Err(BottomError::NonGround(seed.to_string()));
    }

    let mut pairs = Pairs {
        vars: FxHashMap::default(),
        list: Vec::new(),
    };
    let mut head_args = Vec::with_capacity(seed.arity());
    for (m, c) in hm.args.iter().zip(&seed.args) {
        if m.mode == ArgMode::Constant {
            head_args.push(*c);
            continue;
        }
        if !kb.contains(&Literal {
            pred: m.ty,
            args: vec![*c],
        }) {
            return Err(BottomError::Untyped {
                constant: c.to_string(),
                ty: m.ty.to_string(),
            });
        }
        head_args.push(Term::Var(pairs.var(*c, m.ty)));
    }
    let head = Literal {
        pred: seed.pred,
        args: head_args,
    };

    let mut body = Vec::new();
    let mut seen_lits = FxHashSet::default();
    // pairs with index in [layer_start, known) were introduced by the previous layer
    let mut layer_start = 0;
    for _ in 0..sp.depth_i {
        let known = pairs.list.len();
        if layer_start == known {
            break;
        }
        for decl in &modes.body {
            for filling in fillings(decl, &pairs.list[..known], layer_start) {
                query_mode(decl, &filling, kb, sp, &mut pairs, &mut |lit| {
                    if seen_lits.insert(lit.clone()) {
                        body.push(lit);
                    }
                })?;
            }
        }
        layer_start = known;
    }
    Ok(Clause::new(head, body).canonical())
}

/// Every assignment of known pair indices to the `+` positions of `decl`, in
/// lexicographic order, that uses at least one index `>= fresh_from`.
fn fillings(decl: &ModeDecl, known: &[(Term, Sym)], fresh_from: usize) -> Vec<Vec<usize>> {
    let choices: Vec<Vec<usize>> = decl
        .args
        .iter()
        .filter(|m| m.mode == ArgMode::Input)
        .map(|m| {
            known
                .iter()
                .enumerate()
                .filter(|(_, (_, ty))| *ty == m.ty)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(choices.len());
    fn rec(
        choices: &[Vec<usize>],
        fresh_from: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = current.len();
        if k == choices.len() {
            if current.iter().any(|&i| i >= fresh_from) {
                out.push(current.clone());
            }
            return;
        }
        for &i in &choices[k] {
            current.push(i);
            rec(choices, fresh_from, current, out);
            current.pop();
        }
    }
    rec(&choices, fresh_from, &mut current, &mut out);
    out
}

fn query_mode(
    decl: &ModeDecl,
    filling: &[usize],
    kb: &KnowledgeBase,
    sp: &SaturationParams,
    pairs: &mut Pairs,
    emit: &mut dyn FnMut(Literal),
) -> Result<(), BottomError> {
    let mut inputs = filling.iter();
    let mut next_var = 0u32;
    let mut pattern = Vec::with_capacity(decl.args.len());
    for m in &decl.args {
        pattern.push(match m.mode {
            ArgMode::Input => pairs.list[*inputs.next().expect("one index per input")].0,
            ArgMode::Output | ArgMode::Constant => {
                next_var += 1;
                Term::var(next_var - 1)
            }
        });
    }
    let goal = Literal {
        pred: decl.pred,
        args: pattern,
    };
    let bounds = sp
        .bounds
        .with_max_solutions(decl.recall.limit(sp.recall_cap));
    let sols = solve(
        std::slice::from_ref(&goal),
        kb,
        &Substitution::new(),
        bounds,
    )?;
    for theta in &sols.answers {
        let values: Vec<Term> = goal.args.iter().map(|t| theta.resolve(t)).collect();
        if !values.iter().all(Term::is_ground) {
            continue;
        }
        let mut inputs = filling.iter();
        let args = decl
            .args
            .iter()
            .zip(values)
            .map(|(m, value)| match m.mode {
                ArgMode::Input => Term::Var(Var(*inputs.next().expect("input") as u32)),
                ArgMode::Constant => value,
                ArgMode::Output => Term::Var(pairs.var(value, m.ty)),
            })
            .collect();
        emit(Literal {
            pred: decl.pred,
            args,
        });
    }
    Ok(())
}
