//! Depth-first SLD resolution over facts and non-recursive intensional
//! clauses, with integer comparison builtins and hard resource bounds.
//!
//! Order of answers: left-to-right goals, facts in insertion order before
//! intensional clauses in declaration order, depth first. Exhausting a bound
//! truncates the search and sets [`Solutions::truncated`]; it is never an error.

use rustc_hash::FxHashSet;
use smallvec::SmallVec;
use thiserror::Error;

use super::kb::KnowledgeBase;
use super::term::{Clause, Comparison, Literal, Term, Var};
use super::unify::{unify, Substitution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveBounds {
    /// Maximum nesting of intensional clause expansions.
    pub max_depth: usize,
    pub max_solutions: usize,
    /// Maximum number of resolution steps (candidate attempts).
    pub max_steps: u64,
}

impl Default for SolveBounds {
    fn default() -> Self {
        SolveBounds {
            max_depth: 12,
            max_solutions: 500,
            max_steps: 1_000_000,
        }
    }
}

impl SolveBounds {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_depth == 0 || self.max_solutions == 0 || self.max_steps == 0 {
            return Err("solve bounds must all be at least 1".into());
        }
        Ok(())
    }

    pub fn with_max_solutions(self, max_solutions: usize) -> Self {
        SolveBounds {
            max_solutions,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("builtin {op} called on non-integer or unbound argument: {goal}")]
    Builtin { op: &'static str, goal: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solutions {
    pub answers: Vec<Substitution>,
    pub truncated: bool,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

struct Frame<'a> {
    lits: &'a [Literal],
    /// Offset added to the variables of `lits` to reach store slots.
    offset: u32,
    depth: usize,
    parent: Option<&'a Frame<'a>>,
}

/// Resolution state: a binding store indexed by variable slot plus a trail.
pub(crate) struct Machine<'kb> {
    kb: &'kb KnowledgeBase,
    bounds: SolveBounds,
    store: Vec<Option<Term>>,
    trail: Vec<u32>,
    pub(crate) steps: u64,
    pub(crate) truncated: bool,
    error: Option<SolveError>,
}

impl<'kb> Machine<'kb> {
    pub(crate) fn new(kb: &'kb KnowledgeBase, bounds: SolveBounds) -> Self {
        Machine {
            kb,
            bounds,
            store: Vec::new(),
            trail: Vec::new(),
            steps: 0,
            truncated: false,
            error: None,
        }
    }

    /// Clear all state and reserve `vars` top-level variable slots.
    pub(crate) fn reset(&mut self, vars: u32) {
        self.store.clear();
        self.store.resize(vars as usize, None);
        self.trail.clear();
        self.steps = 0;
        self.truncated = false;
        self.error = None;
    }

    fn deref(&self, mut t: Term) -> Term {
        while let Term::Var(v) = t {
            match self.store.get(v.0 as usize).copied().flatten() {
                Some(next) => t = next,
                None => return t,
            }
        }
        t
    }

    fn shift(t: &Term, offset: u32) -> Term {
        match t {
            Term::Var(v) => Term::Var(Var(v.0 + offset)),
            t => *t,
        }
    }

    fn bind(&mut self, v: Var, t: Term) {
        self.store[v.0 as usize] = Some(t);
        self.trail.push(v.0);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.store[v as usize] = None;
        }
    }

    pub(crate) fn value(&self, v: Var) -> Term {
        self.deref(Term::Var(v))
    }

    /// Pre-bind a top-level variable (slot must exist).
    pub(crate) fn preset(&mut self, v: Var, t: Term) -> bool {
        let cur = self.deref(Term::Var(v));
        let t = self.deref(t);
        if cur == t {
            return true;
        }
        match (cur, t) {
            (Term::Var(a), t) | (t, Term::Var(a)) => {
                self.bind(a, t);
                true
            }
            _ => false,
        }
    }

    fn unify_terms(&mut self, a: Term, b: Term) -> bool {
        let a = self.deref(a);
        let b = self.deref(b);
        if a == b {
            return true;
        }
        match (a, b) {
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                self.bind(v, t);
                true
            }
            _ => false,
        }
    }

    /// Count one attempt; refuse (without counting) once the bound is spent.
    fn tick(&mut self) -> bool {
        if self.steps >= self.bounds.max_steps {
            self.truncated = true;
            false
        } else {
            self.steps += 1;
            true
        }
    }

    fn run(&mut self, frame: &Frame<'_>, k: &mut dyn FnMut(&mut Self) -> Flow) -> Flow {
        let Some((goal, rest_lits)) = frame.lits.split_first() else {
            return match frame.parent {
                Some(p) => self.run(p, k),
                None => k(self),
            };
        };
        let rest = Frame {
            lits: rest_lits,
            offset: frame.offset,
            depth: frame.depth,
            parent: frame.parent,
        };
        let off = frame.offset;

        if let Some(op) = goal.comparison() {
            if !self.tick() {
                return Flow::Stop;
            }
            let a = self.deref(Self::shift(&goal.args[0], off));
            let b = self.deref(Self::shift(&goal.args[1], off));
            return match (a, b) {
                (Term::Int(x), Term::Int(y)) => {
                    if op.holds(x, y) {
                        self.run(&rest, k)
                    } else {
                        Flow::Continue
                    }
                }
                _ => {
                    self.error = Some(builtin_error(op, goal));
                    Flow::Stop
                }
            };
        }

        let arity = goal.args.len();
        let mut bound: SmallVec<[Option<Term>; 6]> = SmallVec::new();
        for a in &goal.args {
            let t = self.deref(Self::shift(a, off));
            bound.push(if t.is_ground() { Some(t) } else { None });
        }
        let kb = self.kb;
        for &fid in kb.candidates(goal.pred, arity, &bound) {
            if !self.tick() {
                return Flow::Stop;
            }
            let fact = kb.fact(fid);
            let mark = self.trail.len();
            let mut ok = true;
            for (g, f) in goal.args.iter().zip(&fact.args) {
                if !self.unify_terms(Self::shift(g, off), *f) {
                    ok = false;
                    break;
                }
            }
            if ok && self.run(&rest, k) == Flow::Stop {
                self.undo(mark);
                return Flow::Stop;
            }
            self.undo(mark);
        }

        for clause in kb.clauses_for(goal.pred, arity) {
            if !self.tick() {
                return Flow::Stop;
            }
            if frame.depth + 1 > self.bounds.max_depth {
                self.truncated = true;
                continue;
            }
            let child_off = self.store.len() as u32;
            self.store
                .resize(child_off as usize + clause.var_span() as usize, None);
            let mark = self.trail.len();
            let mut ok = true;
            for (g, h) in goal.args.iter().zip(&clause.head.args) {
                if !self.unify_terms(Self::shift(g, off), Self::shift(h, child_off)) {
                    ok = false;
                    break;
                }
            }
            let flow = if ok {
                let child = Frame {
                    lits: &clause.body,
                    offset: child_off,
                    depth: frame.depth + 1,
                    parent: Some(&rest),
                };
                self.run(&child, k)
            } else {
                Flow::Continue
            };
            self.undo(mark);
            self.store.truncate(child_off as usize);
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    /// Enumerate proofs of `goals` (top-level variables, no offset), calling
    /// `on_answer` for each; it returns `false` to stop.
    pub(crate) fn prove(
        &mut self,
        goals: &[Literal],
        on_answer: &mut dyn FnMut(&mut Self) -> bool,
    ) -> Result<(), SolveError> {
        let frame = Frame {
            lits: goals,
            offset: 0,
            depth: 0,
            parent: None,
        };
        self.run(&frame, &mut |m| {
            if on_answer(m) {
                Flow::Continue
            } else {
                Flow::Stop
            }
        });
        match self.error.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Whether `goals` has at least one proof under the current bindings.
    pub(crate) fn provable(&mut self, goals: &[Literal]) -> Result<bool, SolveError> {
        let mut found = false;
        self.prove(goals, &mut |_| {
            found = true;
            false
        })?;
        Ok(found)
    }

    /// Length of the longest prefix of `body` that has a proof extending the
    /// current bindings.
    pub(crate) fn longest_provable_prefix(
        &mut self,
        body: &[Literal],
    ) -> Result<usize, SolveError> {
        let mut best = 0;
        self.prefix_from(body, 0, &mut best);
        match self.error.take() {
            Some(e) => Err(e),
            None => Ok(best),
        }
    }

    fn prefix_from(&mut self, body: &[Literal], i: usize, best: &mut usize) -> Flow {
        if i > *best {
            *best = i;
        }
        if i == body.len() {
            return Flow::Stop;
        }
        let frame = Frame {
            lits: &body[i..i + 1],
            offset: 0,
            depth: 0,
            parent: None,
        };
        self.run(&frame, &mut |m| m.prefix_from(body, i + 1, best))
    }
}

fn builtin_error(op: Comparison, goal: &Literal) -> SolveError {
    SolveError::Builtin {
        op: op.symbol(),
        goal: goal.to_string(),
    }
}

fn goal_var_span(goals: &[Literal]) -> u32 {
    goals
        .iter()
        .flat_map(Literal::vars)
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0)
}

/// Every substitution (up to `bounds.max_solutions`, duplicates removed)
/// under which all `goals` are provable.
pub fn solve(
    goals: &[Literal],
    kb: &KnowledgeBase,
    theta0: &Substitution,
    bounds: SolveBounds,
) -> Result<Solutions, SolveError> {
    let mut span = goal_var_span(goals);
    for (v, t) in theta0.iter() {
        span = span.max(v.0 + 1);
        if let Term::Var(w) = t {
            span = span.max(w.0 + 1);
        }
    }
    let mut m = Machine::new(kb, bounds);
    m.reset(span);
    for (v, t) in theta0.iter() {
        m.preset(*v, *t);
    }
    let vars: Vec<Var> = (0..span).map(Var).collect();
    let mut seen: FxHashSet<Vec<Term>> = FxHashSet::default();
    let mut answers = Vec::new();
    let mut hit_cap = false;
    m.prove(goals, &mut |m| {
        let row: Vec<Term> = vars.iter().map(|v| m.value(*v)).collect();
        if seen.insert(row.clone()) {
            let sub: Substitution = vars
                .iter()
                .zip(row)
                .filter(|(v, t)| *t != Term::Var(**v))
                .map(|(v, t)| (*v, t))
                .collect();
            answers.push(sub);
            if answers.len() >= bounds.max_solutions {
                hit_cap = true;
                return false;
            }
        }
        true
    })?;
    Ok(Solutions {
        answers,
        truncated: m.truncated || hit_cap,
        steps: m.steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("example {example} does not match the rule head predicate {head}")]
    PredicateMismatch { example: String, head: String },
    #[error("example {0} is not ground")]
    NonGround(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Reusable coverage tester. Holds a resolution machine so repeated tests
/// against the same knowledge base do not reallocate.
pub struct Prover<'kb> {
    machine: Machine<'kb>,
}

impl<'kb> Prover<'kb> {
    pub fn new(kb: &'kb KnowledgeBase, bounds: SolveBounds) -> Self {
        Prover {
            machine: Machine::new(kb, bounds),
        }
    }

    /// Bind the rule head to `example`; false when they do not unify.
    fn bind_head(&mut self, rule: &Clause, example: &Literal) -> Result<bool, CoverError> {
        if rule.head.key() != example.key() {
            return Err(CoverError::PredicateMismatch {
                example: example.to_string(),
                head: format!("{}/{}", rule.head.pred, rule.head.arity()),
            });
        }
        if !example.is_ground() {
            return Err(CoverError::NonGround(example.to_string()));
        }
        self.machine.reset(rule.var_span());
        for (h, e) in rule.head.args.iter().zip(&example.args) {
            let ok = match h {
                Term::Var(v) => self.machine.preset(*v, *e),
                t => t == e,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn covers(&mut self, rule: &Clause, example: &Literal) -> Result<bool, CoverError> {
        if !self.bind_head(rule, example)? {
            return Ok(false);
        }
        Ok(self.machine.provable(&rule.body)?)
    }

    /// Number of leading body literals jointly provable for `example`
    /// (`None` when the head does not match).
    pub fn provable_prefix(
        &mut self,
        rule: &Clause,
        example: &Literal,
    ) -> Result<Option<usize>, CoverError> {
        if !self.bind_head(rule, example)? {
            return Ok(None);
        }
        Ok(Some(self.machine.longest_provable_prefix(&rule.body)?))
    }

    pub fn steps(&self) -> u64 {
        self.machine.steps
    }

    pub fn truncated(&self) -> bool {
        self.machine.truncated
    }
}

/// True iff the rule head unifies with the ground `example` and the body is
/// provable under that binding.
pub fn covers(
    rule: &Clause,
    example: &Literal,
    kb: &KnowledgeBase,
    bounds: SolveBounds,
) -> Result<bool, CoverError> {
    Prover::new(kb, bounds).covers(rule, example)
}

/// `(positives covered, negatives covered)`.
pub fn coverage_counts(
    rule: &Clause,
    pos: &[Literal],
    neg: &[Literal],
    kb: &KnowledgeBase,
    bounds: SolveBounds,
) -> Result<(usize, usize), CoverError> {
    let mut prover = Prover::new(kb, bounds);
    let mut count = |exs: &[Literal]| -> Result<usize, CoverError> {
        let mut n = 0;
        for e in exs {
            if prover.covers(rule, e)? {
                n += 1;
            }
        }
        Ok(n)
    };
    let p = count(pos)?;
    let n = count(neg)?;
    Ok((p, n))
}

/// Unify-then-solve reference used by tests of the indexed prover.
pub fn covers_by_solve(
    rule: &Clause,
    example: &Literal,
    kb: &KnowledgeBase,
    bounds: SolveBounds,
) -> Result<bool, CoverError> {
    if rule.head.key() != example.key() {
        return Err(CoverError::PredicateMismatch {
            example: example.to_string(),
            head: format!("{}/{}", rule.head.pred, rule.head.arity()),
        });
    }
    match unify(&rule.head, example, &Substitution::new()) {
        None => Ok(false),
        Some(theta) => Ok(
            !solve(&rule.body, kb, &theta, bounds.with_max_solutions(1))?
                .answers
                .is_empty(),
        ),
    }
}
