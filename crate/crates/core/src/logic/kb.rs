//! Ground fact base with per-argument indexes plus non-recursive
//! intensional clauses.

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use super::syntax::{parse_program, Item, SyntaxError};
use super::term::{Clause, Literal, Sym, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: fact {fact} is not ground")]
    NonGround { line: usize, fact: String },
    #[error("line {line}: arity conflict {pred}/{expected} vs {pred}/{found}")]
    ArityConflict {
        line: usize,
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: '{pred}' is a builtin and cannot be defined")]
    BuiltinRedefined { line: usize, pred: String },
    #[error("line {line}: directives are not allowed in a fact base")]
    Directive { line: usize },
    #[error("line {line}: clause for {pred} makes the intensional predicates recursive")]
    Recursive { line: usize, pred: String },
}

#[derive(Debug, Default, Clone)]
struct PredIndex {
    arity: usize,
    facts: Vec<u32>,
    by_arg: Vec<FxHashMap<Term, Vec<u32>>>,
    clauses: Vec<u32>,
}

/// Immutable-after-construction knowledge base (facts + intensional clauses).
#[derive(Debug, Default, Clone)]
pub struct KnowledgeBase {
    facts: Vec<Literal>,
    fact_set: FxHashSet<Literal>,
    intensional: Vec<Clause>,
    preds: FxHashMap<Sym, PredIndex>,
}

static EMPTY: [u32; 0] = [];

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn facts(&self) -> &[Literal] {
        &self.facts
    }

    pub fn intensional(&self) -> &[Clause] {
        &self.intensional
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty() && self.intensional.is_empty()
    }

    pub fn contains(&self, fact: &Literal) -> bool {
        self.fact_set.contains(fact)
    }

    pub fn fact(&self, id: u32) -> &Literal {
        &self.facts[id as usize]
    }

    pub fn arity_of(&self, pred: Sym) -> Option<usize> {
        self.preds.get(&pred).map(|p| p.arity)
    }

    fn check_arity(&mut self, lit: &Literal, line: usize) -> Result<&mut PredIndex, KbError> {
        if lit.comparison().is_some() {
            return Err(KbError::BuiltinRedefined {
                line,
                pred: lit.pred.to_string(),
            });
        }
        let entry = self.preds.entry(lit.pred).or_insert_with(|| PredIndex {
            arity: lit.arity(),
            by_arg: vec![FxHashMap::default(); lit.arity()],
            ..Default::default()
        });
        if entry.arity != lit.arity() {
            return Err(KbError::ArityConflict {
                line,
                pred: lit.pred.to_string(),
                expected: entry.arity,
                found: lit.arity(),
            });
        }
        Ok(entry)
    }

    /// Add a ground fact. Duplicates are ignored; returns whether it was new.
    pub fn add_fact(&mut self, fact: Literal) -> Result<bool, KbError> {
        self.add_fact_at(fact, 0)
    }

    fn add_fact_at(&mut self, fact: Literal, line: usize) -> Result<bool, KbError> {
        if !fact.is_ground() {
            return Err(KbError::NonGround {
                line,
                fact: fact.to_string(),
            });
        }
        let id = self.facts.len() as u32;
        if self.fact_set.contains(&fact) {
            // still validate arity so conflicting duplicates cannot slip through
            self.check_arity(&fact, line)?;
            return Ok(false);
        }
        let entry = self.check_arity(&fact, line)?;
        entry.facts.push(id);
        for (pos, arg) in fact.args.iter().enumerate() {
            entry.by_arg[pos].entry(*arg).or_default().push(id);
        }
        self.fact_set.insert(fact.clone());
        self.facts.push(fact);
        Ok(true)
    }

    /// Add a clause: facts go to the fact base, rules to the intensional part.
    pub fn add_clause(&mut self, clause: Clause) -> Result<(), KbError> {
        self.add_clause_at(clause, 0)
    }

    fn add_clause_at(&mut self, clause: Clause, line: usize) -> Result<(), KbError> {
        if clause.body.is_empty() {
            return self.add_fact_at(clause.head, line).map(|_| ());
        }
        for lit in &clause.body {
            if lit.comparison().is_none() {
                self.check_arity(lit, line)?;
            }
        }
        let id = self.intensional.len() as u32;
        self.check_arity(&clause.head, line)?.clauses.push(id);
        let head = clause.head.pred;
        self.intensional.push(clause);
        if self.reaches(head, head) {
            self.intensional.pop();
            if let Some(p) = self.preds.get_mut(&head) {
                p.clauses.pop();
            }
            return Err(KbError::Recursive {
                line,
                pred: head.to_string(),
            });
        }
        Ok(())
    }

    /// Whether `target` is reachable from the bodies of `from`'s clauses.
    fn reaches(&self, from: Sym, target: Sym) -> bool {
        let mut stack = vec![from];
        let mut seen = FxHashSet::default();
        while let Some(p) = stack.pop() {
            let Some(idx) = self.preds.get(&p) else {
                continue;
            };
            for &c in &idx.clauses {
                for lit in &self.intensional[c as usize].body {
                    if lit.pred == target {
                        return true;
                    }
                    if seen.insert(lit.pred) {
                        stack.push(lit.pred);
                    }
                }
            }
        }
        false
    }

    /// Candidate facts for a goal whose argument `bound[i]` is `Some` when
    /// ground. Uses the most selective bound argument; order is insertion order.
    pub fn candidates(&self, pred: Sym, arity: usize, bound: &[Option<Term>]) -> &[u32] {
        let Some(idx) = self.preds.get(&pred) else {
            return &EMPTY;
        };
        if idx.arity != arity {
            return &EMPTY;
        }
        let mut best: &[u32] = &idx.facts;
        for (pos, b) in bound.iter().enumerate() {
            if let Some(t) = b {
                match idx.by_arg[pos].get(t) {
                    Some(list) => {
                        if list.len() < best.len() {
                            best = list;
                        }
                    }
                    None => return &EMPTY,
                }
            }
        }
        best
    }

    pub fn clauses_for(&self, pred: Sym, arity: usize) -> impl Iterator<Item = &Clause> {
        let ids: &[u32] = match self.preds.get(&pred) {
            Some(idx) if idx.arity == arity => &idx.clauses,
            _ => &EMPTY,
        };
        ids.iter().map(move |&c| &self.intensional[c as usize])
    }

    /// Facts of a predicate in insertion order.
    pub fn facts_of(&self, pred: Sym) -> impl Iterator<Item = &Literal> {
        let ids: &[u32] = self
            .preds
            .get(&pred)
            .map(|p| &p.facts[..])
            .unwrap_or(&EMPTY);
        ids.iter().map(move |&i| &self.facts[i as usize])
    }

    /// Every constant appearing in some fact, in first-appearance order.
    pub fn constants(&self) -> Vec<Term> {
        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        for f in &self.facts {
            for a in &f.args {
                if seen.insert(*a) {
                    out.push(*a);
                }
            }
        }
        out
    }

    /// Fact-file text: one fact per line, then the intensional clauses.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            let _ = writeln!(out, "{}", Clause::fact(f.clone()));
        }
        for c in &self.intensional {
            let _ = writeln!(out, "{c}");
        }
        out
    }
}

/// Parse fact-file text into a knowledge base.
pub fn parse_fact_base(text: &str) -> Result<KnowledgeBase, KbError> {
    let mut kb = KnowledgeBase::new();
    for item in parse_program(text)? {
        match item {
            Item::Clause { clause, line } => kb.add_clause_at(clause, line)?,
            Item::Directive { line, .. } => return Err(KbError::Directive { line }),
        }
    }
    Ok(kb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::parse_literal;

    #[test]
    fn single_fact() {
        let kb = parse_fact_base("t_next(t1, t2).").unwrap();
        assert_eq!(kb.len(), 1);
        assert_eq!(kb.arity_of(Sym::new("t_next")), Some(2));
    }

    #[test]
    fn empty_text_is_empty_kb() {
        let kb = parse_fact_base("").unwrap();
        assert!(kb.is_empty());
        assert_eq!(kb.to_text(), "");
    }

    #[test]
    fn arity_conflict_rejected() {
        let err = parse_fact_base("t_length(t1, 5).\nt_length(t1).").unwrap_err();
        assert_eq!(
            err,
            KbError::ArityConflict {
                line: 2,
                pred: "t_length".into(),
                expected: 2,
                found: 1
            }
        );
        assert_eq!(
            err.to_string(),
            "line 2: arity conflict t_length/2 vs t_length/1"
        );
    }

    #[test]
    fn non_ground_fact_rejected() {
        assert!(matches!(
            parse_fact_base("p(X)."),
            Err(KbError::NonGround { line: 1, .. })
        ));
    }

    #[test]
    fn recursion_rejected() {
        let err = parse_fact_base("p(X) :- q(X).\nq(X) :- p(X).").unwrap_err();
        assert!(matches!(err, KbError::Recursive { line: 2, .. }));
    }

    #[test]
    fn index_returns_exactly_matching() {
        let kb = parse_fact_base("e(a,b). e(a,c). e(b,c). f(a).").unwrap();
        let ids = kb.candidates(Sym::new("e"), 2, &[Some(Term::constant("a")), None]);
        let got: Vec<String> = ids.iter().map(|&i| kb.fact(i).to_string()).collect();
        assert_eq!(got, vec!["e(a,b)", "e(a,c)"]);
        let ids = kb.candidates(Sym::new("e"), 2, &[None, Some(Term::constant("c"))]);
        assert_eq!(ids.len(), 2);
        assert!(kb
            .candidates(Sym::new("e"), 2, &[Some(Term::constant("z")), None])
            .is_empty());
        assert!(kb.contains(&parse_literal("f(a)").unwrap()));
    }

    #[test]
    fn text_round_trip() {
        let text = "t_stem(t1,\"Myron\").\nt_length(t1,5).\ntok_length(A,short) :- token(A), t_length(A,B), B =< 5.\n";
        let kb = parse_fact_base(text).unwrap();
        assert_eq!(kb.to_text(), text);
    }
}
