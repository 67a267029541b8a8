//! First-order terms, clauses, the indexed fact base and the resolution engine.

pub mod kb;
pub mod solve;
pub mod syntax;
pub mod term;
pub mod unify;

pub use kb::{parse_fact_base, KbError, KnowledgeBase};
pub use solve::{
    coverage_counts, covers, solve, CoverError, Prover, Solutions, SolveBounds, SolveError,
};
pub use syntax::{
    parse_clause, parse_literal, parse_program, parse_query, Item, SyntaxError, Tree,
};
pub use term::{Clause, Comparison, Literal, Sym, Term, Var};
pub use unify::{unify, Substitution};
