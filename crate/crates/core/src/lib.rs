//! Relational rule learning for binary relation extraction.
//!
//! The pipeline turns pre-parsed sentences into a Prolog-style fact base,
//! induces first-order extraction rules bottom-up (bottom clause, beam-searched
//! ARMG generalisation, negative-based reduction, covering loop) and evaluates
//! them with cross-validation and cross-corpus protocols.

pub mod apply;
pub mod corpus;
pub mod eval;
pub mod induction;
pub mod logic;
pub mod modes;
pub mod pipeline;
