//! Bottom-up rule induction: ARMG generalisation under a beam, negative-based
//! reduction, clause scoring and the covering loop that assembles a theory.

mod armg;
mod coverage;
mod learn;
mod reduce;
mod theory;

pub use armg::{armg, best_armg};
pub use coverage::{CoverSet, Evaluator};
pub use learn::learn;
pub use reduce::negative_based_reduction;
pub use theory::{parse_theory, Theory, TheoryError, TheoryRule};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::logic::solve::{CoverError, SolveBounds};
use crate::logic::term::Clause;
use crate::modes::{BottomError, SaturationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalFn {
    Coverage,
    Precision,
    Laplace,
}

impl EvalFn {
    pub fn score(self, pos: usize, neg: usize) -> f64 {
        let (p, n) = (pos as f64, neg as f64);
        match self {
            EvalFn::Coverage => p - n,
            EvalFn::Precision if pos + neg == 0 => 0.0,
            EvalFn::Precision => p / (p + n),
            EvalFn::Laplace => (p + 1.0) / (p + n + 2.0),
        }
    }
}

impl fmt::Display for EvalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalFn::Coverage => "coverage",
            EvalFn::Precision => "precision",
            EvalFn::Laplace => "laplace",
        })
    }
}

impl FromStr for EvalFn {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "coverage" => Ok(EvalFn::Coverage),
            "precision" => Ok(EvalFn::Precision),
            "laplace" => Ok(EvalFn::Laplace),
            _ => Err(format!(
                "unknown evalfn '{s}' (coverage, precision, laplace)"
            )),
        }
    }
}

/// Upper bound on the negatives a rule may cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLimit {
    /// Maximum fraction of covered examples that are negative.
    Fraction(f64),
    /// Maximum absolute number of covered negatives.
    Count(usize),
}

impl NoiseLimit {
    pub fn allows(self, pos: usize, neg: usize) -> bool {
        match self {
            NoiseLimit::Fraction(f) => neg as f64 <= f * (pos + neg) as f64 + EPS,
            NoiseLimit::Count(k) => neg <= k,
        }
    }
}

impl fmt::Display for NoiseLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseLimit::Fraction(x) => write!(f, "{x}"),
            NoiseLimit::Count(k) => write!(f, "count:{k}"),
        }
    }
}

impl FromStr for NoiseLimit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(k) = s.strip_prefix("count:") {
            return k
                .parse()
                .map(NoiseLimit::Count)
                .map_err(|_| format!("bad noise count '{k}'"));
        }
        match s.parse::<f64>() {
            Ok(x) if (0.0..=1.0).contains(&x) => Ok(NoiseLimit::Fraction(x)),
            _ => Err(format!(
                "noise must be a fraction in [0,1] or count:N, got '{s}'"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoryConstruction {
    Incremental,
    Global,
}

impl fmt::Display for TheoryConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoryConstruction::Incremental => "incremental",
            TheoryConstruction::Global => "global",
        })
    }
}

impl FromStr for TheoryConstruction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "incremental" => Ok(TheoryConstruction::Incremental),
            "global" => Ok(TheoryConstruction::Global),
            _ => Err(format!(
                "unknown theory construction '{s}' (incremental, global)"
            )),
        }
    }
}

/// Tolerance for the fractional acceptance thresholds.
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnParams {
    pub depth_i: usize,
    pub recall_cap: usize,
    pub beam_width: usize,
    pub sample_size: usize,
    pub evalfn: EvalFn,
    pub minpos: usize,
    pub minprec: f64,
    pub noise: NoiseLimit,
    pub theory_construction: TheoryConstruction,
    pub rng_seed: u64,
    pub bounds: SolveBounds,
}

impl Default for LearnParams {
    fn default() -> Self {
        LearnParams {
            depth_i: 3,
            recall_cap: 100,
            beam_width: 5,
            sample_size: 10,
            evalfn: EvalFn::Coverage,
            minpos: 3,
            minprec: 0.5,
            noise: NoiseLimit::Fraction(0.3),
            theory_construction: TheoryConstruction::Global,
            rng_seed: 0,
            bounds: SolveBounds::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse '{value}'"))
}

impl LearnParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.beam_width == 0 || self.sample_size == 0 || self.minpos == 0 {
            return Err("beam_width, sample_size and minpos must be at least 1".into());
        }
        if self.depth_i == 0 || self.recall_cap == 0 {
            return Err("depth_i and recall_cap must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.minprec) {
            return Err("minprec must be in [0,1]".into());
        }
        if let NoiseLimit::Fraction(f) = self.noise {
            if !(0.0..=1.0).contains(&f) {
                return Err("noise must be in [0,1]".into());
            }
        }
        self.bounds.validate()
    }

    pub fn saturation(&self) -> SaturationParams {
        SaturationParams {
            depth_i: self.depth_i,
            recall_cap: self.recall_cap,
            bounds: self.bounds,
        }
    }

    /// Set one parameter from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "depth_i" => self.depth_i = parse_num(key, value)?,
            "recall_cap" => self.recall_cap = parse_num(key, value)?,
            "beam_width" | "beam" => self.beam_width = parse_num(key, value)?,
            "sample_size" | "sample" => self.sample_size = parse_num(key, value)?,
            "evalfn" => self.evalfn = value.parse()?,
            "minpos" => self.minpos = parse_num(key, value)?,
            "minprec" => self.minprec = parse_num(key, value)?,
            "noise" => self.noise = value.parse()?,
            "theory_construction" | "construction" => self.theory_construction = value.parse()?,
            "rng_seed" | "seed" => self.rng_seed = parse_num(key, value)?,
            "max_depth" => self.bounds.max_depth = parse_num(key, value)?,
            "max_solutions" => self.bounds.max_solutions = parse_num(key, value)?,
            "max_steps" => self.bounds.max_steps = parse_num(key, value)?,
            _ => return Err(format!("unknown learning parameter '{key}'")),
        }
        Ok(())
    }

    pub fn to_kv(&self) -> Vec<(&'static str, String)> {
        vec![
            ("depth_i", self.depth_i.to_string()),
            ("recall_cap", self.recall_cap.to_string()),
            ("beam_width", self.beam_width.to_string()),
            ("sample_size", self.sample_size.to_string()),
            ("evalfn", self.evalfn.to_string()),
            ("minpos", self.minpos.to_string()),
            ("minprec", self.minprec.to_string()),
            ("noise", self.noise.to_string()),
            ("theory_construction", self.theory_construction.to_string()),
            ("rng_seed", self.rng_seed.to_string()),
            ("max_depth", self.bounds.max_depth.to_string()),
            ("max_solutions", self.bounds.max_solutions.to_string()),
            ("max_steps", self.bounds.max_steps.to_string()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredClause {
    pub clause: Clause,
    pub pos_cov: usize,
    pub neg_cov: usize,
    pub score: f64,
}

impl ScoredClause {
    pub fn new(clause: Clause, pos_cov: usize, neg_cov: usize, evalfn: EvalFn) -> Self {
        ScoredClause {
            clause,
            pos_cov,
            neg_cov,
            score: evalfn.score(pos_cov, neg_cov),
        }
    }

    pub fn precision(&self) -> f64 {
        EvalFn::Precision.score(self.pos_cov, self.neg_cov)
    }

    /// Ranking used by the beam: higher score, then more positives, then
    /// shorter body, then printed form.
    pub fn rank_cmp(&self, other: &ScoredClause) -> std::cmp::Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(other.pos_cov.cmp(&self.pos_cov))
            .then(self.clause.body.len().cmp(&other.clause.body.len()))
            .then_with(|| self.clause.to_string().cmp(&other.clause.to_string()))
    }
}

/// Score `c` against the examples.
pub fn clause_score(
    c: &Clause,
    pos: &[crate::logic::term::Literal],
    neg: &[crate::logic::term::Literal],
    kb: &crate::logic::kb::KnowledgeBase,
    evalfn: EvalFn,
    bounds: SolveBounds,
) -> Result<ScoredClause, CoverError> {
    let (p, n) = crate::logic::solve::coverage_counts(c, pos, neg, kb, bounds)?;
    Ok(ScoredClause::new(c.clone(), p, n, evalfn))
}

pub fn is_acceptable(sc: &ScoredClause, p: &LearnParams) -> bool {
    sc.score > 0.0
        && sc.pos_cov >= p.minpos
        && sc.precision() + EPS >= p.minprec
        && p.noise.allows(sc.pos_cov, sc.neg_cov)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InductionError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Bottom(#[from] BottomError),
    #[error("example {example} does not unify with the clause head {head}")]
    HeadMismatch { example: String, head: String },
    #[error("no positive examples")]
    NoPositives,
    #[error("invalid learning parameters: {0}")]
    Params(String),
}
