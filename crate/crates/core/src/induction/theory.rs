use std::fmt::Write as _;

use thiserror::Error;

use super::{LearnParams, ScoredClause};
use crate::logic::syntax::{parse_clause, parse_literal, SyntaxError};
use crate::logic::term::Literal;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRule {
    pub scored: ScoredClause,
    /// The positive example whose bottom clause the rule was generalised from.
    pub seed: Literal,
}

/// An ordered rule set with frozen training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub rules: Vec<TheoryRule>,
    pub params: LearnParams,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Syntax(SyntaxError),
}

impl Theory {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Theory file text: a params header, then each rule followed by its
    /// statistics comment.
    pub fn to_text(&self) -> String {
        let mut out = String::from("% params");
        for (k, v) in self.params.to_kv() {
            let _ = write!(out, " {k}={v}");
        }
        out.push('\n');
        for r in &self.rules {
            let s = &r.scored;
            let _ = writeln!(out, "{}", s.clause);
            let _ = writeln!(
                out,
                "% pos={} neg={} score={} seed={}",
                s.pos_cov, s.neg_cov, s.score, r.seed
            );
        }
        out
    }
}

fn format_err(line: usize, message: impl Into<String>) -> TheoryError {
    TheoryError::Format {
        line,
        message: message.into(),
    }
}

fn at_line(line: usize, e: SyntaxError) -> TheoryError {
    TheoryError::Syntax(SyntaxError {
        line,
        message: e.message,
    })
}

fn parse_stats(line: usize, text: &str) -> Result<(usize, usize, f64, Literal), TheoryError> {
    let rest = text.strip_prefix("% pos=").ok_or_else(|| {
        format_err(
            line,
            "expected '% pos=<n> neg=<m> score=<s> seed=<example>'",
        )
    })?;
    let (pos, rest) = rest
        .split_once(" neg=")
        .ok_or_else(|| format_err(line, "missing neg="))?;
    let (neg, rest) = rest
        .split_once(" score=")
        .ok_or_else(|| format_err(line, "missing score="))?;
    let (score, seed) = rest
        .split_once(" seed=")
        .ok_or_else(|| format_err(line, "missing seed="))?;
    let num = |s: &str, what: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format_err(line, format!("bad {what} count '{s}'")))
    };
    let score = score
        .trim()
        .parse::<f64>()
        .map_err(|_| format_err(line, format!("bad score '{score}'")))?;
    let seed = parse_literal(seed.trim()).map_err(|e| at_line(line, e))?;
    Ok((num(pos, "pos")?, num(neg, "neg")?, score, seed))
}

/// Parse text written by [`Theory::to_text`].
pub fn parse_theory(text: &str) -> Result<Theory, TheoryError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut params = LearnParams::default();
    let (n, header) = lines
        .next()
        .ok_or_else(|| format_err(1, "empty theory file"))?;
    let kv = header
        .strip_prefix("% params")
        .ok_or_else(|| format_err(n, "expected '% params ...' header"))?;
    for field in kv.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| format_err(n, format!("bad parameter '{field}'")))?;
        params.set(k, v).map_err(|m| format_err(n, m))?;
    }
    let mut rules = Vec::new();
    while let Some((n, rule_line)) = lines.next() {
        let clause = parse_clause(rule_line).map_err(|e| at_line(n, e))?;
        let (m, stats) = lines
            .next()
            .ok_or_else(|| format_err(n, "rule without statistics line"))?;
        let (pos_cov, neg_cov, score, seed) = parse_stats(m, stats)?;
        rules.push(TheoryRule {
            scored: ScoredClause {
                clause,
                pos_cov,
                neg_cov,
                score,
            },
            seed,
        });
    }
    Ok(Theory { rules, params })
}
