//! Everything needed to go from a corpus to a fact base and a theory.

use thiserror::Error;

use crate::corpus::{
    emit_bk, generate_examples, parse_rules, BkError, Corpus, ReductionRule, Taxonomy, Thresholds,
    DEFAULT_RULES,
};
use crate::induction::{learn, InductionError, LearnParams, Theory};
use crate::logic::kb::{parse_fact_base, KbError, KnowledgeBase};
use crate::modes::ModeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Bk(#[from] BkError),
    #[error("generated background knowledge does not load: {0}")]
    Kb(#[from] KbError),
    #[error(transparent)]
    Induction(#[from] InductionError),
    #[error("corpus has relation instances but none of type '{0}'")]
    RelationMismatch(String),
}

/// Learning configuration shared by every protocol.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub relation: String,
    pub modes: ModeSet,
    pub taxonomy: Option<Taxonomy>,
    pub rules: Vec<ReductionRule>,
    pub thresholds: Thresholds,
    pub params: LearnParams,
}

impl Pipeline {
    /// Default modes, reduction rules, thresholds and parameters.
    pub fn new(relation: &str) -> Pipeline {
        Pipeline {
            relation: relation.to_string(),
            modes: ModeSet::default_for(relation),
            taxonomy: None,
            rules: parse_rules(DEFAULT_RULES).expect("default rules parse"),
            thresholds: Thresholds::default(),
            params: LearnParams::default(),
        }
    }

    pub fn bk_text(&self, c: &Corpus) -> Result<String, PipelineError> {
        Ok(emit_bk(
            c,
            self.taxonomy.as_ref(),
            &self.rules,
            &self.thresholds,
        )?)
    }

    pub fn background(&self, c: &Corpus) -> Result<KnowledgeBase, PipelineError> {
        Ok(parse_fact_base(&self.bk_text(c)?)?)
    }

    /// Fails when the corpus annotates relations but never this one.
    pub fn check_relation(&self, c: &Corpus) -> Result<(), PipelineError> {
        let mut any = false;
        for (_, s) in c.sentences() {
            for r in &s.relations {
                if r.relation == self.relation {
                    return Ok(());
                }
                any = true;
            }
        }
        if any {
            Err(PipelineError::RelationMismatch(self.relation.clone()))
        } else {
            Ok(())
        }
    }

    /// Learn a theory from a whole corpus with the given parameters.
    pub fn train_with(&self, c: &Corpus, params: &LearnParams) -> Result<Theory, PipelineError> {
        self.check_relation(c)?;
        let kb = self.background(c)?;
        let ex = generate_examples(c, &self.relation);
        if ex.pos.is_empty() {
            // nothing to learn from: the empty theory
            params.validate().map_err(InductionError::Params)?;
            return Ok(Theory {
                rules: Vec::new(),
                params: *params,
            });
        }
        Ok(learn(&ex.pos, &ex.neg, &kb, &self.modes, params)?)
    }

    pub fn train(&self, c: &Corpus) -> Result<Theory, PipelineError> {
        self.train_with(c, &self.params)
    }
}
