use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    auc, best_rule, kfold, prf, round4, to_f64, ConfusionCounts, EvalError, Frac, Metrics,
};
use crate::corpus::{candidates, Corpus};
use crate::induction::{LearnParams, Theory};
use crate::logic::solve::Prover;
use crate::pipeline::Pipeline;

#[derive(Debug, Clone, PartialEq)]
pub struct FoldReport {
    pub fold: usize,
    pub train_docs: usize,
    pub test_docs: usize,
    pub rules: usize,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
    /// Wall-clock time of the fold. Not part of the written report, which
    /// must be reproducible byte for byte.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub protocol: &'static str,
    pub relation: String,
    pub k: usize,
    pub rng_seed: u64,
    pub params: LearnParams,
    pub folds: Vec<FoldReport>,
    /// Sum of the fold counts; AUC over the pooled test scores.
    pub pooled_counts: ConfusionCounts,
    pub pooled: Metrics,
    /// Mean of the per-fold values; AUC averages the folds where it is defined.
    pub macro_avg: Metrics,
}

struct Outcome {
    counts: ConfusionCounts,
    scored: Vec<(Frac, bool)>,
}

/// Score every candidate pair of `test` with `theory`.
fn evaluate(pipe: &Pipeline, theory: &Theory, test: &Corpus) -> Result<Outcome, EvalError> {
    let kb = pipe.background(test)?;
    let cands = candidates(test, &pipe.relation);
    let scored: Vec<(Frac, bool)> = cands
        .par_iter()
        .map_init(
            || Prover::new(&kb, theory.params.bounds),
            |prover, c| {
                let conf = best_rule(theory, prover, &c.literal)?
                    .map_or(Frac::from_integer(0), |(_, conf)| conf);
                Ok((conf, c.gold))
            },
        )
        .collect::<Result<_, EvalError>>()?;
    let mut counts = ConfusionCounts::default();
    for &(conf, gold) in &scored {
        counts.record(conf > Frac::from_integer(0), gold);
    }
    Ok(Outcome { counts, scored })
}

fn metrics(o: &Outcome) -> Metrics {
    Metrics {
        auc: auc(&o.scored).ok(),
        ..prf(o.counts)
    }
}

fn run_fold(
    pipe: &Pipeline,
    fold: usize,
    train: &Corpus,
    test: &Corpus,
    params: &LearnParams,
) -> Result<(FoldReport, Outcome), EvalError> {
    let start = Instant::now();
    let theory = pipe.train_with(train, params)?;
    let outcome = evaluate(pipe, &theory, test)?;
    let report = FoldReport {
        fold,
        train_docs: train.documents.len(),
        test_docs: test.documents.len(),
        rules: theory.len(),
        counts: outcome.counts,
        metrics: metrics(&outcome),
        seconds: start.elapsed().as_secs_f64(),
    };
    log::info!(
        "fold {fold}: {} rules, {} ({:.2}s)",
        report.rules,
        report.metrics,
        report.seconds
    );
    Ok((report, outcome))
}

fn assemble(
    protocol: &'static str,
    pipe: &Pipeline,
    k: usize,
    rng_seed: u64,
    results: Vec<(FoldReport, Outcome)>,
) -> Report {
    let mut pooled_counts = ConfusionCounts::default();
    let mut all = Vec::new();
    let mut folds = Vec::with_capacity(results.len());
    for (f, o) in results {
        pooled_counts = pooled_counts + o.counts;
        all.extend(o.scored);
        folds.push(f);
    }
    let n = folds.len() as u64;
    let mean = |get: &dyn Fn(&Metrics) -> Frac| -> Frac {
        folds.iter().map(|f| get(&f.metrics)).sum::<Frac>() / Frac::from_integer(n.max(1))
    };
    let aucs: Vec<Frac> = folds.iter().filter_map(|f| f.metrics.auc).collect();
    let macro_avg = Metrics {
        precision: mean(&|m| m.precision),
        recall: mean(&|m| m.recall),
        f1: mean(&|m| m.f1),
        auc: (!aucs.is_empty())
            .then(|| aucs.iter().sum::<Frac>() / Frac::from_integer(aucs.len() as u64)),
    };
    Report {
        protocol,
        relation: pipe.relation.clone(),
        k,
        rng_seed,
        params: pipe.params,
        folds,
        pooled: Metrics {
            auc: auc(&all).ok(),
            ..prf(pooled_counts)
        },
        pooled_counts,
        macro_avg,
    }
}

/// Document-level k-fold cross-validation. Fold `f` learns with
/// `rng_seed + f` as its generator seed.
pub fn cross_validate(
    c: &Corpus,
    pipe: &Pipeline,
    k: usize,
    rng_seed: u64,
) -> Result<Report, EvalError> {
    pipe.check_relation(c)?;
    let plan = kfold(c.documents.len(), k, rng_seed)?;
    let results = (0..k)
        .into_par_iter()
        .map(|f| {
            let params = LearnParams {
                rng_seed: pipe.params.rng_seed.wrapping_add(f as u64),
                ..pipe.params
            };
            run_fold(
                pipe,
                f,
                &c.select(&plan.rest(f)),
                &c.select(&plan.fold(f)),
                &params,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble("xval", pipe, k, rng_seed, results))
}

/// Learn on all of `train`, evaluate on all of `test`.
pub fn cross_corpus(train: &Corpus, test: &Corpus, pipe: &Pipeline) -> Result<Report, EvalError> {
    pipe.check_relation(train)?;
    pipe.check_relation(test)?;
    let result = run_fold(pipe, 0, train, test, &pipe.params)?;
    Ok(assemble(
        "xcorpus",
        pipe,
        1,
        pipe.params.rng_seed,
        vec![result],
    ))
}

#[derive(Serialize)]
struct MetricsRecord {
    precision: f64,
    recall: f64,
    f1: f64,
    auc: Option<f64>,
}

impl From<&Metrics> for MetricsRecord {
    fn from(m: &Metrics) -> Self {
        MetricsRecord {
            precision: to_f64(m.precision),
            recall: to_f64(m.recall),
            f1: to_f64(m.f1),
            auc: m.auc.map(to_f64),
        }
    }
}

#[derive(Serialize)]
struct CountsRecord {
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    tn: u64,
}

impl From<ConfusionCounts> for CountsRecord {
    fn from(c: ConfusionCounts) -> Self {
        CountsRecord {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            tn: c.tn,
        }
    }
}

#[derive(Serialize)]
struct FoldRecord {
    fold: usize,
    train_docs: usize,
    test_docs: usize,
    rules: usize,
    counts: CountsRecord,
    metrics: MetricsRecord,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    protocol: &'a str,
    relation: &'a str,
    k: usize,
    rng_seed: u64,
    params: Vec<(&'static str, String)>,
    folds: Vec<FoldRecord>,
    pooled_counts: CountsRecord,
    pooled: MetricsRecord,
    macro_avg: MetricsRecord,
}

/// Column order of [`Report::to_tsv`].
pub const REPORT_COLUMNS: &str =
    "fold\ttrain_docs\ttest_docs\trules\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\tauc";

impl Report {
    /// One row per fold, then `pooled` and `macro` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(REPORT_COLUMNS);
        out.push('\n');
        let auc = |m: &Metrics| m.auc.map_or("-".to_string(), round4);
        let mut row = |label: String,
                       docs: (String, String),
                       rules: String,
                       c: Option<ConfusionCounts>,
                       m: &Metrics| {
            let counts = match c {
                Some(c) => format!("{}\t{}\t{}\t{}", c.tp, c.fp, c.fn_, c.tn),
                None => "-\t-\t-\t-".to_string(),
            };
            let _ = writeln!(
                out,
                "{label}\t{}\t{}\t{rules}\t{counts}\t{}\t{}\t{}\t{}",
                docs.0,
                docs.1,
                round4(m.precision),
                round4(m.recall),
                round4(m.f1),
                auc(m)
            );
        };
        for f in &self.folds {
            row(
                f.fold.to_string(),
                (f.train_docs.to_string(), f.test_docs.to_string()),
                f.rules.to_string(),
                Some(f.counts),
                &f.metrics,
            );
        }
        let dash = || ("-".to_string(), "-".to_string());
        row(
            "pooled".into(),
            dash(),
            "-".into(),
            Some(self.pooled_counts),
            &self.pooled,
        );
        row("macro".into(), dash(), "-".into(), None, &self.macro_avg);
        out
    }

    /// The structured record of the run, parameters included.
    pub fn to_json(&self) -> String {
        let rec = ReportRecord {
            protocol: self.protocol,
            relation: &self.relation,
            k: self.k,
            rng_seed: self.rng_seed,
            params: self.params.to_kv(),
            folds: self
                .folds
                .iter()
                .map(|f| FoldRecord {
                    fold: f.fold,
                    train_docs: f.train_docs,
                    test_docs: f.test_docs,
                    rules: f.rules,
                    counts: f.counts.into(),
                    metrics: (&f.metrics).into(),
                })
                .collect(),
            pooled_counts: self.pooled_counts.into(),
            pooled: (&self.pooled).into(),
            macro_avg: (&self.macro_avg).into(),
        };
        let mut s = serde_json::to_string_pretty(&rec).expect("report serialises");
        s.push('\n');
        s
    }
}
