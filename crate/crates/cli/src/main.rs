//! `relex`: command-line front end for the relation-extraction rule learner.
//!
//! Settings come from an optional `key = value` config file, overridden by
//! flags. Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 internal error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relex_core::apply::{apply_theory, export_instances};
use relex_core::corpus::{
    candidates, corpus_stats, load_corpus, load_taxonomy, parse_rules, Corpus, Thresholds,
};
use relex_core::eval::{cross_corpus, cross_validate, EvalError, Report};
use relex_core::induction::{parse_theory, InductionError, LearnParams};
use relex_core::modes::{parse_mode_file, ModeSet};
use relex_core::pipeline::{Pipeline, PipelineError};

#[derive(Parser)]
#[command(
    name = "relex",
    version,
    about = "Learn and apply relational extraction rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the background-knowledge fact file of a corpus.
    Bkgen(Opts),
    /// Learn a theory from a corpus.
    Learn(Opts),
    /// Apply a theory to a corpus and write the extracted instances.
    Apply(Opts),
    /// k-fold cross-validation; writes report.tsv and report.json.
    Xval(Opts),
    /// Train on one corpus, test on another; writes report.tsv and report.json.
    Xcorpus(Opts),
    /// Print sentence, positive and negative counts.
    Stats(Opts),
}

#[derive(Args, Default)]
struct Opts {
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<String>,
    /// Test corpus for `xcorpus`.
    #[arg(long)]
    test: Option<String>,
    /// Theory file for `apply`.
    #[arg(long)]
    theory: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    taxonomy: Option<String>,
    /// Reduction rules file; the built-in rules when absent.
    #[arg(long)]
    rules: Option<String>,
    #[arg(long)]
    relation: Option<String>,
    /// Output file, or output directory for `xval` and `xcorpus`.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    depth_i: Option<String>,
    #[arg(long)]
    recall_cap: Option<String>,
    #[arg(long)]
    beam_width: Option<String>,
    #[arg(long)]
    sample_size: Option<String>,
    #[arg(long)]
    evalfn: Option<String>,
    #[arg(long)]
    minpos: Option<String>,
    #[arg(long)]
    minprec: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    theory_construction: Option<String>,
    #[arg(long)]
    max_depth: Option<String>,
    #[arg(long)]
    max_solutions: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    short_max: Option<String>,
    #[arg(long)]
    medium_max: Option<String>,
    #[arg(long)]
    near: Option<String>,
    #[arg(long)]
    far: Option<String>,
}

const LEARN_KEYS: [&str; 12] = [
    "depth_i",
    "recall_cap",
    "beam_width",
    "sample_size",
    "evalfn",
    "minpos",
    "minprec",
    "noise",
    "theory_construction",
    "max_depth",
    "max_solutions",
    "max_steps",
];

const KNOWN_KEYS: [&str; 15] = [
    "corpus",
    "test",
    "theory",
    "modes",
    "taxonomy",
    "rules",
    "relation",
    "out",
    "seed",
    "jobs",
    "k",
    "short_max",
    "medium_max",
    "near",
    "far",
];

enum Failure {
    Config(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Bk(e) => Failure::Data(e.to_string()),
            PipelineError::RelationMismatch(_) => Failure::Config(e.to_string()),
            PipelineError::Induction(InductionError::Params(m)) => Failure::Config(m),
            PipelineError::Induction(InductionError::NoPositives) => Failure::Data(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Pipeline(p) => p.into(),
            EvalError::Folds(m) => Failure::Config(m),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

/// Flat settings: config file first, flags on top.
struct Settings(BTreeMap<String, String>);

impl Settings {
    fn load(opts: &Opts) -> Result<Settings> {
        let mut map = BTreeMap::new();
        if let Some(path) = &opts.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("config: {}: {e}", path.display())))?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Failure::Config(format!(
                        "{}:{}: expected key = value",
                        path.display(),
                        i + 1
                    ))
                })?;
                let k = k.trim().to_string();
                if !KNOWN_KEYS.contains(&k.as_str()) && !LEARN_KEYS.contains(&k.as_str()) {
                    return Err(Failure::Config(format!(
                        "{}:{}: unknown key '{k}'",
                        path.display(),
                        i + 1
                    )));
                }
                map.insert(k, v.trim().to_string());
            }
        }
        let flags = [
            ("corpus", &opts.corpus),
            ("test", &opts.test),
            ("theory", &opts.theory),
            ("modes", &opts.modes),
            ("taxonomy", &opts.taxonomy),
            ("rules", &opts.rules),
            ("relation", &opts.relation),
            ("out", &opts.out),
            ("seed", &opts.seed),
            ("jobs", &opts.jobs),
            ("k", &opts.k),
            ("depth_i", &opts.depth_i),
            ("recall_cap", &opts.recall_cap),
            ("beam_width", &opts.beam_width),
            ("sample_size", &opts.sample_size),
            ("evalfn", &opts.evalfn),
            ("minpos", &opts.minpos),
            ("minprec", &opts.minprec),
            ("noise", &opts.noise),
            ("theory_construction", &opts.theory_construction),
            ("max_depth", &opts.max_depth),
            ("max_solutions", &opts.max_solutions),
            ("max_steps", &opts.max_steps),
            ("short_max", &opts.short_max),
            ("medium_max", &opts.medium_max),
            ("near", &opts.near),
            ("far", &opts.far),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        Ok(Settings(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn number<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Failure::Config(format!("{key}: invalid value '{v}'"))),
        }
    }

    /// An existing input file named by `key`.
    fn input(&self, key: &str) -> Result<Option<PathBuf>> {
        match self.get(key) {
            None => Ok(None),
            Some(p) => {
                let path = PathBuf::from(p);
                if path.is_file() {
                    Ok(Some(path))
                } else {
                    Err(Failure::Config(format!("{key}: file '{p}' does not exist")))
                }
            }
        }
    }

    fn required_input(&self, key: &str) -> Result<PathBuf> {
        self.input(key)?
            .ok_or_else(|| Failure::Config(format!("{key}: missing required setting")))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    load_corpus(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// The relation setting, or the single relation type annotated in the corpus.
fn relation(s: &Settings, c: &Corpus) -> Result<String> {
    if let Some(r) = s.get("relation") {
        return Ok(r.to_string());
    }
    let mut types: Vec<&str> = c
        .sentences()
        .flat_map(|(_, s)| s.relations.iter().map(|r| r.relation.as_str()))
        .collect();
    types.sort_unstable();
    types.dedup();
    match types.as_slice() {
        [one] => Ok(one.to_string()),
        [] => Err(Failure::Config(
            "relation: missing required setting (the corpus annotates no relation)".into(),
        )),
        many => Err(Failure::Config(format!(
            "relation: missing required setting (corpus annotates {})",
            many.join(", ")
        ))),
    }
}

fn pipeline(s: &Settings, relation: &str) -> Result<Pipeline> {
    let mut pipe = Pipeline::new(relation);
    if let Some(p) = s.input("modes")? {
        let modes: ModeSet = parse_mode_file(&read(&p)?)
            .map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
        let head = modes.head.pred.to_string();
        if head != relation {
            return Err(Failure::Config(format!(
                "modes: head predicate '{head}' differs from relation '{relation}'"
            )));
        }
        pipe.modes = modes;
    }
    if let Some(p) = s.input("taxonomy")? {
        let tax = load_taxonomy(&read(&p)?)
            .map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
        pipe.taxonomy = Some(tax);
    }
    if let Some(p) = s.input("rules")? {
        pipe.rules =
            parse_rules(&read(&p)?).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
    }
    let d = Thresholds::default();
    pipe.thresholds = Thresholds {
        short_max: s.number("short_max", d.short_max)?,
        medium_max: s.number("medium_max", d.medium_max)?,
        near: s.number("near", d.near)?,
        far: s.number("far", d.far)?,
    };
    pipe.thresholds
        .validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    pipe.params = learn_params(s)?;
    Ok(pipe)
}

fn learn_params(s: &Settings) -> Result<LearnParams> {
    let mut p = LearnParams::default();
    for key in LEARN_KEYS {
        if let Some(v) = s.get(key) {
            p.set(key, v)
                .map_err(|m| Failure::Config(format!("{key}: {m}")))?;
        }
    }
    if let Some(v) = s.get("seed") {
        p.set("rng_seed", v)
            .map_err(|m| Failure::Config(format!("seed: {m}")))?;
    }
    p.validate()
        .map_err(|m| Failure::Config(format!("params: {m}")))?;
    Ok(p)
}

/// Write to the `out` file, or stdout when it is not set.
fn emit(s: &Settings, text: &str) -> Result<()> {
    match s.get("out") {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("out: {p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(s: &Settings, r: &Report) -> Result<()> {
    for f in &r.folds {
        log::info!("fold {} took {:.2}s", f.fold, f.seconds);
    }
    match s.get("out") {
        Some(dir) => {
            let dir = Path::new(dir);
            let io = |e: std::io::Error| Failure::Config(format!("out: {}: {e}", dir.display()));
            fs::create_dir_all(dir).map_err(io)?;
            fs::write(dir.join("report.tsv"), r.to_tsv()).map_err(io)?;
            fs::write(dir.join("report.json"), r.to_json()).map_err(io)
        }
        None => {
            print!("{}", r.to_tsv());
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<()> {
    let opts = match &command {
        Command::Bkgen(o)
        | Command::Learn(o)
        | Command::Apply(o)
        | Command::Xval(o)
        | Command::Xcorpus(o)
        | Command::Stats(o) => o,
    };
    let s = Settings::load(opts)?;
    let jobs: usize = s.number("jobs", 0)?;
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let corpus_path = s.required_input("corpus")?;
    let corpus = read_corpus(&corpus_path)?;
    match command {
        Command::Stats(_) => {
            let rel = relation(&s, &corpus)?;
            let st = corpus_stats(&corpus, &rel);
            emit(&s, &format!("{}\t{}\t{}\n", st.sentences, st.pos, st.neg))
        }
        Command::Bkgen(_) => {
            let rel = relation(&s, &corpus).unwrap_or_default();
            let pipe = pipeline(&s, if rel.is_empty() { "rel" } else { &rel })?;
            emit(&s, &pipe.bk_text(&corpus)?)
        }
        Command::Learn(_) => {
            let rel = relation(&s, &corpus)?;
            let pipe = pipeline(&s, &rel)?;
            let theory = pipe.train(&corpus)?;
            log::info!("learned {} rules", theory.len());
            emit(&s, &theory.to_text())
        }
        Command::Apply(_) => {
            let path = s.required_input("theory")?;
            let theory = parse_theory(&read(&path)?)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            let rel = match (s.get("relation"), theory.rules.first()) {
                (Some(r), _) => r.to_string(),
                (None, Some(r)) => r.scored.clause.head.pred.to_string(),
                (None, None) => relation(&s, &corpus)?,
            };
            let pipe = pipeline(&s, &rel)?;
            let kb = pipe.background(&corpus)?;
            let xs = apply_theory(&theory, &kb, &candidates(&corpus, &rel))
                .map_err(|e| Failure::Internal(e.to_string()))?;
            let text = export_instances(&xs, pipe.taxonomy.as_ref(), &corpus)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            emit(&s, &text)
        }
        Command::Xval(_) => {
            let rel = relation(&s, &corpus)?;
            let pipe = pipeline(&s, &rel)?;
            let k = s.number("k", 10usize)?;
            let report = cross_validate(&corpus, &pipe, k, pipe.params.rng_seed)?;
            emit_report(&s, &report)
        }
        Command::Xcorpus(_) => {
            let test = read_corpus(&s.required_input("test")?)?;
            let rel = relation(&s, &corpus)?;
            let pipe = pipeline(&s, &rel)?;
            emit_report(&s, &cross_corpus(&corpus, &test, &pipe)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RELEX_LOG")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("relex: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
