//! Seeded random instances: fact bases, queries, mode languages, linked
//! clauses and small annotated corpora.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relex_core::corpus::{
    load_corpus, write_corpus, Chunk, ChunkType, Corpus, DependencyEdge, Document, EntityMention,
    RelationInstance, Sentence, Token,
};
use relex_core::logic::kb::KnowledgeBase;
use relex_core::logic::syntax::parse_clause;
use relex_core::logic::term::{Clause, Literal, Term};
use relex_core::modes::{parse_mode_file, ArgMode, ModeSet};

/// A random fact base with at most 200 facts over at most 8 constants and
/// 6 predicates, optionally with one intensional clause over two binary
/// predicates.
pub struct FactBase {
    pub kb: KnowledgeBase,
    pub facts: Vec<Literal>,
    pub preds: Vec<(String, usize)>,
    pub constants: Vec<Term>,
    pub rule: Option<Clause>,
}

pub fn fact_base(rng: &mut ChaCha8Rng) -> FactBase {
    let constants: Vec<Term> = (0..rng.gen_range(1..=8))
        .map(|i| Term::constant(&format!("c{i}")))
        .collect();
    let preds: Vec<(String, usize)> = (0..rng.gen_range(1..=5))
        .map(|i| (format!("p{i}"), rng.gen_range(1..=3)))
        .collect();
    let mut kb = KnowledgeBase::new();
    let mut facts = Vec::new();
    for _ in 0..rng.gen_range(0..=200) {
        let (p, n) = preds.choose(rng).unwrap();
        let args = (0..*n).map(|_| *constants.choose(rng).unwrap()).collect();
        let f = Literal::new(p, args);
        if kb.add_fact(f.clone()).unwrap() {
            facts.push(f);
        }
    }
    let binary: Vec<&String> = preds.iter().filter(|p| p.1 == 2).map(|p| &p.0).collect();
    let mut preds = preds.clone();
    let mut rule = None;
    if !binary.is_empty() && rng.gen_bool(0.5) {
        let a = binary.choose(rng).unwrap();
        let b = binary.choose(rng).unwrap();
        let c = parse_clause(&format!("d(X,Y) :- {a}(X,Z), {b}(Z,Y).")).unwrap();
        kb.add_clause(c.clone()).unwrap();
        preds.push(("d".into(), 2));
        rule = Some(c);
    }
    FactBase {
        kb,
        facts,
        preds,
        constants,
        rule,
    }
}

/// A conjunctive query of 1 to 3 literals over variables 0..4, with an
/// occasional constant argument.
pub fn query(rng: &mut ChaCha8Rng, fb: &FactBase) -> Vec<Literal> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let (p, n) = fb.preds.choose(rng).unwrap();
            let args = (0..*n)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        *fb.constants.choose(rng).unwrap()
                    } else {
                        Term::var(rng.gen_range(0..4))
                    }
                })
                .collect();
            Literal::new(p, args)
        })
        .collect()
}

/// A token-level problem: typed tokens, random lexical and dependency facts
/// and a random selection of body modes.
pub struct TokenWorld {
    pub kb: KnowledgeBase,
    pub facts: Vec<Literal>,
    pub tokens: Vec<String>,
    pub modes: ModeSet,
}

const POS: [&str; 3] = ["nn", "vb", "jj"];
const DEPS: [&str; 2] = ["nsubj", "dobj"];

const BODY_MODES: [&str; 6] = [
    "t_next(+token, -token)",
    "t_pos(+token, #pos)",
    "t_dep(#dep, +token, -token)",
    "t_dep(#dep, -token, +token)",
    "t_same(+token, +token)",
    "t_len(+token, #int)",
];

pub fn token_world(rng: &mut ChaCha8Rng) -> TokenWorld {
    let n = rng.gen_range(2..=6);
    let tokens: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let mut text = String::new();
    for t in &tokens {
        text.push_str(&format!("token({t}).\n"));
    }
    let pick = |rng: &mut ChaCha8Rng| tokens.choose(rng).unwrap().clone();
    for _ in 0..rng.gen_range(0..=3 * n) {
        let line = match rng.gen_range(0..5) {
            0 => format!("t_next({},{}).", pick(rng), pick(rng)),
            1 => format!("t_pos({},{}).", pick(rng), POS.choose(rng).unwrap()),
            2 => format!(
                "t_dep({},{},{}).",
                DEPS.choose(rng).unwrap(),
                pick(rng),
                pick(rng)
            ),
            3 => format!("t_same({},{}).", pick(rng), pick(rng)),
            _ => format!("t_len({},{}).", pick(rng), rng.gen_range(1..4)),
        };
        text.push_str(&line);
        text.push('\n');
    }
    let kb = relex_core::logic::kb::parse_fact_base(&text).unwrap();
    let facts = kb.facts().to_vec();

    let mut modes = String::from(":- modeh(1, r(+token, +token)).\n");
    for decl in BODY_MODES {
        if rng.gen_bool(0.7) {
            let recall = match rng.gen_range(0..3) {
                0 => "1".to_string(),
                1 => "2".to_string(),
                _ => "*".to_string(),
            };
            modes.push_str(&format!(":- modeb({recall}, {decl}).\n"));
        }
    }
    TokenWorld {
        kb,
        facts,
        tokens,
        modes: parse_mode_file(&modes).unwrap(),
    }
}

/// A ground head example `r(ti,tj)`.
pub fn example(rng: &mut ChaCha8Rng, w: &TokenWorld) -> Literal {
    let a = w.tokens.choose(rng).unwrap();
    let b = w.tokens.choose(rng).unwrap();
    Literal::new("r", vec![Term::constant(a), Term::constant(b)])
}

/// A random clause `r(A,B) :- ...` that is linked under `w.modes` by
/// construction, with `len` body literals (fewer when the modes allow none).
pub fn linked_clause(rng: &mut ChaCha8Rng, w: &TokenWorld, len: usize) -> Clause {
    let mut avail: Vec<u32> = vec![0, 1];
    let mut next = 2u32;
    let mut body = Vec::new();
    if w.modes.body.is_empty() {
        return Clause::new(Literal::new("r", vec![Term::var(0), Term::var(1)]), body);
    }
    for _ in 0..len {
        let decl = w.modes.body.choose(rng).unwrap();
        let mut args = Vec::new();
        let mut outputs = Vec::new();
        for m in &decl.args {
            let t = match m.mode {
                ArgMode::Input => Term::var(*avail.choose(rng).unwrap()),
                ArgMode::Output => {
                    if rng.gen_bool(0.3) {
                        Term::var(*avail.choose(rng).unwrap())
                    } else {
                        next += 1;
                        outputs.push(next - 1);
                        Term::var(next - 1)
                    }
                }
                ArgMode::Constant => match m.ty.as_str() {
                    "pos" => Term::constant(POS.choose(rng).unwrap()),
                    "dep" => Term::constant(DEPS.choose(rng).unwrap()),
                    _ => Term::Int(rng.gen_range(1..4)),
                },
            };
            args.push(t);
        }
        avail.extend(outputs);
        body.push(Literal {
            pred: decl.pred,
            args,
        });
    }
    Clause::new(Literal::new("r", vec![Term::var(0), Term::var(1)]), body)
}

const LEMMAS: [&str; 8] = [
    "GerE", "SigK", "binds", "the", "of", "gene", "with", "strongly",
];
const TAGS: [&str; 6] = ["NNP", "NN", "VBZ", "DT", "IN", "RB"];
const LABELS: [&str; 8] = [
    "nsubj",
    "dobj",
    "det",
    "nn",
    "amod",
    "prep_with",
    "punct",
    "dep",
];

/// A small random corpus of 1 to 4 documents: dependency trees over 1 to 9
/// tokens, random chunking, single-token entities (some sharing a
/// reference) and random gold relations of type `rel`. The result has been
/// through the loader.
pub fn corpus(rng: &mut ChaCha8Rng) -> Corpus {
    let mut c = Corpus::default();
    let (mut sid, mut tid, mut cid, mut eid) = (0, 0, 0, 0);
    for d in 0..rng.gen_range(1..=4) {
        let mut doc = Document {
            id: format!("d{d}"),
            sentences: Vec::new(),
        };
        for _ in 0..rng.gen_range(1..=3) {
            sid += 1;
            let n = rng.gen_range(1..=9);
            let mut offset = 0;
            let tokens: Vec<Token> = (0..n)
                .map(|_| {
                    tid += 1;
                    let surface = LEMMAS.choose(rng).unwrap().to_string();
                    let start = offset;
                    offset += surface.len() + 1;
                    let pos = if rng.gen_bool(0.1) {
                        ","
                    } else {
                        TAGS.choose(rng).unwrap()
                    };
                    Token {
                        id: format!("t{tid}"),
                        char_start: start,
                        char_end: start + surface.len(),
                        lemma: surface.to_lowercase(),
                        surface,
                        pos: pos.to_string(),
                        ner: rng.gen_bool(0.3).then(|| "PROTEIN".to_string()),
                    }
                })
                .collect();
            let id = |i: usize| tokens[i].id.clone();
            // a random tree: token i > 0 hangs off an earlier token, possibly with gaps
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut dependencies = Vec::new();
            for k in 1..n {
                if rng.gen_bool(0.9) {
                    let gov = order[rng.gen_range(0..k)];
                    dependencies.push(DependencyEdge {
                        label: LABELS.choose(rng).unwrap().to_string(),
                        governor: id(gov),
                        dependent: id(order[k]),
                    });
                }
            }
            let mut chunks = Vec::new();
            let mut i = 0;
            while i < n {
                let len = rng.gen_range(1..=3).min(n - i);
                if rng.gen_bool(0.8) {
                    cid += 1;
                    chunks.push(Chunk {
                        id: format!("ck{cid}"),
                        chunk_type: *[ChunkType::Np, ChunkType::Vp, ChunkType::Pp]
                            .choose(rng)
                            .unwrap(),
                        token_ids: (i..i + len).map(id).collect(),
                        head_token: None,
                    });
                }
                i += len;
            }
            let mut heads: Vec<usize> = (0..n).collect();
            heads.shuffle(rng);
            heads.truncate(rng.gen_range(0..=4.min(n)));
            heads.sort_unstable();
            let entities: Vec<EntityMention> = heads
                .iter()
                .map(|&h| {
                    eid += 1;
                    EntityMention {
                        id: format!("e{eid}"),
                        token_ids: vec![id(h)],
                        head_token: None,
                        entity_type: "protein".into(),
                        subtype: None,
                        mention_type: Some("name".into()),
                        entity_ref: rng.gen_bool(0.2).then(|| "same".to_string()),
                    }
                })
                .collect();
            let mut relations = Vec::new();
            for a in 0..entities.len() {
                for b in a + 1..entities.len() {
                    if rng.gen_bool(0.4) {
                        relations.push(RelationInstance {
                            relation: "rel".into(),
                            arg1: entities[a].id.clone(),
                            arg2: entities[b].id.clone(),
                            gold: true,
                        });
                    }
                }
            }
            doc.sentences.push(Sentence {
                id: format!("s{sid}"),
                root: (rng.gen_bool(0.8)).then(|| id(order[0])),
                tokens,
                chunks,
                dependencies,
                entities,
                relations,
            });
        }
        c.documents.push(doc);
    }
    load_corpus(&write_corpus(&c)).expect("generated corpus is valid")
}
