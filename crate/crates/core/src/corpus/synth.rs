//! Synthetic corpora with planted extraction patterns.
//!
//! Every sentence is built from a fixed 30-lemma vocabulary. Positive pairs
//! are the subject and object of a planted verb; negatives share the same
//! dependency structure with other verbs, or pair an entity with a third
//! mention attached by `prep_near`. Adverbs and the position of the third
//! mention are drawn at random so that no surface feature besides the planted
//! pattern separates the classes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    Chunk, ChunkType, Corpus, DependencyEdge, Document, EntityMention, RelationInstance, Sentence,
    Token,
};

/// The relation name used by the planted corpora.
pub const RELATION: &str = "rel";

const PROTEINS: [&str; 14] = [
    "GerE", "SigK", "SpoIIID", "CotA", "KinA", "SinR", "AbrB", "ComK", "DegU", "RsbW", "YfhP",
    "SigF", "SpoVT", "GerR",
];
const OTHER_VERBS: [&str; 4] = ["binds", "activates", "inhibits", "regulates"];
const ADVERBS: [&str; 2] = ["strongly", "directly"];

/// The planted verb-argument shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// `S V O`: nsubj + dobj.
    Object,
    /// `S V with O`: nsubj + prep_with.
    With,
}

#[derive(Default)]
struct Ids {
    sentence: usize,
    token: usize,
    chunk: usize,
    entity: usize,
}

struct Builder<'a> {
    ids: &'a mut Ids,
    s: Sentence,
    offset: usize,
}

impl<'a> Builder<'a> {
    fn new(ids: &'a mut Ids) -> Self {
        ids.sentence += 1;
        let s = Sentence {
            id: format!("s{}", ids.sentence),
            tokens: Vec::new(),
            chunks: Vec::new(),
            dependencies: Vec::new(),
            root: None,
            entities: Vec::new(),
            relations: Vec::new(),
        };
        Builder { ids, s, offset: 0 }
    }

    fn token(&mut self, surface: &str, pos: &str) -> usize {
        self.ids.token += 1;
        let start = self.offset;
        self.offset += surface.len() + 1;
        self.s.tokens.push(Token {
            id: format!("t{}", self.ids.token),
            surface: surface.to_string(),
            lemma: surface.to_string(),
            pos: pos.to_string(),
            char_start: start,
            char_end: start + surface.len(),
            ner: None,
        });
        self.s.tokens.len() - 1
    }

    fn chunk(&mut self, ty: ChunkType, tokens: &[usize]) {
        self.ids.chunk += 1;
        let token_ids: Vec<String> = tokens
            .iter()
            .map(|&i| self.s.tokens[i].id.clone())
            .collect();
        self.s.chunks.push(Chunk {
            id: format!("ck{}", self.ids.chunk),
            chunk_type: ty,
            head_token: token_ids.last().cloned(),
            token_ids,
        });
    }

    fn dep(&mut self, label: &str, gov: usize, dep: usize) {
        self.s.dependencies.push(DependencyEdge {
            label: label.to_string(),
            governor: self.s.tokens[gov].id.clone(),
            dependent: self.s.tokens[dep].id.clone(),
        });
    }

    fn entity(&mut self, tok: usize) -> String {
        self.ids.entity += 1;
        let id = format!("e{}", self.ids.entity);
        let t = self.s.tokens[tok].id.clone();
        self.s.entities.push(EntityMention {
            id: id.clone(),
            token_ids: vec![t.clone()],
            head_token: Some(t),
            entity_type: "protein".into(),
            subtype: None,
            mention_type: Some("name".into()),
            entity_ref: None,
        });
        id
    }

    /// A single-token protein noun phrase.
    fn protein(&mut self, name: &str) -> (usize, String) {
        let t = self.token(name, "NNP");
        self.chunk(ChunkType::Np, &[t]);
        let e = self.entity(t);
        (t, e)
    }

    fn finish(mut self, root: usize) -> Sentence {
        self.s.root = Some(self.s.tokens[root].id.clone());
        self.s
    }
}

/// Optional adverb before the verb, sharing the verb chunk.
fn verb_group(b: &mut Builder<'_>, verb: &str, adverb: Option<&str>) -> usize {
    let adv = adverb.map(|a| b.token(a, "RB"));
    let v = b.token(verb, "VBZ");
    match adv {
        Some(a) => {
            b.chunk(ChunkType::Vp, &[a, v]);
            b.dep("advmod", v, a);
        }
        None => b.chunk(ChunkType::Vp, &[v]),
    }
    v
}

/// `S V O` or `S V with O`, optionally with a third protein attached by
/// `prep_near` before or after the clause.
fn relation_sentence(
    ids: &mut Ids,
    rng: &mut ChaCha8Rng,
    verb: &str,
    shape: Shape,
    gold: bool,
    third: bool,
) -> Sentence {
    let names: Vec<&str> = PROTEINS.choose_multiple(rng, 3).copied().collect();
    let adverb = rng
        .gen_bool(0.5)
        .then(|| ADVERBS[rng.gen_range(0..ADVERBS.len())]);
    let third_first = third && rng.gen_bool(0.5);
    let mut b = Builder::new(ids);
    let mut x = None;
    let mut comma = None;
    if third_first {
        let near = b.token("Near", "IN");
        b.chunk(ChunkType::Pp, &[near]);
        x = Some(b.protein(names[2]));
        comma = Some(b.token(",", ","));
    }
    let (s, es) = b.protein(names[0]);
    let v = verb_group(&mut b, verb, adverb);
    if shape == Shape::With {
        let with = b.token("with", "IN");
        b.chunk(ChunkType::Pp, &[with]);
    }
    let (o, eo) = b.protein(names[1]);
    if third && !third_first {
        let near = b.token("near", "IN");
        b.chunk(ChunkType::Pp, &[near]);
        x = Some(b.protein(names[2]));
    }
    let stop = b.token(".", ".");
    b.dep("nsubj", v, s);
    b.dep(
        match shape {
            Shape::Object => "dobj",
            Shape::With => "prep_with",
        },
        v,
        o,
    );
    if let Some((xt, _)) = x {
        b.dep("prep_near", v, xt);
    }
    if let Some(cm) = comma {
        b.dep("punct", v, cm);
    }
    b.dep("punct", v, stop);
    if gold {
        b.s.relations.push(RelationInstance {
            relation: RELATION.into(),
            arg1: es,
            arg2: eo,
            gold: true,
        });
    }
    b.finish(v)
}

/// Sentences with at most one protein: "the complex V [X] (in vivo|directly) ."
fn filler(ids: &mut Ids, rng: &mut ChaCha8Rng) -> Sentence {
    let verbs = [
        "interacts",
        "binds",
        "activates",
        "inhibits",
        "regulates",
        "associates",
    ];
    let verb = verbs[rng.gen_range(0..verbs.len())];
    let mut b = Builder::new(ids);
    let the = b.token("the", "DT");
    let complex = b.token("complex", "NN");
    b.chunk(ChunkType::Np, &[the, complex]);
    let v = b.token(verb, "VBZ");
    b.chunk(ChunkType::Vp, &[v]);
    b.dep("det", complex, the);
    b.dep("nsubj", v, complex);
    if rng.gen_bool(0.5) {
        let name = PROTEINS[rng.gen_range(0..PROTEINS.len())];
        let (x, _) = b.protein(name);
        b.dep("dobj", v, x);
    }
    if rng.gen_bool(0.5) {
        let in_ = b.token("in", "IN");
        b.chunk(ChunkType::Pp, &[in_]);
        let vivo = b.token("vivo", "NN");
        b.chunk(ChunkType::Np, &[vivo]);
        b.dep("prep_in", v, vivo);
    } else {
        let d = b.token("directly", "RB");
        b.dep("advmod", v, d);
    }
    let stop = b.token(".", ".");
    b.dep("punct", v, stop);
    b.finish(v)
}

#[derive(Clone, Copy)]
enum Kind {
    Planted { shape: Shape, third: bool },
    Decoy { shape: Shape },
    Filler,
}

fn assemble(kinds: Vec<Kind>, seed: u64) -> Corpus {
    const DOCS: usize = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kinds = kinds;
    kinds.shuffle(&mut rng);
    let per_doc = kinds.len() / DOCS;
    let mut ids = Ids::default();
    let mut documents = Vec::with_capacity(DOCS);
    for (d, group) in kinds.chunks(per_doc).enumerate() {
        let sentences = group
            .iter()
            .map(|k| match *k {
                Kind::Planted { shape, third } => {
                    let verb = match shape {
                        Shape::Object => "interacts",
                        Shape::With => "associates",
                    };
                    relation_sentence(&mut ids, &mut rng, verb, shape, true, third)
                }
                Kind::Decoy { shape } => {
                    let verb = OTHER_VERBS[rng.gen_range(0..OTHER_VERBS.len())];
                    relation_sentence(&mut ids, &mut rng, verb, shape, false, false)
                }
                Kind::Filler => filler(&mut ids, &mut rng),
            })
            .collect();
        documents.push(Document {
            id: format!("d{}", d + 1),
            sentences,
        });
    }
    Corpus { documents }
}

fn kinds(shapes: &[Shape]) -> Vec<Kind> {
    let mut out = Vec::new();
    let share = |n: usize| n / shapes.len();
    for &shape in shapes {
        out.extend((0..share(30)).map(|_| Kind::Planted { shape, third: true }));
        out.extend((0..share(30)).map(|_| Kind::Planted {
            shape,
            third: false,
        }));
        out.extend((0..share(60)).map(|_| Kind::Decoy { shape }));
    }
    out.extend((0..80).map(|_| Kind::Filler));
    out
}

/// 40 documents of 5 sentences planting
/// `rel(A,B) :- t_hasDep(nsubj,V,A), t_hasDep(dobj,V,B), t_stem(V,"interacts")`
/// with 60 positive and 120 negative pairs.
pub fn planted_corpus(seed: u64) -> Corpus {
    assemble(kinds(&[Shape::Object]), seed)
}

/// Like [`planted_corpus`], with half of the positives following a second,
/// disjoint pattern: `t_hasDep(nsubj,V,A), t_hasDep(prep_with,V,B),
/// t_stem(V,"associates")`.
pub fn two_pattern_corpus(seed: u64) -> Corpus {
    assemble(kinds(&[Shape::Object, Shape::With]), seed)
}
