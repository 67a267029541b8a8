//! Mode declarations: the declarative bias over the hypothesis language.

mod bottom;
mod linked;

pub use bottom::{bottom_clause, BottomError, SaturationParams};
pub use linked::{head_inputs, is_well_formed, linked_mask, repair_linkedness};

use std::fmt;

use thiserror::Error;

use crate::logic::syntax::{parse_program, Item, SyntaxError, Tree};
use crate::logic::term::{write_atom, Literal, Sym, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgMode {
    /// `+type`
    Input,
    /// `-type`
    Output,
    /// `#type`
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlaceMarker {
    pub mode: ArgMode,
    pub ty: Sym,
}

impl fmt::Display for PlaceMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.mode {
            ArgMode::Input => '+',
            ArgMode::Output => '-',
            ArgMode::Constant => '#',
        };
        write!(f, "{c}{}", self.ty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recall {
    Bounded(usize),
    /// `*`
    Unbounded,
}

impl Recall {
    pub fn limit(self, cap: usize) -> usize {
        match self {
            Recall::Bounded(n) => n,
            Recall::Unbounded => cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Head,
    Body,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeDecl {
    pub kind: ModeKind,
    pub recall: Recall,
    pub pred: Sym,
    pub args: Vec<PlaceMarker>,
}

impl ModeDecl {
    /// Whether a clause literal fits this scheme: same predicate and arity,
    /// `#` positions hold constants and `+`/`-` positions hold variables.
    pub fn matches(&self, lit: &Literal) -> bool {
        lit.pred == self.pred
            && lit.args.len() == self.args.len()
            && self.args.iter().zip(&lit.args).all(|(m, t)| match m.mode {
                ArgMode::Constant => t.is_ground(),
                ArgMode::Input | ArgMode::Output => matches!(t, Term::Var(_)),
            })
    }
}

impl fmt::Display for ModeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ModeKind::Head => "modeh",
            ModeKind::Body => "modeb",
        };
        let recall = match self.recall {
            Recall::Bounded(n) => n.to_string(),
            Recall::Unbounded => "*".to_string(),
        };
        write!(f, ":- {kind}({recall}, ")?;
        write_atom(f, self.pred.as_str())?;
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")).")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSet {
    pub head: ModeDecl,
    pub body: Vec<ModeDecl>,
}

impl ModeSet {
    pub fn body_modes_for<'a>(&'a self, lit: &'a Literal) -> impl Iterator<Item = &'a ModeDecl> {
        self.body.iter().filter(move |m| m.matches(lit))
    }

    /// Replace the head declaration's predicate, keeping its markers.
    pub fn with_head_predicate(&self, pred: &str) -> ModeSet {
        let mut m = self.clone();
        m.head.pred = Sym::new(pred);
        m
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.head);
        for b in &self.body {
            out.push_str(&format!("{b}\n"));
        }
        out
    }

    /// The shipped default bias for a binary relation over tokens.
    pub fn default_for(relation: &str) -> ModeSet {
        let text = format!(":- modeh(1, r(+token, +token)).\n{DEFAULT_BODY_MODES}");
        parse_mode_file(&text)
            .expect("default mode declarations parse")
            .with_head_predicate(relation)
    }
}

/// Body declarations shipped with the tool: the structural, chunking,
/// syntactic and semantic predicates of the generated background knowledge.
pub const DEFAULT_BODY_MODES: &str = include_str!("default_body.modes");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModeError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("no modeh declaration")]
    MissingHead,
    #[error("line {line}: more than one modeh declaration")]
    MultipleHeads { line: usize },
}

fn invalid(line: usize, message: impl Into<String>) -> ModeError {
    ModeError::Invalid {
        line,
        message: message.into(),
    }
}

fn decl_from_tree(goal: Tree, line: usize) -> Result<ModeDecl, ModeError> {
    let Tree::Compound(name, args) = goal else {
        return Err(invalid(line, "expected modeh(...) or modeb(...)"));
    };
    let kind = match name.as_str() {
        "modeh" => ModeKind::Head,
        "modeb" => ModeKind::Body,
        other => return Err(invalid(line, format!("unknown directive '{other}'"))),
    };
    let [recall, scheme]: [Tree; 2] = args
        .try_into()
        .map_err(|_| invalid(line, format!("{name} takes two arguments")))?;
    let recall = match recall {
        Tree::Star => Recall::Unbounded,
        Tree::Int(n) if n >= 1 => Recall::Bounded(n as usize),
        other => return Err(invalid(line, format!("bad recall {other:?}"))),
    };
    let (pred, margs) = match scheme {
        Tree::Compound(p, a) => (p, a),
        Tree::Atom(p) => (p, Vec::new()),
        other => return Err(invalid(line, format!("bad mode scheme {other:?}"))),
    };
    let args = margs
        .into_iter()
        .map(|a| match a {
            Tree::Marker(c, ty) => Ok(PlaceMarker {
                mode: match c {
                    '+' => ArgMode::Input,
                    '-' => ArgMode::Output,
                    _ => ArgMode::Constant,
                },
                ty: Sym::new(&ty),
            }),
            other => Err(invalid(
                line,
                format!("unknown place marker {other:?}; expected +type, -type or #type"),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModeDecl {
        kind,
        recall,
        pred: Sym::new(&pred),
        args,
    })
}

/// Parse `:- modeh(R, scheme).` / `:- modeb(R, scheme).` lines.
pub fn parse_mode_file(text: &str) -> Result<ModeSet, ModeError> {
    let mut head = None;
    let mut body = Vec::new();
    for item in parse_program(text)? {
        match item {
            Item::Directive { goal, line } => {
                let decl = decl_from_tree(goal, line)?;
                match decl.kind {
                    ModeKind::Head if head.is_some() => {
                        return Err(ModeError::MultipleHeads { line })
                    }
                    ModeKind::Head => head = Some(decl),
                    ModeKind::Body => body.push(decl),
                }
            }
            Item::Clause { line, .. } => {
                return Err(invalid(line, "expected a ':- modeh/modeb' directive"))
            }
        }
    }
    Ok(ModeSet {
        head: head.ok_or(ModeError::MissingHead)?,
        body,
    })
}
