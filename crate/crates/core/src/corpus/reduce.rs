//! Entity-oriented graph reduction driven by a small rule language.
//!
//! A rules file holds one rule per line:
//!
//! ```text
//! name: IF <condition> THEN <action>
//! ```
//!
//! Node conditions: `pos IN {..}`, `deprel IN {..}` (label of an incoming
//! edge), `in_entity`, `pair_head`, `on_path` (on a shortest dependency path
//! between the pair heads) and `hops > N` (more than N undirected dependency
//! hops from both pair heads). Edge conditions: `label IN {..}` plus any node
//! condition prefixed with `gov.` or `dep.`. Conditions combine with `AND`,
//! `OR`, `NOT` and parentheses. Actions: `delete-node` (node rules),
//! `delete-edge` and `redirect-edge-to-chunk-head` (edge rules).

use std::fmt;

use thiserror::Error;

use super::graph::{DepEdge, SentenceGraph};
use super::EntityMention;

/// The shipped rule set.
pub const DEFAULT_RULES: &str = r#"% punctuation carries no relational context
punct: IF pos IN {",", ".", ":", "``", "''", "-lrb-", "-rrb-"} THEN delete-node
det: IF deprel IN {det, predet} AND NOT in_entity THEN delete-node
nn_head: IF label IN {nn} THEN redirect-edge-to-chunk-head
far: IF hops > 3 THEN delete-node
"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    DeleteNode,
    DeleteEdge,
    RedirectEdgeToChunkHead,
}

impl Action {
    fn on_edges(self) -> bool {
        self != Action::DeleteNode
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::DeleteNode => "delete-node",
            Action::DeleteEdge => "delete-edge",
            Action::RedirectEdgeToChunkHead => "redirect-edge-to-chunk-head",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeAtom {
    Pos(Vec<String>),
    Deprel(Vec<String>),
    InEntity,
    PairHead,
    OnPath,
    HopsGt(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Atom {
    Node(NodeAtom),
    Label(Vec<String>),
    Gov(NodeAtom),
    Dep(NodeAtom),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Cond {
    Atom(Atom),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionRule {
    pub name: String,
    cond: Cond,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct RuleError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Num(usize),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "{},()>".contains(c) {
            out.push(Tok::Sym(c));
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => s.push(ch),
                    None => return Err("unterminated quoted item".into()),
                }
            }
            out.push(Tok::Quoted(s));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            out.push(Tok::Num(
                s.parse().map_err(|_| format!("bad number '{s}'"))?,
            ));
        } else if c.is_alphanumeric() || "_-.$".contains(c) {
            let mut s = String::new();
            while let Some(&d) = chars
                .peek()
                .filter(|d| d.is_alphanumeric() || "_-.$".contains(**d))
            {
                s.push(d);
                chars.next();
            }
            out.push(Tok::Word(s));
        } else {
            return Err(format!("unexpected character '{c}'"));
        }
    }
    Ok(out)
}

struct CondParser {
    toks: Vec<Tok>,
    at: usize,
}

impl CondParser {
    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.toks.get(self.at), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(format!("expected '{c}', found {other:?}")),
        }
    }

    fn or(&mut self) -> Result<Cond, String> {
        let mut left = self.and()?;
        while self.peek_keyword("OR") {
            self.at += 1;
            left = Cond::Or(Box::new(left), Box::new(self.and()?));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Cond, String> {
        let mut left = self.unary()?;
        while self.peek_keyword("AND") {
            self.at += 1;
            left = Cond::And(Box::new(left), Box::new(self.unary()?));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Cond, String> {
        if self.peek_keyword("NOT") {
            self.at += 1;
            return Ok(Cond::Not(Box::new(self.unary()?)));
        }
        if self.toks.get(self.at) == Some(&Tok::Sym('(')) {
            self.at += 1;
            let c = self.or()?;
            self.expect_sym(')')?;
            return Ok(c);
        }
        self.atom().map(Cond::Atom)
    }

    fn set(&mut self) -> Result<Vec<String>, String> {
        if !self.peek_keyword("IN") {
            return Err("expected IN".into());
        }
        self.at += 1;
        self.expect_sym('{')?;
        let mut items = Vec::new();
        loop {
            match self.next() {
                Some(Tok::Word(w)) | Some(Tok::Quoted(w)) => items.push(w.to_lowercase()),
                other => return Err(format!("expected a set item, found {other:?}")),
            }
            match self.next() {
                Some(Tok::Sym(',')) => continue,
                Some(Tok::Sym('}')) => return Ok(items),
                other => return Err(format!("expected ',' or '}}', found {other:?}")),
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, String> {
        let Some(Tok::Word(word)) = self.next() else {
            return Err("expected a condition".into());
        };
        let lower = word.to_lowercase();
        if lower == "label" {
            return Ok(Atom::Label(self.set()?));
        }
        let (wrap, name): (fn(NodeAtom) -> Atom, &str) = if let Some(n) = lower.strip_prefix("gov.")
        {
            (Atom::Gov, n)
        } else if let Some(n) = lower.strip_prefix("dep.") {
            (Atom::Dep, n)
        } else {
            (Atom::Node, lower.as_str())
        };
        let node = match name {
            "pos" => NodeAtom::Pos(self.set()?),
            "deprel" => NodeAtom::Deprel(self.set()?),
            "in_entity" => NodeAtom::InEntity,
            "pair_head" => NodeAtom::PairHead,
            "on_path" => NodeAtom::OnPath,
            "hops" => {
                self.expect_sym('>')?;
                match self.next() {
                    Some(Tok::Num(n)) => NodeAtom::HopsGt(n),
                    other => return Err(format!("expected a number, found {other:?}")),
                }
            }
            _ => return Err(format!("unknown condition '{word}'")),
        };
        Ok(wrap(node))
    }
}

fn check_kind(c: &Cond, edge_rule: bool) -> Result<(), String> {
    match c {
        Cond::Atom(Atom::Node(_)) if edge_rule => {
            Err("edge rules need 'label', 'gov.' or 'dep.' conditions".into())
        }
        Cond::Atom(Atom::Label(_) | Atom::Gov(_) | Atom::Dep(_)) if !edge_rule => {
            Err("node rules cannot use edge conditions".into())
        }
        Cond::Atom(_) => Ok(()),
        Cond::Not(a) => check_kind(a, edge_rule),
        Cond::And(a, b) | Cond::Or(a, b) => {
            check_kind(a, edge_rule)?;
            check_kind(b, edge_rule)
        }
    }
}

fn parse_rule(line: &str) -> Result<ReductionRule, String> {
    let (name, rest) = line
        .split_once(':')
        .ok_or("expected 'name: IF <condition> THEN <action>'")?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(format!("bad rule name '{name}'"));
    }
    let mut toks = lex(rest)?;
    match toks.first() {
        Some(Tok::Word(w)) if w.eq_ignore_ascii_case("IF") => {}
        _ => return Err("expected IF".into()),
    }
    let action = match toks.pop() {
        Some(Tok::Word(w)) => match w.as_str() {
            "delete-node" => Action::DeleteNode,
            "delete-edge" => Action::DeleteEdge,
            "redirect-edge-to-chunk-head" => Action::RedirectEdgeToChunkHead,
            _ => return Err(format!("unknown action '{w}'")),
        },
        _ => return Err("missing action".into()),
    };
    match toks.pop() {
        Some(Tok::Word(w)) if w.eq_ignore_ascii_case("THEN") => {}
        _ => return Err("expected THEN before the action".into()),
    }
    let mut p = CondParser { toks, at: 1 };
    let cond = p.or()?;
    if p.at != p.toks.len() {
        return Err(format!("unexpected {:?}", p.toks[p.at]));
    }
    check_kind(&cond, action.on_edges())?;
    Ok(ReductionRule {
        name: name.to_string(),
        cond,
        action,
    })
}

/// Parse a rules file. Blank lines and lines starting with `%` or `#` are
/// skipped.
pub fn parse_rules(text: &str) -> Result<Vec<ReductionRule>, RuleError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !(l.is_empty() || l.starts_with('%') || l.starts_with('#'))
        })
        .map(|(i, l)| {
            parse_rule(l.trim()).map_err(|message| RuleError {
                line: i + 1,
                message,
            })
        })
        .collect()
}

/// Distances that node conditions consult; rebuilt after every change.
struct Ctx {
    heads: (usize, usize),
    from_a: Vec<Option<usize>>,
    from_b: Vec<Option<usize>>,
}

impl Ctx {
    fn new(g: &SentenceGraph<'_>, heads: (usize, usize)) -> Ctx {
        Ctx {
            heads,
            from_a: g.hops_from(heads.0),
            from_b: g.hops_from(heads.1),
        }
    }

    fn node(&self, g: &SentenceGraph<'_>, atom: &NodeAtom, i: usize) -> bool {
        match atom {
            NodeAtom::Pos(set) => {
                let pos = g.sentence().tokens[i].pos.to_lowercase();
                set.contains(&pos)
            }
            NodeAtom::Deprel(set) => g
                .edges()
                .iter()
                .any(|e| e.dep == i && set.contains(&e.label.to_lowercase())),
            NodeAtom::InEntity => g.in_entity(i),
            NodeAtom::PairHead => i == self.heads.0 || i == self.heads.1,
            NodeAtom::OnPath => match (self.from_a[i], self.from_b[i], self.from_a[self.heads.1]) {
                (Some(a), Some(b), Some(total)) => a + b == total,
                _ => false,
            },
            NodeAtom::HopsGt(n) => {
                let near = |d: Option<usize>| d.is_some_and(|d| d <= *n);
                !near(self.from_a[i]) && !near(self.from_b[i])
            }
        }
    }

    fn holds_node(&self, g: &SentenceGraph<'_>, c: &Cond, i: usize) -> bool {
        match c {
            Cond::Atom(Atom::Node(a)) => self.node(g, a, i),
            Cond::Atom(_) => false,
            Cond::Not(a) => !self.holds_node(g, a, i),
            Cond::And(a, b) => self.holds_node(g, a, i) && self.holds_node(g, b, i),
            Cond::Or(a, b) => self.holds_node(g, a, i) || self.holds_node(g, b, i),
        }
    }

    fn holds_edge(&self, g: &SentenceGraph<'_>, c: &Cond, e: &DepEdge) -> bool {
        match c {
            Cond::Atom(Atom::Label(set)) => set.contains(&e.label.to_lowercase()),
            Cond::Atom(Atom::Gov(a)) => self.node(g, a, e.gov),
            Cond::Atom(Atom::Dep(a)) => self.node(g, a, e.dep),
            Cond::Atom(Atom::Node(_)) => false,
            Cond::Not(a) => !self.holds_edge(g, a, e),
            Cond::And(a, b) => self.holds_edge(g, a, e) && self.holds_edge(g, b, e),
            Cond::Or(a, b) => self.holds_edge(g, a, e) || self.holds_edge(g, b, e),
        }
    }
}

/// The edge a redirect produces, if the rule applies to `e`.
fn redirected(g: &SentenceGraph<'_>, e: &DepEdge) -> Option<DepEdge> {
    let ci = g.chunk_of(e.gov)?;
    if g.chunk_of(e.dep) != Some(ci) {
        return None;
    }
    let head = g.chunk_head(ci)?;
    if head == e.gov {
        return None;
    }
    let other = if e.dep == head { e.gov } else { e.dep };
    Some(DepEdge {
        label: e.label.clone(),
        gov: head,
        dep: other,
    })
}

/// Apply `rules` in order, repeating until nothing changes.
///
/// Pair head tokens are never deleted, and a change that would disconnect
/// pair heads that were connected beforehand is skipped.
pub fn reduce_graph<'s>(
    g: &SentenceGraph<'s>,
    rules: &[ReductionRule],
    pair: (&EntityMention, &EntityMention),
) -> SentenceGraph<'s> {
    let mut g = g.clone();
    let (Some(a), Some(b)) = (g.entity_head(pair.0), g.entity_head(pair.1)) else {
        return g;
    };
    let heads = (a, b);
    let was_connected = g.connected(a, b);
    let safe = |g: &SentenceGraph<'_>| !was_connected || g.connected(a, b);
    let mut changed = true;
    while changed {
        changed = false;
        for rule in rules {
            let mut ctx = Ctx::new(&g, heads);
            if rule.action.on_edges() {
                let mut k = 0;
                while k < g.edges().len() {
                    let e = g.edges()[k].clone();
                    let mut next = g.clone();
                    let applies = ctx.holds_edge(&g, &rule.cond, &e)
                        && match rule.action {
                            Action::DeleteEdge => {
                                next.remove_edge(k);
                                true
                            }
                            Action::RedirectEdgeToChunkHead => match redirected(&g, &e) {
                                Some(r) => {
                                    next.replace_edge(k, r);
                                    true
                                }
                                None => false,
                            },
                            Action::DeleteNode => false,
                        };
                    if applies && safe(&next) {
                        let shrank = next.edges().len() < g.edges().len();
                        g = next;
                        ctx = Ctx::new(&g, heads);
                        changed = true;
                        if shrank {
                            continue;
                        }
                    }
                    k += 1;
                }
            } else {
                for i in 0..g.token_count() {
                    if !g.is_alive(i) || i == a || i == b || !ctx.holds_node(&g, &rule.cond, i) {
                        continue;
                    }
                    let mut next = g.clone();
                    next.remove_node(i);
                    if safe(&next) {
                        g = next;
                        ctx = Ctx::new(&g, heads);
                        changed = true;
                    }
                }
            }
        }
    }
    g
}
