//! Terms, literals and definite clauses.
//!
//! Constant and predicate names are interned into [`Sym`] handles so that
//! index lookups and unification compare integers rather than strings.
//! Variables are numbered per clause; printing renames them `A`, `B`, ...
//! by first occurrence.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Interned symbol (constant, string payload or predicate name).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

struct Interner {
    ids: HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

fn interner() -> &'static Mutex<Interner> {
    static INTERNER: OnceLock<Mutex<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        Mutex::new(Interner {
            ids: HashMap::new(),
            names: Vec::new(),
        })
    })
}

impl Sym {
    pub fn new(name: &str) -> Sym {
        let mut table = interner().lock().expect("symbol table poisoned");
        if let Some(&id) = table.ids.get(name) {
            return Sym(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Sym(id)
    }

    pub fn as_str(self) -> &'static str {
        interner().lock().expect("symbol table poisoned").names[self.0 as usize]
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Clause-local variable number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    /// Canonical printed name: `A`..`Z`, then `A1`..`Z1`, ...
    pub fn name(self) -> String {
        let letter = (b'A' + (self.0 % 26) as u8) as char;
        let round = self.0 / 26;
        if round == 0 {
            letter.to_string()
        } else {
            format!("{letter}{round}")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(Sym),
    Int(i64),
    Str(Sym),
}

impl Term {
    pub fn var(n: u32) -> Term {
        Term::Var(Var(n))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Sym::new(name))
    }

    pub fn string(text: &str) -> Term {
        Term::Str(Sym::new(text))
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }
}

/// True when `name` can be printed as a bare atom.
pub fn is_bare_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    let mut prev_hyphen = false;
    for c in chars {
        if c == '-' {
            if prev_hyphen {
                return false;
            }
            prev_hyphen = true;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            prev_hyphen = false;
        } else {
            return false;
        }
    }
    !prev_hyphen
}

pub(crate) fn write_atom(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_bare_atom(name) {
        f.write_str(name)
    } else {
        f.write_char('\'')?;
        for c in name.chars() {
            match c {
                '\'' => f.write_str("\\'")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\t' => f.write_str("\\t")?,
                c => f.write_char(c)?,
            }
        }
        f.write_char('\'')
    }
}

fn write_string(f: &mut impl fmt::Write, text: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in text.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl Term {
    fn write_with(&self, f: &mut impl fmt::Write, names: &dyn Fn(Var) -> String) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(&names(*v)),
            Term::Const(s) => write_atom(f, s.as_str()),
            Term::Int(i) => write!(f, "{i}"),
            Term::Str(s) => write_string(f, s.as_str()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|v| v.name())
    }
}

/// Arithmetic comparison builtins usable in intensional clause bodies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparison {
    pub fn from_symbol(s: &str) -> Option<Comparison> {
        match s {
            "<" => Some(Comparison::Lt),
            "=<" => Some(Comparison::Le),
            ">" => Some(Comparison::Gt),
            ">=" => Some(Comparison::Ge),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "=<",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Comparison::Lt => a < b,
            Comparison::Le => a <= b,
            Comparison::Gt => a > b,
            Comparison::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(pred: &str, args: Vec<Term>) -> Literal {
        Literal {
            pred: Sym::new(pred),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> (Sym, usize) {
        (self.pred, self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn comparison(&self) -> Option<Comparison> {
        if self.args.len() == 2 {
            Comparison::from_symbol(self.pred.as_str())
        } else {
            None
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.args.iter().filter_map(Term::as_var)
    }

    fn write_with(&self, f: &mut impl fmt::Write, names: &dyn Fn(Var) -> String) -> fmt::Result {
        if let Some(op) = self.comparison() {
            self.args[0].write_with(f, names)?;
            write!(f, " {} ", op.symbol())?;
            return self.args[1].write_with(f, names);
        }
        write_atom(f, self.pred.as_str())?;
        if !self.args.is_empty() {
            f.write_char('(')?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                a.write_with(f, names)?;
            }
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|v| v.name())
    }
}

/// A definite clause `head :- body`. A fact has an empty body and a ground head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Literal, body: Vec<Literal>) -> Clause {
        Clause { head, body }
    }

    pub fn fact(head: Literal) -> Clause {
        Clause {
            head,
            body: Vec::new(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.head.is_ground()
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        std::iter::once(&self.head).chain(self.body.iter())
    }

    /// One past the largest variable number used.
    pub fn var_span(&self) -> u32 {
        self.literals()
            .flat_map(Literal::vars)
            .map(|v| v.0 + 1)
            .max()
            .unwrap_or(0)
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut seen = Vec::new();
        for v in self.literals().flat_map(Literal::vars) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }

    /// Renumber variables 0.. by first occurrence, so structurally equal
    /// clauses compare and hash equal.
    pub fn canonical(&self) -> Clause {
        let order = self.vars_in_order();
        if order.iter().enumerate().all(|(i, v)| v.0 == i as u32) {
            return self.clone();
        }
        let map: HashMap<Var, Var> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, Var(i as u32)))
            .collect();
        let rename = |l: &Literal| Literal {
            pred: l.pred,
            args: l
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(map[v]),
                    t => *t,
                })
                .collect(),
        };
        Clause {
            head: rename(&self.head),
            body: self.body.iter().map(rename).collect(),
        }
    }

    pub fn with_body(&self, body: Vec<Literal>) -> Clause {
        Clause {
            head: self.head.clone(),
            body,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = self.vars_in_order();
        let names = |v: Var| {
            let idx = order.iter().position(|o| *o == v).unwrap_or(0) as u32;
            Var(idx).name()
        };
        self.head.write_with(f, &names)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                l.write_with(f, &names)?;
            }
        }
        f.write_char('.')
    }
}

use std::fmt::Write as _;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_names_follow_first_occurrence() {
        let c = Clause::new(
            Literal::new("r", vec![Term::var(7), Term::var(3)]),
            vec![Literal::new("t_next", vec![Term::var(7), Term::var(3)])],
        );
        assert_eq!(c.to_string(), "r(A,B) :- t_next(A,B).");
        assert_eq!(Var(27).name(), "B1");
    }

    #[test]
    fn atoms_quote_when_needed() {
        let l = Literal::new(
            "t_subtype",
            vec![Term::constant("state-or-province"), Term::constant("NNP")],
        );
        assert_eq!(l.to_string(), "t_subtype(state-or-province,'NNP')");
        assert!(!is_bare_atom("a-"));
        assert!(!is_bare_atom("prp$"));
        assert!(is_bare_atom("vbz-vbg-dt"));
    }

    #[test]
    fn comparisons_print_infix() {
        let l = Literal::new("=<", vec![Term::var(1), Term::Int(-3)]);
        assert_eq!(l.to_string(), "B =< -3");
    }

    #[test]
    fn canonical_renumbers() {
        let c = Clause::new(Literal::new("r", vec![Term::var(4), Term::var(2)]), vec![]);
        let k = c.canonical();
        assert_eq!(k.head.args, vec![Term::var(0), Term::var(1)]);
    }
}
