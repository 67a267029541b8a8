//! Lexer and parser for the clause text format.
//!
//! Accepts Prolog-style clauses terminated by `.`, `%` line comments,
//! `:-` directives, infix integer comparisons and parenthesised `;`
//! disjunctions in bodies. Disjunctions are compiled away here: a clause
//! whose body is `a, (b ; c)` becomes the two clauses `a, b` and `a, c`.

use std::collections::HashMap;

use thiserror::Error;

use super::term::{Clause, Comparison, Literal, Sym, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

impl SyntaxError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Neck,
    Cmp(Comparison),
    Plus,
    Minus,
    Hash,
    Star,
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    line: usize,
}

fn lex(text: &str) -> Result<Vec<Lexeme>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | ',' | ';' | '+' | '#' | '*' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '+' => Tok::Plus,
                    '#' => Tok::Hash,
                    _ => Tok::Star,
                };
                out.push(Lexeme { tok, line });
                i += 1;
            }
            '.' => {
                out.push(Lexeme {
                    tok: Tok::Dot,
                    line,
                });
                i += 1;
            }
            ':' if next == Some('-') => {
                out.push(Lexeme {
                    tok: Tok::Neck,
                    line,
                });
                i += 2;
            }
            '=' if next == Some('<') => {
                out.push(Lexeme {
                    tok: Tok::Cmp(Comparison::Le),
                    line,
                });
                i += 2;
            }
            '>' | '<' => {
                let (cmp, width) = match (c, next) {
                    ('>', Some('=')) => (Comparison::Ge, 2),
                    ('>', _) => (Comparison::Gt, 1),
                    _ => (Comparison::Lt, 1),
                };
                out.push(Lexeme {
                    tok: Tok::Cmp(cmp),
                    line,
                });
                i += width;
            }
            '-' if next.is_some_and(|d| d.is_ascii_digit()) => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<i64>()
                    .map_err(|_| SyntaxError::new(line, format!("integer out of range: {s}")))?;
                out.push(Lexeme {
                    tok: Tok::Int(v),
                    line,
                });
            }
            '-' => {
                out.push(Lexeme {
                    tok: Tok::Minus,
                    line,
                });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<i64>()
                    .map_err(|_| SyntaxError::new(line, format!("integer out of range: {s}")))?;
                out.push(Lexeme {
                    tok: Tok::Int(v),
                    line,
                });
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                i += 1;
                loop {
                    match chars.get(i) {
                        Some(&d) if d.is_ascii_alphanumeric() || d == '_' => i += 1,
                        Some('-')
                            if chars
                                .get(i + 1)
                                .is_some_and(|d| d.is_ascii_alphanumeric() || *d == '_') =>
                        {
                            i += 1
                        }
                        _ => break,
                    }
                }
                out.push(Lexeme {
                    tok: Tok::Atom(chars[start..i].iter().collect()),
                    line,
                });
            }
            c if c.is_ascii_uppercase() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Lexeme {
                    tok: Tok::Var(chars[start..i].iter().collect()),
                    line,
                });
            }
            '\'' | '"' => {
                let quote = c;
                let start_line = line;
                i += 1;
                let mut s = String::new();
                loop {
                    let Some(&d) = chars.get(i) else {
                        return Err(SyntaxError::new(start_line, "unterminated quoted text"));
                    };
                    i += 1;
                    match d {
                        '\\' => {
                            let Some(&e) = chars.get(i) else {
                                return Err(SyntaxError::new(line, "dangling escape"));
                            };
                            i += 1;
                            s.push(match e {
                                'n' => '\n',
                                't' => '\t',
                                other => other,
                            });
                        }
                        d if d == quote => break,
                        '\n' => {
                            line += 1;
                            s.push('\n');
                        }
                        d => s.push(d),
                    }
                }
                let tok = if quote == '"' {
                    Tok::Str(s)
                } else {
                    Tok::Atom(s)
                };
                out.push(Lexeme {
                    tok,
                    line: start_line,
                });
            }
            other => {
                return Err(SyntaxError::new(
                    line,
                    format!("unexpected character '{other}'"),
                ))
            }
        }
    }
    Ok(out)
}

/// Generic parse tree used for directive arguments (mode schemes).
#[derive(Debug, Clone, PartialEq)]
pub enum Tree {
    Atom(String),
    Var(String),
    Int(i64),
    Str(String),
    Star,
    /// `+t`, `-t`, `#t`
    Marker(char, String),
    Compound(String, Vec<Tree>),
}

/// One top-level item of a program text.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    /// A clause; disjunctive bodies expand to several items sharing a line.
    Clause { clause: Clause, line: usize },
    /// A `:- goal.` directive.
    Directive { goal: Tree, line: usize },
}

struct Parser {
    toks: Vec<Lexeme>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|l| l.line)
            .unwrap_or(self.last_line)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|l| l.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        let line = self.line();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(SyntaxError::new(
                line,
                format!("expected {what}, found {}", describe(&t)),
            )),
            None => Err(SyntaxError::new(
                line,
                format!("expected {what}, found end of input"),
            )),
        }
    }

    fn tree(&mut self) -> Result<Tree, SyntaxError> {
        let line = self.line();
        match self.bump() {
            Some(Tok::Atom(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    let mut args = vec![self.tree()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.bump();
                        args.push(self.tree()?);
                    }
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Tree::Compound(name, args))
                } else {
                    Ok(Tree::Atom(name))
                }
            }
            Some(Tok::Var(v)) => Ok(Tree::Var(v)),
            Some(Tok::Int(i)) => Ok(Tree::Int(i)),
            Some(Tok::Str(s)) => Ok(Tree::Str(s)),
            Some(Tok::Star) => Ok(Tree::Star),
            Some(m @ (Tok::Plus | Tok::Minus | Tok::Hash)) => {
                let mark = match m {
                    Tok::Plus => '+',
                    Tok::Minus => '-',
                    _ => '#',
                };
                let line = self.line();
                match self.bump() {
                    Some(Tok::Atom(ty)) => Ok(Tree::Marker(mark, ty)),
                    _ => Err(SyntaxError::new(
                        line,
                        format!("expected a type name after '{mark}'"),
                    )),
                }
            }
            Some(t) => Err(SyntaxError::new(
                line,
                format!("unexpected {}", describe(&t)),
            )),
            None => Err(SyntaxError::new(line, "unexpected end of input")),
        }
    }

    /// disj := conj (';' conj)*, returned in disjunctive normal form.
    fn disjunction(&mut self, vars: &mut VarTable) -> Result<Vec<Vec<Literal>>, SyntaxError> {
        let mut alts = self.conjunction(vars)?;
        while self.peek() == Some(&Tok::Semi) {
            self.bump();
            alts.extend(self.conjunction(vars)?);
        }
        Ok(alts)
    }

    fn conjunction(&mut self, vars: &mut VarTable) -> Result<Vec<Vec<Literal>>, SyntaxError> {
        let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
        loop {
            let unit = if self.peek() == Some(&Tok::LParen) {
                self.bump();
                let inner = self.disjunction(vars)?;
                self.expect(Tok::RParen, "')'")?;
                inner
            } else {
                vec![vec![self.goal(vars)?]]
            };
            let mut next = Vec::with_capacity(acc.len() * unit.len());
            for prefix in &acc {
                for alt in &unit {
                    let mut v = prefix.clone();
                    v.extend(alt.iter().cloned());
                    next.push(v);
                }
            }
            acc = next;
            if self.peek() == Some(&Tok::Comma) {
                self.bump();
            } else {
                return Ok(acc);
            }
        }
    }

    fn goal(&mut self, vars: &mut VarTable) -> Result<Literal, SyntaxError> {
        let line = self.line();
        let left = self.tree()?;
        if let Some(Tok::Cmp(op)) = self.peek().cloned() {
            self.bump();
            let right = self.tree()?;
            let a = tree_to_term(left, vars, line)?;
            let b = tree_to_term(right, vars, line)?;
            return Ok(Literal {
                pred: Sym::new(op.symbol()),
                args: vec![a, b],
            });
        }
        tree_to_literal(left, vars, line)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Atom(a) => format!("atom '{a}'"),
        Tok::Var(v) => format!("variable '{v}'"),
        Tok::Int(i) => format!("integer {i}"),
        Tok::Str(_) => "string".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Semi => "';'".into(),
        Tok::Dot => "'.'".into(),
        Tok::Neck => "':-'".into(),
        Tok::Cmp(c) => format!("'{}'", c.symbol()),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Hash => "'#'".into(),
        Tok::Star => "'*'".into(),
    }
}

#[derive(Default)]
struct VarTable {
    names: HashMap<String, Var>,
    next: u32,
}

impl VarTable {
    fn get(&mut self, name: &str) -> Var {
        if name == "_" {
            let v = Var(self.next);
            self.next += 1;
            return v;
        }
        if let Some(v) = self.names.get(name) {
            return *v;
        }
        let v = Var(self.next);
        self.next += 1;
        self.names.insert(name.to_string(), v);
        v
    }
}

fn tree_to_term(t: Tree, vars: &mut VarTable, line: usize) -> Result<Term, SyntaxError> {
    match t {
        Tree::Atom(a) => Ok(Term::Const(Sym::new(&a))),
        Tree::Var(v) => Ok(Term::Var(vars.get(&v))),
        Tree::Int(i) => Ok(Term::Int(i)),
        Tree::Str(s) => Ok(Term::Str(Sym::new(&s))),
        Tree::Compound(name, _) => Err(SyntaxError::new(
            line,
            format!("nested compound term '{name}(...)' is not supported"),
        )),
        Tree::Star | Tree::Marker(..) => Err(SyntaxError::new(
            line,
            "mode markers are only valid inside mode declarations",
        )),
    }
}

fn tree_to_literal(t: Tree, vars: &mut VarTable, line: usize) -> Result<Literal, SyntaxError> {
    match t {
        Tree::Atom(a) => Ok(Literal {
            pred: Sym::new(&a),
            args: Vec::new(),
        }),
        Tree::Compound(name, args) => Ok(Literal {
            pred: Sym::new(&name),
            args: args
                .into_iter()
                .map(|a| tree_to_term(a, vars, line))
                .collect::<Result<_, _>>()?,
        }),
        other => Err(SyntaxError::new(
            line,
            format!("expected a literal, found {other:?}"),
        )),
    }
}

/// Parse a whole program text into clauses and directives.
pub fn parse_program(text: &str) -> Result<Vec<Item>, SyntaxError> {
    let toks = lex(text)?;
    let last_line = toks.last().map(|l| l.line).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        last_line,
    };
    let mut items = Vec::new();
    while p.peek().is_some() {
        let line = p.line();
        if p.peek() == Some(&Tok::Neck) {
            p.bump();
            let goal = p.tree()?;
            p.expect(Tok::Dot, "'.' after directive")?;
            items.push(Item::Directive { goal, line });
            continue;
        }
        let mut vars = VarTable::default();
        let head = p.goal(&mut vars)?;
        if head.comparison().is_some() {
            return Err(SyntaxError::new(
                line,
                "a comparison cannot be a clause head",
            ));
        }
        let bodies = if p.peek() == Some(&Tok::Neck) {
            p.bump();
            p.disjunction(&mut vars)?
        } else {
            vec![Vec::new()]
        };
        p.expect(Tok::Dot, "'.' at end of clause")?;
        for body in bodies {
            items.push(Item::Clause {
                clause: Clause::new(head.clone(), body).canonical(),
                line,
            });
        }
    }
    Ok(items)
}

/// Parse exactly one clause (disjunctions are rejected here).
pub fn parse_clause(text: &str) -> Result<Clause, SyntaxError> {
    let mut items = parse_program(text)?;
    match (items.len(), items.pop()) {
        (1, Some(Item::Clause { clause, .. })) => Ok(clause),
        _ => Err(SyntaxError::new(1, "expected exactly one clause")),
    }
}

/// Parse a ground or non-ground literal such as `t_next(t1,X)`.
pub fn parse_literal(text: &str) -> Result<Literal, SyntaxError> {
    Ok(parse_query(text)?.0.remove(0))
}

/// Parse a comma-separated conjunctive query, returning the goals and the
/// source variable names indexed by variable number.
pub fn parse_query(text: &str) -> Result<(Vec<Literal>, Vec<String>), SyntaxError> {
    let toks = lex(text)?;
    let last_line = toks.last().map(|l| l.line).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        last_line,
    };
    let mut vars = VarTable::default();
    let mut alts = p.conjunction(&mut vars)?;
    if p.peek() == Some(&Tok::Dot) {
        p.bump();
    }
    if p.peek().is_some() {
        return Err(SyntaxError::new(p.line(), "trailing input after query"));
    }
    if alts.len() != 1 {
        return Err(SyntaxError::new(1, "disjunctive queries are not supported"));
    }
    let mut names = vec![String::new(); vars.next as usize];
    for (n, v) in vars.names {
        names[v.0 as usize] = n;
    }
    Ok((alts.remove(0), names))
}
