use std::collections::BTreeMap;
use std::fmt;

use super::term::{Literal, Term, Var};

/// Variable bindings. Kept fully resolved: no bound term mentions a bound
/// variable, so applying twice equals applying once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.bindings.get(&v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn resolve(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.bindings.get(v).copied().unwrap_or(*t),
            t => *t,
        }
    }

    pub fn apply(&self, lit: &Literal) -> Literal {
        Literal {
            pred: lit.pred,
            args: lit.args.iter().map(|t| self.resolve(t)).collect(),
        }
    }

    /// Bind `v` to `t`, keeping the substitution resolved. `t` must already be
    /// resolved against `self` and must not be `v` itself.
    pub fn bind(&mut self, v: Var, t: Term) {
        debug_assert_ne!(Term::Var(v), t, "occurs check");
        for value in self.bindings.values_mut() {
            if *value == Term::Var(v) {
                *value = t;
            }
        }
        self.bindings.insert(v, t);
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            let t = s.resolve(&t);
            if t != Term::Var(v) {
                s.bind(v, t);
            }
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}↦{}", v.name(), t)?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of `a` and `b` extending `theta`, or `None`.
///
/// Terms are flat (no function symbols), so the occurs check reduces to never
/// binding a variable to itself.
pub fn unify(a: &Literal, b: &Literal, theta: &Substitution) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = theta.clone();
    for (x, y) in a.args.iter().zip(&b.args) {
        let x = s.resolve(x);
        let y = s.resolve(y);
        if x == y {
            continue;
        }
        match (x, y) {
            (Term::Var(v), t) | (t, Term::Var(v)) => s.bind(v, t),
            _ => return None,
        }
    }
    Some(s)
}
