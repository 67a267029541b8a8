//! A small class hierarchy used to generalise entity typing facts.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cycle through class '{0}'")]
    Cycle(String),
    #[error("taxonomy has several roots: {0}")]
    Roots(String),
    #[error("unknown class '{0}'")]
    UnknownClass(String),
}

/// Class to parent map plus synonyms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    parent: BTreeMap<String, Option<String>>,
    synonyms: BTreeMap<String, String>,
}

/// Parse a taxonomy file.
///
/// Hierarchy lines are `child<TAB>parent`; a line with a single class
/// declares it (typically the root). After a `[synonyms]` line, entries are
/// `synonym<TAB>class`. Blank lines and lines starting with `%` or `#` are
/// ignored.
pub fn load_taxonomy(text: &str) -> Result<Taxonomy, TaxonomyError> {
    let mut t = Taxonomy::default();
    let mut in_synonyms = false;
    let mut pending_synonyms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        if line == "[synonyms]" {
            in_synonyms = true;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let format = |message: &str| TaxonomyError::Format {
            line: line_no,
            message: message.to_string(),
        };
        match (in_synonyms, fields.as_slice()) {
            (false, [class]) => {
                t.parent.entry(class.to_string()).or_insert(None);
            }
            (false, [child, parent]) => {
                if let Some(Some(old)) = t.parent.get(*child) {
                    if old != parent {
                        return Err(format(&format!("'{child}' has two parents")));
                    }
                }
                t.parent.insert(child.to_string(), Some(parent.to_string()));
                t.parent.entry(parent.to_string()).or_insert(None);
            }
            (true, [syn, class]) => {
                pending_synonyms.push((line_no, syn.to_string(), class.to_string()))
            }
            (false, _) => return Err(format("expected 'child<TAB>parent' or a single class")),
            (true, _) => return Err(format("expected 'synonym<TAB>class'")),
        }
    }
    for (line, syn, class) in pending_synonyms {
        if !t.parent.contains_key(&class) {
            return Err(TaxonomyError::Format {
                line,
                message: format!("synonym '{syn}' refers to unknown class '{class}'"),
            });
        }
        t.synonyms.insert(syn, class);
    }
    t.check()?;
    Ok(t)
}

impl Taxonomy {
    fn check(&self) -> Result<(), TaxonomyError> {
        for class in self.parent.keys() {
            let mut steps = 0;
            let mut cur = class;
            while let Some(Some(p)) = self.parent.get(cur) {
                steps += 1;
                if steps > self.parent.len() {
                    return Err(TaxonomyError::Cycle(class.clone()));
                }
                cur = p;
            }
        }
        let roots: Vec<&str> = self
            .parent
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(c, _)| c.as_str())
            .collect();
        if roots.len() > 1 {
            return Err(TaxonomyError::Roots(roots.join(", ")));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.resolve(name).is_some()
    }

    /// Canonical class for a class name or synonym.
    pub fn resolve<'a>(&'a self, name: &'a str) -> Option<&'a str> {
        if self.parent.contains_key(name) {
            return Some(name);
        }
        self.synonyms.get(name).map(String::as_str)
    }

    /// The chain from the class's parent up to the root.
    pub fn ancestors(&self, class: &str) -> Result<Vec<String>, TaxonomyError> {
        let class = self
            .resolve(class)
            .ok_or_else(|| TaxonomyError::UnknownClass(class.to_string()))?;
        let mut out = Vec::new();
        let mut cur = class;
        while let Some(Some(p)) = self.parent.get(cur) {
            out.push(p.clone());
            cur = p;
        }
        Ok(out)
    }
}
