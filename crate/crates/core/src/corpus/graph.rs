//! Graph view of a sentence: dependency edges plus the implicit token chain,
//! chunk membership and chunk succession.

use std::collections::VecDeque;

use super::{EntityMention, Sentence};

/// A dependency edge between token indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepEdge {
    pub label: String,
    pub gov: usize,
    pub dep: usize,
}

/// Token-indexed sentence graph. Deleted tokens stay in the index space but
/// are marked dead; the token chain and chunk succession are derived from the
/// surviving tokens, so they always form simple paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceGraph<'s> {
    sentence: &'s Sentence,
    alive: Vec<bool>,
    edges: Vec<DepEdge>,
    chunk_of: Vec<Option<usize>>,
    in_entity: Vec<bool>,
    root: Option<usize>,
}

pub fn build_graph(s: &Sentence) -> SentenceGraph<'_> {
    let index = s.token_index();
    let n = s.tokens.len();
    let edges: Vec<DepEdge> = s
        .dependencies
        .iter()
        .map(|d| DepEdge {
            label: d.label.clone(),
            gov: index[d.governor.as_str()],
            dep: index[d.dependent.as_str()],
        })
        .collect();
    let mut chunk_of = vec![None; n];
    for (ci, c) in s.chunks.iter().enumerate() {
        for t in &c.token_ids {
            chunk_of[index[t.as_str()]] = Some(ci);
        }
    }
    let mut in_entity = vec![false; n];
    for e in &s.entities {
        for t in &e.token_ids {
            in_entity[index[t.as_str()]] = true;
        }
    }
    let root = match &s.root {
        Some(r) => Some(index[r.as_str()]),
        None => {
            (0..n).find(|&i| edges.iter().all(|e| e.dep != i) && edges.iter().any(|e| e.gov == i))
        }
    };
    SentenceGraph {
        sentence: s,
        alive: vec![true; n],
        edges,
        chunk_of,
        in_entity,
        root,
    }
}

impl<'s> SentenceGraph<'s> {
    pub fn sentence(&self) -> &'s Sentence {
        self.sentence
    }

    pub fn token_count(&self) -> usize {
        self.alive.len()
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    pub fn alive_tokens(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(|&i| self.alive[i])
    }

    pub fn edges(&self) -> &[DepEdge] {
        &self.edges
    }

    pub fn chunk_of(&self, i: usize) -> Option<usize> {
        self.chunk_of[i]
    }

    pub fn in_entity(&self, i: usize) -> bool {
        self.in_entity[i]
    }

    /// The root token, if it survives.
    pub fn root(&self) -> Option<usize> {
        self.root.filter(|&r| self.alive[r])
    }

    /// Consecutive pairs of surviving tokens.
    pub fn next_edges(&self) -> Vec<(usize, usize)> {
        let alive: Vec<usize> = self.alive_tokens().collect();
        alive.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Chunks with at least one surviving token, in sentence order.
    pub fn alive_chunks(&self) -> Vec<usize> {
        (0..self.sentence.chunks.len())
            .filter(|&ci| self.chunk_tokens(ci).next().is_some())
            .collect()
    }

    pub fn chunk_tokens(&self, ci: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(move |&i| self.alive[i] && self.chunk_of[i] == Some(ci))
    }

    /// Rightmost surviving token of a chunk.
    pub fn chunk_head(&self, ci: usize) -> Option<usize> {
        self.chunk_tokens(ci).last()
    }

    /// Pairs of consecutive surviving chunks.
    pub fn chunk_succession(&self) -> Vec<(usize, usize)> {
        self.alive_chunks()
            .windows(2)
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Head token index of an entity mention of this sentence.
    pub fn entity_head(&self, e: &EntityMention) -> Option<usize> {
        self.sentence.tokens.iter().position(|t| t.id == e.head())
    }

    pub fn remove_node(&mut self, i: usize) {
        self.alive[i] = false;
        self.edges.retain(|e| e.gov != i && e.dep != i);
    }

    pub fn remove_edge(&mut self, k: usize) -> DepEdge {
        self.edges.remove(k)
    }

    /// Replace edge `k`; a replacement equal to an existing edge just drops it.
    pub fn replace_edge(&mut self, k: usize, edge: DepEdge) {
        if self.edges.contains(&edge) {
            self.edges.remove(k);
        } else {
            self.edges[k] = edge;
        }
    }

    /// Undirected dependency-hop distances from `from`; `None` when unreachable.
    pub fn hops_from(&self, from: usize) -> Vec<Option<usize>> {
        let n = self.alive.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.gov].push(e.dep);
            adj[e.dep].push(e.gov);
        }
        let mut dist = vec![None; n];
        if !self.alive[from] {
            return dist;
        }
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or_default();
            for &v in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Whether `a` and `b` are joined by dependency edges, ignoring direction.
    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.hops_from(a)[b].is_some()
    }

    /// Merge the surviving nodes and edges of another reduction of the same
    /// sentence into this one.
    pub fn union_with(&mut self, other: &SentenceGraph<'s>) {
        for (a, b) in self.alive.iter_mut().zip(&other.alive) {
            *a |= *b;
        }
        for e in &other.edges {
            if !self.edges.contains(e) {
                self.edges.push(e.clone());
            }
        }
    }

    /// An empty graph over the same sentence, the identity for `union_with`.
    pub fn emptied(&self) -> SentenceGraph<'s> {
        SentenceGraph {
            alive: vec![false; self.alive.len()],
            edges: Vec::new(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::load_corpus;
    use super::*;

    pub(crate) const ONE: &str = r#"{"id":"d","sentences":[{"id":"s","tokens":[{"id":"t1","surface":"x","lemma":"x","pos":"NN","char_start":0,"char_end":1}]}]}"#;

    #[test]
    fn single_token() {
        let c = load_corpus(ONE).unwrap();
        let g = build_graph(&c.documents[0].sentences[0]);
        assert_eq!(g.token_count(), 1);
        assert!(g.edges().is_empty());
        assert!(g.next_edges().is_empty());
        assert_eq!(g.root(), None);
    }

    #[test]
    fn removal_splices_chain_and_drops_edges() {
        let text = ONE.replace(
            r#""char_end":1}]"#,
            r#""char_end":1},{"id":"t2","surface":"y","lemma":"y","pos":"VBZ","char_start":2,"char_end":3},{"id":"t3","surface":"z","lemma":"z","pos":"NN","char_start":4,"char_end":5}],"dependencies":[{"label":"nsubj","governor":"t2","dependent":"t1"},{"label":"dobj","governor":"t2","dependent":"t3"}]"#,
        );
        let c = load_corpus(&text).unwrap();
        let mut g = build_graph(&c.documents[0].sentences[0]);
        assert_eq!(g.root(), Some(1));
        assert_eq!(g.next_edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.hops_from(0), vec![Some(0), Some(1), Some(2)]);
        g.remove_node(1);
        assert_eq!(g.next_edges(), vec![(0, 2)]);
        assert!(g.edges().is_empty());
        assert!(!g.connected(0, 2));
        assert_eq!(g.root(), None);
    }
}
