//! Directed word-adjacency graph.
//!
//! Nodes are unique words. An edge `u -> v` records that `v` immediately
//! followed `u` inside some sentence; its multiplicity counts how often.
//! Multiplicities are metadata only, every path computation treats edges as
//! unit length.
//!
//! Node indices are assigned in lexicographic word order when the graph is
//! finalized, so the structure does not depend on document order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::TokenizedDocument;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("word {0:?} is not in the graph")]
    UnknownWord(String),
    #[error("unknown direction {0:?} (expected in, out or both)")]
    UnknownDirection(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
    Both,
}

impl FromStr for Direction {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(Direction::In),
            "out" => Ok(Direction::Out),
            "both" => Ok(Direction::Both),
            _ => Err(GraphError::UnknownDirection(s.to_string())),
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct WordGraph {
    words: Vec<String>,
    index: HashMap<String, u32>,
    // Both adjacency lists are sorted by node index.
    out_adj: Vec<Vec<u32>>,
    out_mult: Vec<Vec<u64>>,
    in_adj: Vec<Vec<u32>>,
    node_freq: Vec<u64>,
}

impl fmt::Debug for WordGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordGraph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Accumulates node frequencies and edge multiplicities before the graph
/// is frozen into index order.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: HashMap<String, u32>,
    words: Vec<String>,
    freq: Vec<u64>,
    edges: HashMap<(u32, u32), u64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.ids.insert(word.to_owned(), id);
        self.words.push(word.to_owned());
        self.freq.push(0);
        id
    }

    pub fn add_node(&mut self, word: &str, freq: u64) {
        let id = self.intern(word);
        self.freq[id as usize] += freq;
    }

    /// Adds `multiplicity` occurrences of `source -> target`. Self-loops only
    /// register their endpoint as a node.
    pub fn add_edge(&mut self, source: &str, target: &str, multiplicity: u64) {
        let u = self.intern(source);
        let v = self.intern(target);
        if u != v && multiplicity > 0 {
            *self.edges.entry((u, v)).or_default() += multiplicity;
        }
    }

    pub fn add_sentence<S: AsRef<str>>(&mut self, sentence: &[S]) {
        let ids: Vec<u32> = sentence
            .iter()
            .map(|w| {
                let id = self.intern(w.as_ref());
                self.freq[id as usize] += 1;
                id
            })
            .collect();
        for pair in ids.windows(2) {
            if pair[0] != pair[1] {
                *self.edges.entry((pair[0], pair[1])).or_default() += 1;
            }
        }
    }

    pub fn add_document(&mut self, doc: &TokenizedDocument) {
        for s in &doc.sentences {
            self.add_sentence(s);
        }
    }

    /// Merges another builder's counts into this one by summation.
    pub fn merge(&mut self, other: GraphBuilder) {
        let remap: Vec<u32> = other
            .words
            .iter()
            .zip(&other.freq)
            .map(|(w, &f)| {
                let id = self.intern(w);
                self.freq[id as usize] += f;
                id
            })
            .collect();
        for ((u, v), m) in other.edges {
            *self
                .edges
                .entry((remap[u as usize], remap[v as usize]))
                .or_default() += m;
        }
    }

    pub fn finish(self) -> WordGraph {
        let n = self.words.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by(|&a, &b| self.words[a as usize].cmp(&self.words[b as usize]));
        let mut rank = vec![0u32; n];
        for (new, &old) in order.iter().enumerate() {
            rank[old as usize] = new as u32;
        }

        let mut edges: Vec<(u32, u32, u64)> = self
            .edges
            .into_iter()
            .map(|((u, v), m)| (rank[u as usize], rank[v as usize], m))
            .collect();
        edges.sort_unstable();

        let mut out_adj = vec![Vec::new(); n];
        let mut out_mult = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v, m) in &edges {
            out_adj[u as usize].push(v);
            out_mult[u as usize].push(m);
            in_adj[v as usize].push(u);
        }
        for preds in &mut in_adj {
            preds.sort_unstable();
        }

        let mut words = self.words;
        let mut freq_old = self.freq;
        let mut sorted_words = Vec::with_capacity(n);
        let mut node_freq = Vec::with_capacity(n);
        for &old in &order {
            sorted_words.push(std::mem::take(&mut words[old as usize]));
            node_freq.push(std::mem::take(&mut freq_old[old as usize]));
        }
        let index = sorted_words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();

        WordGraph {
            words: sorted_words,
            index,
            out_adj,
            out_mult,
            in_adj,
            node_freq,
        }
    }
}

impl WordGraph {
    /// Builds the adjacency graph of a tokenized corpus. Sentence boundaries
    /// never produce edges.
    pub fn build<'a, I>(docs: I) -> WordGraph
    where
        I: IntoIterator<Item = &'a TokenizedDocument>,
    {
        let mut b = GraphBuilder::new();
        for d in docs {
            b.add_document(d);
        }
        b.finish()
    }

    /// Builds a graph from `(source, target, multiplicity)` triples.
    /// Self-loops and zero multiplicities contribute nodes but no edges.
    pub fn from_edges<'a, I>(edges: I) -> WordGraph
    where
        I: IntoIterator<Item = (&'a str, &'a str, u64)>,
    {
        let mut b = GraphBuilder::new();
        for (s, t, m) in edges {
            b.add_edge(s, t, m);
        }
        b.finish()
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, node: usize) -> &str {
        &self.words[node]
    }

    /// Words in node-index (lexicographic) order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).map(|&i| i as usize)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn successors(&self, node: usize) -> &[u32] {
        &self.out_adj[node]
    }

    pub fn predecessors(&self, node: usize) -> &[u32] {
        &self.in_adj[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_adj[node].len()
    }

    /// Number of corpus occurrences of the word (0 for graphs built from edges).
    pub fn node_freq(&self, node: usize) -> u64 {
        self.node_freq[node]
    }

    pub fn multiplicity(&self, source: usize, target: usize) -> Option<u64> {
        let succ = &self.out_adj[source];
        succ.binary_search(&(target as u32))
            .ok()
            .map(|i| self.out_mult[source][i])
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.multiplicity(source, target).is_some()
    }

    /// All edges as `(source, target, multiplicity)` in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.out_adj.iter().enumerate().flat_map(move |(u, succ)| {
            succ.iter()
                .zip(&self.out_mult[u])
                .map(move |(&v, &m)| (u, v as usize, m))
        })
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.out_mult.iter().flatten().sum()
    }

    /// Induced subgraph on `members` (node indices of `self`). Frequencies are
    /// carried over from the parent.
    pub fn induced(&self, members: &[usize]) -> WordGraph {
        let mut b = GraphBuilder::new();
        let mut inside = vec![false; self.node_count()];
        for &m in members {
            inside[m] = true;
        }
        for &m in members {
            b.add_node(&self.words[m], self.node_freq[m]);
        }
        for &u in members {
            for (&v, &mult) in self.out_adj[u].iter().zip(&self.out_mult[u]) {
                if inside[v as usize] {
                    b.add_edge(&self.words[u], &self.words[v as usize], mult);
                }
            }
        }
        b.finish()
    }

    pub fn neighbors(
        &self,
        word: &str,
        direction: Direction,
    ) -> Result<Vec<(String, u64)>, GraphError> {
        let node = self
            .index_of(word)
            .ok_or_else(|| GraphError::UnknownWord(word.to_string()))?;
        let mut acc: HashMap<usize, u64> = HashMap::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            for (&v, &m) in self.out_adj[node].iter().zip(&self.out_mult[node]) {
                *acc.entry(v as usize).or_default() += m;
            }
        }
        if matches!(direction, Direction::In | Direction::Both) {
            for &u in &self.in_adj[node] {
                let m = self.multiplicity(u as usize, node).unwrap_or(0);
                *acc.entry(u as usize).or_default() += m;
            }
        }
        let mut out: Vec<(String, u64)> = acc
            .into_iter()
            .map(|(v, m)| (self.words[v].clone(), m))
            .collect();
        out.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Node indices adjacent to `node` in either direction, ascending.
    pub fn undirected_neighbors(&self, node: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.out_adj[node]
            .iter()
            .chain(&self.in_adj[node])
            .map(|&v| v as usize)
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// The ego network of a topic word: the word, its direct in- and
/// out-neighbors, and every parent edge among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    anchor: String,
    graph: WordGraph,
}

impl Subgraph {
    pub fn anchor(&self) -> &str {
        &self.anchor
    }

    pub fn graph(&self) -> &WordGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn members(&self) -> &[String] {
        self.graph.words()
    }
}

pub fn induce_topic_subgraph(g: &WordGraph, anchor: &str) -> Result<Subgraph, GraphError> {
    let center = g
        .index_of(anchor)
        .ok_or_else(|| GraphError::UnknownWord(anchor.to_string()))?;
    let mut members = g.undirected_neighbors(center);
    members.push(center);
    Ok(Subgraph {
        anchor: anchor.to_string(),
        graph: g.induced(&members),
    })
}
