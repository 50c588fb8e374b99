//! Topic selection around an anchor word and within-topic keyword ranking.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{betweenness_exact, log_transform, CentralityTable};
use crate::graph::{induce_topic_subgraph, GraphError, Subgraph, WordGraph};

pub const DEFAULT_FALLBACK: &str = "miscellaneous";

#[derive(Debug, Error)]
pub enum TopicError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: malformed lexicon row {row}: {reason}")]
    Malformed {
        path: PathBuf,
        row: usize,
        reason: String,
    },
    #[error("word {0:?} is assigned to more than one category")]
    DuplicateWord(String),
    #[error("empty category name for word {0:?}")]
    EmptyCategory(String),
}

/// Maps words to user-defined categories. Unassigned words fall into the
/// fallback category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryLexicon {
    assignments: HashMap<String, String>,
    categories: Vec<String>,
    fallback: String,
}

impl Default for CategoryLexicon {
    fn default() -> Self {
        Self::with_fallback(DEFAULT_FALLBACK)
    }
}

#[derive(Debug, Deserialize)]
struct LexiconRow {
    word: String,
    category: String,
}

impl CategoryLexicon {
    pub fn with_fallback(fallback: impl Into<String>) -> Self {
        CategoryLexicon {
            assignments: HashMap::new(),
            categories: Vec::new(),
            fallback: fallback.into(),
        }
    }

    pub fn assign(&mut self, word: &str, category: &str) -> Result<(), TopicError> {
        let word = word.trim().to_lowercase();
        let category = category.trim();
        if category.is_empty() {
            return Err(TopicError::EmptyCategory(word));
        }
        if self.assignments.contains_key(&word) {
            return Err(TopicError::DuplicateWord(word));
        }
        if !self.categories.iter().any(|c| c == category) {
            self.categories.push(category.to_string());
        }
        self.assignments.insert(word, category.to_string());
        Ok(())
    }

    /// Reads a `word,category` CSV. Categories are declared in order of
    /// first appearance.
    pub fn from_csv(path: &Path) -> Result<Self, TopicError> {
        let text = fs::read_to_string(path).map_err(|source| TopicError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut lex = CategoryLexicon::default();
        for (i, row) in rdr.deserialize::<LexiconRow>().enumerate() {
            let row = row.map_err(|e| TopicError::Malformed {
                path: path.to_path_buf(),
                row: i + 1,
                reason: e.to_string(),
            })?;
            lex.assign(&row.word, &row.category)?;
        }
        Ok(lex)
    }

    pub fn category_of(&self, word: &str) -> &str {
        self.assignments
            .get(word)
            .map(String::as_str)
            .unwrap_or(&self.fallback)
    }

    pub fn fallback(&self) -> &str {
        &self.fallback
    }

    /// Declared categories in declaration order.
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Output group order: declared categories, then the fallback.
    pub fn group_order(&self) -> Vec<String> {
        self.categories
            .iter()
            .filter(|c| **c != self.fallback)
            .cloned()
            .chain(std::iter::once(self.fallback.clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicPick {
    pub word: String,
    pub bc: f64,
    pub log_bc: Option<f64>,
}

/// The `k` direct neighbors of `anchor` (either direction) with the highest
/// global betweenness, descending, ties by word.
pub fn select_topics(
    g: &WordGraph,
    global_bc: &CentralityTable,
    anchor: &str,
    k: NonZeroUsize,
) -> Result<Vec<TopicPick>, TopicError> {
    let center = g
        .index_of(anchor)
        .ok_or_else(|| GraphError::UnknownWord(anchor.to_string()))?;
    let mut picks: Vec<TopicPick> = g
        .undirected_neighbors(center)
        .into_iter()
        .map(|v| {
            let word = g.word(v);
            let entry = global_bc.get(word);
            let bc = entry.map_or(0.0, |e| e.bc);
            TopicPick {
                word: word.to_string(),
                bc,
                log_bc: entry
                    .and_then(|e| e.log_bc)
                    .or_else(|| (bc > 0.0).then(|| bc.ln())),
            }
        })
        .collect();
    picks.sort_by(|a, b| b.bc.total_cmp(&a.bc).then_with(|| a.word.cmp(&b.word)));
    picks.truncate(k.get());
    Ok(picks)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicEntry {
    pub word: String,
    pub category: String,
    pub bc: f64,
    pub log_bc: Option<f64>,
    pub rank: usize,
}

/// Ranked neighbors of one topic word, scored inside the topic subgraph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicReport {
    pub anchor: String,
    pub topic: String,
    pub node_count: usize,
    pub edge_count: usize,
    /// Group order for [`group_by_category`].
    pub categories: Vec<String>,
    pub entries: Vec<TopicEntry>,
}

#[derive(Debug, Clone)]
pub struct TopicAnalysis {
    pub subgraph: Subgraph,
    pub centrality: CentralityTable,
    pub report: TopicReport,
}

/// Builds the topic's ego subgraph, recomputes exact betweenness inside it,
/// and ranks every member except the topic word.
pub fn analyze_topic(
    g: &WordGraph,
    anchor: &str,
    topic: &str,
    lexicon: &CategoryLexicon,
) -> Result<TopicAnalysis, TopicError> {
    let subgraph = induce_topic_subgraph(g, topic)?;
    let centrality = log_transform(betweenness_exact(subgraph.graph()));
    let entries = centrality
        .entries()
        .iter()
        .filter(|e| e.word != topic)
        .enumerate()
        .map(|(i, e)| TopicEntry {
            word: e.word.clone(),
            category: lexicon.category_of(&e.word).to_string(),
            bc: e.bc,
            log_bc: e.log_bc,
            rank: i + 1,
        })
        .collect();
    let report = TopicReport {
        anchor: anchor.to_string(),
        topic: topic.to_string(),
        node_count: subgraph.node_count(),
        edge_count: subgraph.edge_count(),
        categories: lexicon.group_order(),
        entries,
    };
    Ok(TopicAnalysis {
        subgraph,
        centrality,
        report,
    })
}

/// Analyzes several topics, optionally in parallel. Output follows `topics`.
pub fn analyze_topics(
    g: &WordGraph,
    anchor: &str,
    topics: &[String],
    lexicon: &CategoryLexicon,
    workers: NonZeroUsize,
) -> Result<Vec<TopicAnalysis>, TopicError> {
    if workers.get() > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.get())
            .build()
        {
            return pool.install(|| {
                topics
                    .par_iter()
                    .map(|t| analyze_topic(g, anchor, t, lexicon))
                    .collect()
            });
        }
    }
    topics
        .iter()
        .map(|t| analyze_topic(g, anchor, t, lexicon))
        .collect()
}

/// Partitions report entries by category, keeping rank order inside each
/// group. Every category in the report's group order is present, possibly
/// empty; categories seen on entries but not declared are appended.
pub fn group_by_category(report: &TopicReport) -> Vec<(String, Vec<TopicEntry>)> {
    let mut groups: Vec<(String, Vec<TopicEntry>)> = report
        .categories
        .iter()
        .map(|c| (c.clone(), Vec::new()))
        .collect();
    for e in &report.entries {
        match groups.iter_mut().find(|(c, _)| *c == e.category) {
            Some((_, list)) => list.push(e.clone()),
            None => groups.push((e.category.clone(), vec![e.clone()])),
        }
    }
    groups
}
