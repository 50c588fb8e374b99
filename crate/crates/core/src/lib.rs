//! Keyword analytics over text corpora using directed word-adjacency graphs.
//!
//! The pipeline reads document abstracts, tokenizes them into sentences of
//! lowercase words, links each word to its successor within a sentence, and
//! ranks words by betweenness centrality. Topic words adjacent to an anchor
//! word are then re-ranked inside their own ego subgraphs and grouped by a
//! user-supplied category lexicon.
//!
//! ```
//! use topicgraph::corpus::{tokenize, Document, StopWordSet};
//! use topicgraph::graph::WordGraph;
//! use topicgraph::centrality::betweenness_exact;
//!
//! let doc = Document::new("d1", "", "Bats carry virus strains. Virus strains mutate.");
//! let tokens = tokenize(&doc, &StopWordSet::empty());
//! let graph = WordGraph::build([&tokens]);
//! let table = betweenness_exact(&graph);
//! assert_eq!(table.rank_of("virus"), Some(1));
//! ```

pub mod centrality;
pub mod corpus;
pub mod export;
pub mod graph;
pub mod pipeline;
pub mod topics;

mod numfmt;

pub use centrality::{CentralityEntry, CentralityTable};
pub use corpus::{Document, StopWordSet, TokenizedDocument};
pub use graph::{Direction, Subgraph, WordGraph};
pub use topics::{CategoryLexicon, TopicReport};
