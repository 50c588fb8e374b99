//! Betweenness centrality over unit-length directed shortest paths.
//!
//! `BC(w)` sums, over ordered pairs `(u, v)` with `u != v != w`, the fraction
//! of shortest `u -> v` paths that pass through `w` as an interior node.
//! Scores are not normalized.
//!
//! Three routes are provided:
//! - [`betweenness_exact`]: Brandes' single-source dependency accumulation
//!   over BFS shortest-path DAGs, O(V·E).
//! - [`betweenness_oracle`]: direct all-pairs evaluation of the pair
//!   dependencies, for small graphs and tests.
//! - [`betweenness_sampled`]: Brandes accumulation from a uniform sample of
//!   sources, scaled by `n / k`.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroUsize;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::WordGraph;

pub const DEFAULT_ORACLE_LIMIT: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CentralityError {
    #[error("graph has {nodes} nodes, above the oracle limit of {limit}")]
    OracleTooLarge { nodes: usize, limit: usize },
    #[error("sample size {requested} out of range 1..={nodes}")]
    SampleOutOfRange { requested: usize, nodes: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityEntry {
    pub word: String,
    pub bc: f64,
    pub log_bc: Option<f64>,
    /// 1-based position in (bc descending, word ascending) order.
    pub rank: usize,
}

/// Per-word centrality scores held in rank order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CentralityTable {
    entries: Vec<CentralityEntry>,
    by_word: HashMap<String, usize>,
}

impl CentralityTable {
    /// Ranks `scores[i]` for `words[i]`. Log scores are left empty; see
    /// [`log_transform`].
    pub fn from_scores(words: &[String], scores: &[f64]) -> Self {
        assert_eq!(words.len(), scores.len());
        let mut entries: Vec<CentralityEntry> = words
            .iter()
            .zip(scores)
            .map(|(w, &bc)| CentralityEntry {
                word: w.clone(),
                bc,
                log_bc: None,
                rank: 0,
            })
            .collect();
        entries.sort_by(|a, b| b.bc.total_cmp(&a.bc).then_with(|| a.word.cmp(&b.word)));
        for (i, e) in entries.iter_mut().enumerate() {
            e.rank = i + 1;
        }
        let by_word = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.word.clone(), i))
            .collect();
        CentralityTable { entries, by_word }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in rank order.
    pub fn entries(&self) -> &[CentralityEntry] {
        &self.entries
    }

    pub fn get(&self, word: &str) -> Option<&CentralityEntry> {
        self.by_word.get(word).map(|&i| &self.entries[i])
    }

    pub fn bc(&self, word: &str) -> Option<f64> {
        self.get(word).map(|e| e.bc)
    }

    pub fn log_bc(&self, word: &str) -> Option<f64> {
        self.get(word).and_then(|e| e.log_bc)
    }

    pub fn rank_of(&self, word: &str) -> Option<usize> {
        self.get(word).map(|e| e.rank)
    }

    pub fn top(&self, k: usize) -> &[CentralityEntry] {
        &self.entries[..k.min(self.entries.len())]
    }
}

/// Fills `log_bc = ln(bc)` for every positive score.
pub fn log_transform(mut table: CentralityTable) -> CentralityTable {
    for e in &mut table.entries {
        e.log_bc = (e.bc > 0.0).then(|| e.bc.ln());
    }
    table
}

/// How global centrality is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum BcMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

impl fmt::Display for BcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BcMode::Exact => f.write_str("exact"),
            BcMode::Sampled { samples, seed } => write!(f, "sampled({samples}, seed {seed})"),
        }
    }
}

pub fn compute(
    g: &WordGraph,
    mode: BcMode,
    workers: NonZeroUsize,
) -> Result<CentralityTable, CentralityError> {
    match mode {
        BcMode::Exact => Ok(betweenness_exact_par(g, workers)),
        BcMode::Sampled { samples, seed } => betweenness_sampled_par(g, samples, seed, workers),
    }
}

pub fn betweenness_exact(g: &WordGraph) -> CentralityTable {
    betweenness_exact_par(g, NonZeroUsize::MIN)
}

/// Exact betweenness with sources split across `workers` threads.
///
/// Sources are divided into contiguous chunks and the per-chunk sums are
/// merged in chunk order, so the result depends on the worker count but not
/// on thread scheduling.
pub fn betweenness_exact_par(g: &WordGraph, workers: NonZeroUsize) -> CentralityTable {
    let sources: Vec<u32> = (0..g.node_count() as u32).collect();
    let scores = brandes_scores(g, &sources, workers);
    CentralityTable::from_scores(g.words(), &scores)
}

pub fn betweenness_sampled(
    g: &WordGraph,
    sample_sources: usize,
    seed: u64,
) -> Result<CentralityTable, CentralityError> {
    betweenness_sampled_par(g, sample_sources, seed, NonZeroUsize::MIN)
}

/// Source-sampled betweenness estimate.
///
/// Draws `sample_sources` distinct sources uniformly with a ChaCha8 stream
/// seeded by `seed`, accumulates their dependencies in ascending source
/// order, and scales by `n / sample_sources`. Sampling every node gives the
/// exact result bit for bit.
pub fn betweenness_sampled_par(
    g: &WordGraph,
    sample_sources: usize,
    seed: u64,
    workers: NonZeroUsize,
) -> Result<CentralityTable, CentralityError> {
    let n = g.node_count();
    if sample_sources == 0 || sample_sources > n {
        return Err(CentralityError::SampleOutOfRange {
            requested: sample_sources,
            nodes: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources: Vec<u32> = rand::seq::index::sample(&mut rng, n, sample_sources)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    sources.sort_unstable();

    let scale = n as f64 / sample_sources as f64;
    let mut scores = brandes_scores(g, &sources, workers);
    for s in &mut scores {
        *s *= scale;
    }
    Ok(CentralityTable::from_scores(g.words(), &scores))
}

struct Scratch {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![UNSEEN; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }
}

/// One Brandes pass from `source`, adding each node's dependency on it to `bc`.
fn accumulate_source(g: &WordGraph, source: usize, sc: &mut Scratch, bc: &mut [f64]) {
    sc.order.clear();
    sc.dist[source] = 0;
    sc.sigma[source] = 1.0;
    sc.order.push(source as u32);

    // `order` doubles as the BFS queue; it ends up in non-decreasing distance.
    let mut head = 0;
    while head < sc.order.len() {
        let v = sc.order[head] as usize;
        head += 1;
        let next = sc.dist[v] + 1;
        for &w in g.successors(v) {
            let w = w as usize;
            if sc.dist[w] == UNSEEN {
                sc.dist[w] = next;
                sc.order.push(w as u32);
            }
            if sc.dist[w] == next {
                sc.sigma[w] += sc.sigma[v];
            }
        }
    }

    for &w in sc.order.iter().rev() {
        let w = w as usize;
        let dw = sc.dist[w];
        let coeff = (1.0 + sc.delta[w]) / sc.sigma[w];
        for &v in g.predecessors(w) {
            let v = v as usize;
            if sc.dist[v] != UNSEEN && sc.dist[v] + 1 == dw {
                sc.delta[v] += sc.sigma[v] * coeff;
            }
        }
        if w != source {
            bc[w] += sc.delta[w];
        }
    }

    for &w in &sc.order {
        let w = w as usize;
        sc.dist[w] = UNSEEN;
        sc.sigma[w] = 0.0;
        sc.delta[w] = 0.0;
    }
}

fn brandes_chunk(g: &WordGraph, sources: &[u32]) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    let mut sc = Scratch::new(n);
    for &s in sources {
        accumulate_source(g, s as usize, &mut sc, &mut bc);
    }
    bc
}

fn brandes_scores(g: &WordGraph, sources: &[u32], workers: NonZeroUsize) -> Vec<f64> {
    let workers = workers.get().min(sources.len().max(1));
    if workers == 1 {
        return brandes_chunk(g, sources);
    }
    let chunk = sources.len().div_ceil(workers);
    let partials: Vec<Vec<f64>> = match rayon::ThreadPoolBuilder::new().num_threads(workers).build()
    {
        Ok(pool) => pool.install(|| {
            sources
                .par_chunks(chunk)
                .map(|c| brandes_chunk(g, c))
                .collect()
        }),
        Err(_) => sources.chunks(chunk).map(|c| brandes_chunk(g, c)).collect(),
    };
    let mut total = vec![0.0; g.node_count()];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Brute-force betweenness for small graphs.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceOracle {
    pub limit: usize,
}

impl Default for BruteForceOracle {
    fn default() -> Self {
        BruteForceOracle {
            limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl BruteForceOracle {
    /// Evaluates every pair dependency `sigma_uv(w) / sigma_uv` explicitly.
    ///
    /// Distances come from a BFS per source and path counts from a DP over
    /// each source's shortest-path DAG. A node `w` is interior to
    /// `sigma_uw * sigma_wv` shortest `u -> v` paths when
    /// `d(u,w) + d(w,v) = d(u,v)`, and to none otherwise.
    pub fn run(&self, g: &WordGraph) -> Result<CentralityTable, CentralityError> {
        let n = g.node_count();
        if n > self.limit {
            return Err(CentralityError::OracleTooLarge {
                nodes: n,
                limit: self.limit,
            });
        }

        let mut dist = vec![vec![None::<usize>; n]; n];
        let mut sigma = vec![vec![0u128; n]; n];
        for u in 0..n {
            let du = &mut dist[u];
            du[u] = Some(0);
            let mut frontier = vec![u];
            let mut layers = vec![vec![u]];
            let mut d = 0;
            while !frontier.is_empty() {
                d += 1;
                let mut next = Vec::new();
                for &x in &frontier {
                    for &y in g.successors(x) {
                        let y = y as usize;
                        if du[y].is_none() {
                            du[y] = Some(d);
                            next.push(y);
                        }
                    }
                }
                if !next.is_empty() {
                    layers.push(next.clone());
                }
                frontier = next;
            }
            sigma[u][u] = 1;
            for (depth, layer) in layers.iter().enumerate().skip(1) {
                for &v in layer {
                    let count: u128 = g
                        .predecessors(v)
                        .iter()
                        .map(|&p| p as usize)
                        .filter(|&p| dist[u][p] == Some(depth - 1))
                        .map(|p| sigma[u][p])
                        .sum();
                    sigma[u][v] = count;
                }
            }
        }

        let mut bc = vec![0.0f64; n];
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let Some(duv) = dist[u][v] else { continue };
                let total = sigma[u][v] as f64;
                for (w, score) in bc.iter_mut().enumerate() {
                    if w == u || w == v {
                        continue;
                    }
                    if let (Some(duw), Some(dwv)) = (dist[u][w], dist[w][v]) {
                        if duw + dwv == duv {
                            let through = sigma[u][w] * sigma[w][v];
                            *score += through as f64 / total;
                        }
                    }
                }
            }
        }
        Ok(CentralityTable::from_scores(g.words(), &bc))
    }
}

pub fn betweenness_oracle(g: &WordGraph) -> Result<CentralityTable, CentralityError> {
    BruteForceOracle::default().run(g)
}
