#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topicgraph::corpus::{Document, TokenizedDocument};
use topicgraph::graph::{GraphBuilder, WordGraph};

/// Bijective base-26 letter name: 0 -> "a", 26 -> "aa".
pub fn letters(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

/// Node names that sort in a different order than their index.
pub fn node_name(i: usize) -> String {
    format!("n{}", letters(i * 7 + 3))
}

/// Directed Erdős–Rényi graph; every node is present even when isolated.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> WordGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(&node_name(i), 1);
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                b.add_edge(&node_name(u), &node_name(v), rng.gen_range(1..4));
            }
        }
    }
    b.finish()
}

/// Plain adjacency matrix keyed by word, built straight from the edge iterator.
pub fn adjacency(g: &WordGraph) -> (Vec<String>, Vec<Vec<bool>>) {
    let words = g.words().to_vec();
    let n = words.len();
    let mut adj = vec![vec![false; n]; n];
    for (u, v, _) in g.edges() {
        adj[u][v] = true;
    }
    (words, adj)
}

/// Betweenness by listing every shortest path explicitly.
///
/// BFS gives the distance table; a DFS then walks every path whose length
/// equals the shortest distance and tallies its interior nodes. Exponential
/// in general, fine for a dozen nodes.
pub fn enumerated_betweenness(g: &WordGraph) -> HashMap<String, f64> {
    let (words, adj) = adjacency(g);
    let n = words.len();
    let mut dist = vec![vec![usize::MAX; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for y in 0..n {
                if adj[x][y] && dist[s][y] == usize::MAX {
                    dist[s][y] = dist[s][x] + 1;
                    q.push_back(y);
                }
            }
        }
    }

    fn walk(
        at: usize,
        target: usize,
        remaining: usize,
        adj: &[Vec<bool>],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            if at == target {
                out.push(path.clone());
            }
            return;
        }
        for next in 0..adj.len() {
            if adj[at][next] && !path.contains(&next) {
                path.push(next);
                walk(next, target, remaining - 1, adj, path, out);
                path.pop();
            }
        }
    }

    let mut bc = vec![0.0; n];
    for u in 0..n {
        for v in 0..n {
            if u == v || dist[u][v] == usize::MAX {
                continue;
            }
            let mut paths = Vec::new();
            walk(u, v, dist[u][v], &adj, &mut vec![u], &mut paths);
            let total = paths.len() as f64;
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                let through = paths
                    .iter()
                    .filter(|p| p[1..p.len() - 1].contains(&w))
                    .count();
                bc[w] += through as f64 / total;
            }
        }
    }
    words.into_iter().zip(bc).collect()
}

/// Induced ego subgraph computed from the raw edge list, without the
/// library's subgraph code.
pub fn ego_edges(g: &WordGraph, center: &str) -> Vec<(String, String, u64)> {
    let c = g.index_of(center).unwrap();
    let mut members = vec![false; g.node_count()];
    members[c] = true;
    for (u, v, _) in g.edges() {
        if u == c {
            members[v] = true;
        }
        if v == c {
            members[u] = true;
        }
    }
    g.edges()
        .filter(|&(u, v, _)| members[u] && members[v])
        .map(|(u, v, m)| (g.word(u).to_string(), g.word(v).to_string(), m))
        .collect()
}

pub fn ego_graph(g: &WordGraph, center: &str) -> WordGraph {
    let edges = ego_edges(g, center);
    let mut b = GraphBuilder::new();
    b.add_node(center, 0);
    for (s, t, m) in &edges {
        b.add_edge(s, t, *m);
    }
    b.finish()
}

/// Two disjoint vocabularies joined only through the word "bridge".
pub fn planted_bridge_corpus(sentences: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left: Vec<String> = (0..50).map(|i| format!("lefty{}", letters(i))).collect();
    let right: Vec<String> = (0..50).map(|i| format!("righty{}", letters(i))).collect();
    let mut docs = Vec::new();
    let mut text = String::new();
    for s in 0..sentences {
        let len = rng.gen_range(4..10);
        let words: Vec<&str> = match s % 10 {
            // cross sentences: left ... bridge ... right, or the reverse
            0 | 5 => {
                let (a, b) = if s % 20 == 0 {
                    (&left, &right)
                } else {
                    (&right, &left)
                };
                let mut w: Vec<&str> = (0..len / 2)
                    .map(|_| a[rng.gen_range(0..50)].as_str())
                    .collect();
                w.push("bridge");
                w.extend((0..len / 2).map(|_| b[rng.gen_range(0..50)].as_str()));
                w
            }
            x if x % 2 == 0 => (0..len)
                .map(|_| left[rng.gen_range(0..50)].as_str())
                .collect(),
            _ => (0..len)
                .map(|_| right[rng.gen_range(0..50)].as_str())
                .collect(),
        };
        text.push_str(&words.join(" "));
        text.push_str(". ");
        if s % 5 == 4 {
            docs.push(Document::new(
                format!("doc{}", docs.len()),
                "",
                std::mem::take(&mut text),
            ));
        }
    }
    if !text.is_empty() {
        docs.push(Document::new(format!("doc{}", docs.len()), "", text));
    }
    docs
}

/// Zipf-distributed synthetic abstracts.
pub fn synthetic_abstracts(
    docs: usize,
    tokens_per_doc: usize,
    vocab: usize,
    seed: u64,
) -> Vec<Document> {
    use rand_distr::{Distribution, Zipf};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = Zipf::new(vocab as u64, 1.0).unwrap();
    let words: Vec<String> = (0..vocab).map(|i| format!("kw{}", letters(i))).collect();
    (0..docs)
        .map(|d| {
            let mut text = String::new();
            let mut left = tokens_per_doc;
            while left > 0 {
                let len = rng.gen_range(8..20).min(left);
                let sentence: Vec<&str> = (0..len)
                    .map(|_| words[zipf.sample(&mut rng) as usize - 1].as_str())
                    .collect();
                text.push_str(&sentence.join(" "));
                text.push_str(". ");
                left -= len;
            }
            Document::new(format!("s{d}"), "", text)
        })
        .collect()
}

pub fn tokenized(sentences: &[&[&str]]) -> TokenizedDocument {
    TokenizedDocument {
        doc_id: "t".into(),
        sentences: sentences
            .iter()
            .map(|s| s.iter().map(|w| w.to_string()).collect())
            .collect(),
    }
}

/// Words and `(source, target, multiplicity)` triples, ignoring node frequencies.
pub fn structure(g: &WordGraph) -> (Vec<String>, Vec<(String, String, u64)>) {
    let edges = g
        .edges()
        .map(|(u, v, m)| (g.word(u).to_string(), g.word(v).to_string(), m))
        .collect();
    (g.words().to_vec(), edges)
}

pub mod cli {
    use std::fs;
    use std::path::{Path, PathBuf};
    use std::process::{Command, Output};

    pub fn exe() -> &'static str {
        env!("CARGO_BIN_EXE_topicgraph")
    }

    pub fn data(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("data")
            .join(name)
    }

    pub fn golden_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/mini")
    }

    pub fn run(args: &[&str]) -> Output {
        Command::new(exe())
            .args(args)
            .output()
            .expect("spawn topicgraph")
    }

    /// The bundled mini-corpus golden run: exact mode, one worker.
    pub fn golden_run(out: &Path) -> Output {
        let corpus = data("mini_corpus.jsonl");
        let lexicon = data("mini_lexicon.csv");
        run(&[
            "run",
            "--corpus",
            corpus.to_str().unwrap(),
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--anchor",
            "virus",
            "--k",
            "2",
            "--bc-mode",
            "exact",
            "--workers",
            "1",
            "--out",
            out.to_str().unwrap(),
        ])
    }

    fn manifest_without_clock(path: &Path) -> serde_json::Value {
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        let obj = v.as_object_mut().unwrap();
        obj.remove("started_at_unix_ms");
        obj.remove("wall_time_ms");
        v
    }

    /// Compares two output directories file by file. Every file must match
    /// byte for byte except `manifest.json`, whose clock fields are ignored.
    pub fn compare_dirs(a: &Path, b: &Path) -> Result<usize, String> {
        let list = |d: &Path| -> Vec<String> {
            let mut names: Vec<String> = fs::read_dir(d)
                .unwrap()
                .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
                .collect();
            names.sort();
            names
        };
        let (la, lb) = (list(a), list(b));
        if la != lb {
            return Err(format!("file lists differ: {la:?} vs {lb:?}"));
        }
        for name in &la {
            let (pa, pb) = (a.join(name), b.join(name));
            if name == "manifest.json" {
                if manifest_without_clock(&pa) != manifest_without_clock(&pb) {
                    return Err("manifest.json differs".into());
                }
            } else if fs::read(&pa).unwrap() != fs::read(&pb).unwrap() {
                return Err(format!("{name} differs"));
            }
        }
        Ok(la.len())
    }
}
