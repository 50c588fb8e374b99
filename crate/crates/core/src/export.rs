//! CSV and GEXF serialization.
//!
//! Every real number is written with 12 significant digits so output is
//! byte-stable across platforms. An empty `log_bc` cell means BC = 0.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::centrality::CentralityTable;
use crate::graph::{GraphBuilder, Subgraph, WordGraph};
use crate::numfmt::sig12;
use crate::topics::{TopicPick, TopicReport};

pub const EDGE_LIST_HEADER: [&str; 3] = ["source", "target", "multiplicity"];
pub const CENTRALITY_HEADER: [&str; 4] = ["word", "bc", "log_bc", "rank"];
pub const TOPICS_HEADER: [&str; 5] = ["anchor", "topic", "bc", "log_bc", "rank"];
pub const TOPIC_REPORT_HEADER: [&str; 6] = ["topic", "word", "category", "bc", "log_bc", "rank"];
pub const CANDIDATES_HEADER: [&str; 2] = ["word", "frequency"];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("no centrality score for subgraph member {0:?}")]
    MissingScore(String),
    #[error("{path}: bad edge-list row {row}: {reason}")]
    Malformed {
        path: PathBuf,
        row: usize,
        reason: String,
    },
}

impl From<io::Error> for ExportError {
    fn from(source: io::Error) -> Self {
        ExportError::Io {
            path: PathBuf::new(),
            source,
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

/// Writes to `path` through a buffered writer, attaching the path to I/O errors.
pub fn write_file<F>(path: &Path, write: F) -> Result<(), ExportError>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> Result<(), ExportError>,
{
    let with_path = |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(with_path)?;
    let mut w = BufWriter::new(file);
    match write(&mut w) {
        Err(ExportError::Io { path: p, source }) if p.as_os_str().is_empty() => {
            return Err(with_path(source))
        }
        other => other?,
    }
    w.flush().map_err(with_path)
}

pub fn write_edge_list<W: Write>(g: &WordGraph, w: W) -> Result<(), ExportError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(EDGE_LIST_HEADER)?;
    for (u, v, m) in g.edges() {
        out.write_record([g.word(u), g.word(v), &m.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct EdgeRow {
    source: String,
    target: String,
    multiplicity: u64,
}

/// Rebuilds a graph from an edge-list CSV. Nodes without edges are not part
/// of the format and do not come back.
pub fn read_edge_list(path: &Path) -> Result<WordGraph, ExportError> {
    let text = fs::read_to_string(path).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(EDGE_LIST_HEADER) {
        return Err(ExportError::Malformed {
            path: path.to_path_buf(),
            row: 0,
            reason: format!("expected header {}", EDGE_LIST_HEADER.join(",")),
        });
    }
    let mut b = GraphBuilder::new();
    for (i, row) in rdr.deserialize::<EdgeRow>().enumerate() {
        let row = row.map_err(|e| ExportError::Malformed {
            path: path.to_path_buf(),
            row: i + 1,
            reason: e.to_string(),
        })?;
        if row.multiplicity == 0 || row.source == row.target {
            return Err(ExportError::Malformed {
                path: path.to_path_buf(),
                row: i + 1,
                reason: "self-loop or zero multiplicity".into(),
            });
        }
        b.add_edge(&row.source, &row.target, row.multiplicity);
    }
    Ok(b.finish())
}

pub fn write_centrality<W: Write>(t: &CentralityTable, w: W) -> Result<(), ExportError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CENTRALITY_HEADER)?;
    for e in t.entries() {
        out.write_record([
            e.word.clone(),
            sig12(e.bc),
            opt(e.log_bc),
            e.rank.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_topics<W: Write>(anchor: &str, picks: &[TopicPick], w: W) -> Result<(), ExportError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TOPICS_HEADER)?;
    for (i, p) in picks.iter().enumerate() {
        out.write_record([
            anchor.to_string(),
            p.word.clone(),
            sig12(p.bc),
            opt(p.log_bc),
            (i + 1).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_topic_report<W: Write>(r: &TopicReport, w: W) -> Result<(), ExportError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TOPIC_REPORT_HEADER)?;
    for e in &r.entries {
        out.write_record([
            r.topic.clone(),
            e.word.clone(),
            e.category.clone(),
            sig12(e.bc),
            opt(e.log_bc),
            e.rank.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_candidates<W: Write>(cands: &[(String, u64)], w: W) -> Result<(), ExportError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CANDIDATES_HEADER)?;
    for (word, n) in cands {
        out.write_record([word.as_str(), &n.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Writes a directed GEXF 1.2 document for `sub`. Nodes carry a float `bc`
/// attribute taken from `bc`, edges a float `multiplicity` attribute.
pub fn write_gexf<W: Write>(
    sub: &Subgraph,
    bc: &CentralityTable,
    mut w: W,
) -> Result<(), ExportError> {
    let g = sub.graph();
    let scores = g
        .words()
        .iter()
        .map(|word| {
            bc.bc(word)
                .ok_or_else(|| ExportError::MissingScore(word.clone()))
        })
        .collect::<Result<Vec<f64>, _>>()?;

    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        w,
        r#"<gexf xmlns="http://www.gexf.net/1.2draft" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="http://www.gexf.net/1.2draft http://www.gexf.net/1.2draft/gexf.xsd" version="1.2">"#
    )?;
    writeln!(w, "  <meta>")?;
    writeln!(w, "    <creator>topicgraph</creator>")?;
    writeln!(
        w,
        "    <description>ego subgraph of {}</description>",
        xml_escape(sub.anchor())
    )?;
    writeln!(w, "  </meta>")?;
    writeln!(w, r#"  <graph mode="static" defaultedgetype="directed">"#)?;
    writeln!(w, r#"    <attributes class="node">"#)?;
    writeln!(w, r#"      <attribute id="bc" title="bc" type="float"/>"#)?;
    writeln!(w, "    </attributes>")?;
    writeln!(w, r#"    <attributes class="edge">"#)?;
    writeln!(
        w,
        r#"      <attribute id="multiplicity" title="multiplicity" type="float"/>"#
    )?;
    writeln!(w, "    </attributes>")?;
    writeln!(w, "    <nodes>")?;
    for (i, (word, score)) in g.words().iter().zip(&scores).enumerate() {
        writeln!(
            w,
            r#"      <node id="{i}" label="{}"><attvalues><attvalue for="bc" value="{}"/></attvalues></node>"#,
            xml_escape(word),
            sig12(*score)
        )?;
    }
    writeln!(w, "    </nodes>")?;
    writeln!(w, "    <edges>")?;
    for (i, (u, v, m)) in g.edges().enumerate() {
        writeln!(
            w,
            r#"      <edge id="{i}" source="{u}" target="{v}"><attvalues><attvalue for="multiplicity" value="{m}"/></attvalues></edge>"#
        )?;
    }
    writeln!(w, "    </edges>")?;
    writeln!(w, "  </graph>")?;
    writeln!(w, "</gexf>")?;
    Ok(())
}

pub fn export_gexf(sub: &Subgraph, bc: &CentralityTable, path: &Path) -> Result<(), ExportError> {
    write_file(path, |w| write_gexf(sub, bc, w))
}
