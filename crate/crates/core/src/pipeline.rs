//! End-to-end pipeline: corpus -> tokens -> graph -> centrality -> topics.
//!
//! Each [`Stage`] writes its own artifacts plus `manifest.json` into the
//! output directory. A failed run still writes the manifest, marked
//! `"status": "failed"` with the failing stage.

use std::fmt;
use std::fs;
use std::io;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::centrality::{self, log_transform, BcMode, CentralityError};
use crate::corpus::{
    self, generate_stopword_candidates, tokenize_corpus, CorpusError, CorpusFormat, StopWordSet,
    StopWordSource, TokenStats,
};
use crate::export::{self, write_file, ExportError};
use crate::graph::WordGraph;
use crate::topics::{analyze_topics, select_topics, CategoryLexicon, TopicError, TopicPick};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOKEN_STATS_FILE: &str = "token_stats.json";
pub const CANDIDATES_FILE: &str = "stopword_candidates.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const CENTRALITY_FILE: &str = "centrality.csv";
pub const TOPICS_FILE: &str = "topics.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Build,
    Centrality,
    Topics,
    Report,
    Run,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Build => "build",
            Stage::Centrality => "centrality",
            Stage::Topics => "topics",
            Stage::Report => "report",
            Stage::Run => "run",
        })
    }
}

impl Stage {
    fn needs_anchor(self) -> bool {
        matches!(self, Stage::Topics | Stage::Report | Stage::Run)
    }

    fn writes(self, artifact: Stage) -> bool {
        self == Stage::Run || self == artifact
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub format: CorpusFormat,
    /// `None` selects the bundled English list.
    pub stopwords: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub anchor: Option<String>,
    pub k: usize,
    pub bc_mode: BcMode,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub overwrite: bool,
    /// Number of stop-word candidates to emit during ingest.
    pub candidates: Option<usize>,
}

impl PipelineConfig {
    pub fn new(corpus: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            corpus: corpus.into(),
            format: CorpusFormat::Jsonl,
            stopwords: None,
            lexicon: None,
            anchor: None,
            k: 3,
            bc_mode: BcMode::Exact,
            workers: 1,
            out: Some(out.into()),
            overwrite: false,
            candidates: None,
        }
    }

    pub fn validate(&self, stage: Stage) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::config(msg));
        if self.k == 0 {
            return bad("--k must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("--workers must be at least 1".into());
        }
        if let BcMode::Sampled { samples: 0, .. } = self.bc_mode {
            return bad("--samples must be at least 1 in sampled mode".into());
        }
        if self.candidates == Some(0) {
            return bad("--candidates must be at least 1".into());
        }
        if stage.needs_anchor() && self.anchor.as_deref().is_none_or(str::is_empty) {
            return bad(format!("{stage} requires --anchor"));
        }
        if stage != Stage::Ingest && self.out.is_none() {
            return bad(format!("{stage} requires --out"));
        }
        Ok(())
    }

    fn workers(&self) -> NonZeroUsize {
        NonZeroUsize::new(self.workers).unwrap_or(NonZeroUsize::MIN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    Config,
    Input,
    Io,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Config => 1,
            FailureKind::Input => 2,
            FailureKind::Io => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: FailureKind,
    pub message: String,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

impl PipelineError {
    fn new(stage: &'static str, kind: FailureKind, message: impl fmt::Display) -> Self {
        PipelineError {
            stage,
            kind,
            message: message.to_string(),
        }
    }

    fn config(message: impl fmt::Display) -> Self {
        Self::new("config", FailureKind::Config, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    fn corpus(stage: &'static str, e: CorpusError) -> Self {
        let kind = match e {
            CorpusError::Io { .. } => FailureKind::Io,
            CorpusError::UnknownFormat(_) => FailureKind::Config,
            _ => FailureKind::Input,
        };
        Self::new(stage, kind, e)
    }

    fn topic(stage: &'static str, e: TopicError) -> Self {
        let kind = match e {
            TopicError::Io { .. } => FailureKind::Io,
            _ => FailureKind::Input,
        };
        Self::new(stage, kind, e)
    }

    fn export(stage: &'static str, e: ExportError) -> Self {
        Self::new(stage, FailureKind::Io, e)
    }

    fn centrality(stage: &'static str, e: CentralityError) -> Self {
        Self::new(stage, FailureKind::Config, e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub role: &'static str,
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub format: CorpusFormat,
    pub stopwords: String,
    pub stopword_count: usize,
    pub lexicon: Option<String>,
    pub anchor: Option<String>,
    pub k: usize,
    pub bc: BcMode,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub total_multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopicSummary {
    pub topic: String,
    pub nodes: usize,
    pub edges: usize,
    pub entries: usize,
}

/// Run record written as `manifest.json`. `started_at_unix_ms` and
/// `wall_time_ms` are the only fields that vary between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Stage,
    pub status: &'static str,
    pub failed_stage: Option<&'static str>,
    pub error: Option<String>,
    pub started_at_unix_ms: u128,
    pub wall_time_ms: u128,
    pub inputs: Vec<InputRecord>,
    pub parameters: Option<Parameters>,
    pub corpus: Option<TokenStats>,
    pub graph: Option<GraphSummary>,
    pub topics: Vec<TopicSummary>,
    pub outputs: Vec<String>,
}

impl Manifest {
    fn new(command: Stage) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            status: "running",
            failed_stage: None,
            error: None,
            started_at_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            wall_time_ms: 0,
            inputs: Vec::new(),
            parameters: None,
            corpus: None,
            graph: None,
            topics: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn fingerprint(role: &'static str, path: &Path) -> io::Result<InputRecord> {
    let bytes = fs::read(path)?;
    Ok(InputRecord {
        role,
        file: file_name(path),
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Output directory handle that enforces the overwrite rule and records
/// what was written.
struct OutDir<'m> {
    root: PathBuf,
    overwrite: bool,
    manifest: &'m mut Manifest,
}

impl OutDir<'_> {
    fn target(&self, stage: &'static str, name: &str) -> Result<PathBuf, PipelineError> {
        let path = self.root.join(name);
        if !self.overwrite && path.exists() {
            return Err(PipelineError::new(
                stage,
                FailureKind::Config,
                format!("{} exists; pass --overwrite to replace it", path.display()),
            ));
        }
        Ok(path)
    }

    fn write<F>(&mut self, stage: &'static str, name: &str, f: F) -> Result<(), PipelineError>
    where
        F: FnOnce(&mut io::BufWriter<fs::File>) -> Result<(), ExportError>,
    {
        let path = self.target(stage, name)?;
        write_file(&path, f).map_err(|e| PipelineError::export(stage, e))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }
}

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub stats: TokenStats,
    pub topics: Vec<TopicPick>,
}

/// Runs `stage` (and the stages it depends on) for `cfg`.
///
/// Config errors are reported before anything is read or written. Once the
/// output directory exists, every failure leaves a manifest marked failed.
pub fn run_pipeline(cfg: &PipelineConfig, stage: Stage) -> Result<RunOutcome, PipelineError> {
    cfg.validate(stage)?;
    let clock = Instant::now();
    let mut manifest = Manifest::new(stage);

    let Some(out) = cfg.out.clone() else {
        return execute(cfg, stage, None, &mut manifest);
    };
    let manifest_path = out.join(MANIFEST_FILE);
    if !cfg.overwrite && manifest_path.exists() {
        return Err(PipelineError::config(format!(
            "{} exists; pass --overwrite to replace it",
            manifest_path.display()
        )));
    }
    fs::create_dir_all(&out).map_err(|e| {
        PipelineError::new(
            "output",
            FailureKind::Io,
            format!("cannot create {}: {e}", out.display()),
        )
    })?;

    let result = execute(cfg, stage, Some(&out), &mut manifest);
    manifest.wall_time_ms = clock.elapsed().as_millis();
    match &result {
        Ok(_) => manifest.status = "ok",
        Err(e) => {
            manifest.status = "failed";
            manifest.failed_stage = Some(e.stage);
            manifest.error = Some(e.message.clone());
        }
    }
    let written = write_file(&manifest_path, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest).map_err(io::Error::from)?;
        io::Write::write_all(w, b"\n")?;
        Ok(())
    });
    match (result, written) {
        (Err(e), _) => Err(e),
        (Ok(_), Err(e)) => Err(PipelineError::export("manifest", e)),
        (Ok(mut outcome), Ok(())) => {
            outcome.manifest = manifest;
            Ok(outcome)
        }
    }
}

fn execute(
    cfg: &PipelineConfig,
    stage: Stage,
    out: Option<&Path>,
    manifest: &mut Manifest,
) -> Result<RunOutcome, PipelineError> {
    let workers = cfg.workers();

    // ingest
    let record = fingerprint("corpus", &cfg.corpus).map_err(|e| {
        PipelineError::new(
            "ingest",
            FailureKind::Io,
            format!("cannot read {}: {e}", cfg.corpus.display()),
        )
    })?;
    manifest.inputs.push(record);
    let stops = match &cfg.stopwords {
        Some(path) => {
            let set =
                StopWordSet::from_file(path).map_err(|e| PipelineError::corpus("ingest", e))?;
            manifest.inputs.push(
                fingerprint("stopwords", path)
                    .map_err(|e| PipelineError::new("ingest", FailureKind::Io, e))?,
            );
            set
        }
        None => StopWordSet::bundled(),
    };
    let lexicon = match &cfg.lexicon {
        Some(path) => {
            let lex =
                CategoryLexicon::from_csv(path).map_err(|e| PipelineError::topic("ingest", e))?;
            manifest.inputs.push(
                fingerprint("lexicon", path)
                    .map_err(|e| PipelineError::new("ingest", FailureKind::Io, e))?,
            );
            lex
        }
        None => CategoryLexicon::default(),
    };
    manifest.parameters = Some(Parameters {
        format: cfg.format,
        stopwords: match stops.source() {
            StopWordSource::File(p) => file_name(p),
            other => other.to_string(),
        },
        stopword_count: stops.len(),
        lexicon: manifest
            .inputs
            .iter()
            .find(|i| i.role == "lexicon")
            .map(|i| i.file.clone()),
        anchor: cfg.anchor.clone(),
        k: cfg.k,
        bc: cfg.bc_mode,
        workers: cfg.workers,
    });

    let docs = corpus::load_corpus(&cfg.corpus, cfg.format)
        .map_err(|e| PipelineError::corpus("ingest", e))?;
    let tokenized = tokenize_corpus(&docs, &stops, workers);
    let stats = TokenStats::collect(&docs, &tokenized);
    manifest.corpus = Some(stats.clone());

    let mut outcome = RunOutcome {
        manifest: manifest.clone(),
        stats: stats.clone(),
        topics: Vec::new(),
    };

    let Some(out) = out else {
        return Ok(outcome);
    };
    let mut dir = OutDir {
        root: out.to_path_buf(),
        overwrite: cfg.overwrite,
        manifest,
    };

    if stage.writes(Stage::Ingest) {
        dir.write("ingest", TOKEN_STATS_FILE, |w| {
            serde_json::to_writer_pretty(&mut *w, &stats).map_err(io::Error::from)?;
            io::Write::write_all(w, b"\n")?;
            Ok(())
        })?;
    }
    if let Some(n) = cfg.candidates.and_then(NonZeroUsize::new) {
        let raw = tokenize_corpus(&docs, &StopWordSet::empty(), workers);
        let cands = generate_stopword_candidates(&raw, n);
        dir.write("ingest", CANDIDATES_FILE, |w| {
            export::write_candidates(&cands, w)
        })?;
    }
    if stage == Stage::Ingest {
        return Ok(outcome);
    }

    // build
    let graph = WordGraph::build(&tokenized);
    dir.manifest.graph = Some(GraphSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        total_multiplicity: graph.total_multiplicity(),
    });
    if stage.writes(Stage::Build) {
        dir.write("build", EDGES_FILE, |w| export::write_edge_list(&graph, w))?;
    }
    if stage == Stage::Build {
        return Ok(outcome);
    }

    // centrality
    let global = centrality::compute(&graph, cfg.bc_mode, workers)
        .map_err(|e| PipelineError::centrality("centrality", e))?;
    let global = log_transform(global);
    if stage.writes(Stage::Centrality) {
        dir.write("centrality", CENTRALITY_FILE, |w| {
            export::write_centrality(&global, w)
        })?;
    }
    if stage == Stage::Centrality {
        return Ok(outcome);
    }

    // topics
    let anchor = cfg.anchor.as_deref().unwrap_or_default();
    let k = NonZeroUsize::new(cfg.k).unwrap_or(NonZeroUsize::MIN);
    let picks =
        select_topics(&graph, &global, anchor, k).map_err(|e| PipelineError::topic("topics", e))?;
    if stage.writes(Stage::Topics) {
        dir.write("topics", TOPICS_FILE, |w| {
            export::write_topics(anchor, &picks, w)
        })?;
    }
    outcome.topics = picks.clone();
    if stage == Stage::Topics {
        return Ok(outcome);
    }

    // report
    let words: Vec<String> = picks.iter().map(|p| p.word.clone()).collect();
    let analyses = analyze_topics(&graph, anchor, &words, &lexicon, workers)
        .map_err(|e| PipelineError::topic("report", e))?;
    for a in &analyses {
        let topic = &a.report.topic;
        dir.write("report", &format!("topic_{topic}.csv"), |w| {
            export::write_topic_report(&a.report, w)
        })?;
        dir.write("report", &format!("topic_{topic}.gexf"), |w| {
            export::write_gexf(&a.subgraph, &a.centrality, w)
        })?;
        dir.manifest.topics.push(TopicSummary {
            topic: topic.clone(),
            nodes: a.report.node_count,
            edges: a.report.edge_count,
            entries: a.report.entries.len(),
        });
    }
    Ok(outcome)
}
