use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use topicgraph::centrality::BcMode;
use topicgraph::corpus::CorpusFormat;
use topicgraph::pipeline::{run_pipeline, PipelineConfig, Stage};

#[derive(Parser)]
#[command(
    name = "topicgraph",
    version,
    about = "Word-graph keyword analytics for text corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize the corpus and report token statistics
    Ingest(PipelineArgs),
    /// Build the word graph and write its edge list
    Build(PipelineArgs),
    /// Compute global betweenness centrality
    Centrality(PipelineArgs),
    /// Select the top-k topic words linked to the anchor
    Topics(PipelineArgs),
    /// Write per-topic keyword reports and GEXF subgraphs
    Report(PipelineArgs),
    /// Run every stage and write all artifacts
    Run(PipelineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Args)]
struct PipelineArgs {
    /// Corpus file (JSONL or CSV with id, title, abstract)
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus format; inferred from the file extension when omitted
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Stop-word file, one word per line (defaults to the bundled list)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Category lexicon CSV with header word,category
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Word whose neighbors are candidate topics
    #[arg(long)]
    anchor: Option<String>,
    /// Number of topics to select
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long = "bc-mode", value_enum, default_value = "exact")]
    bc_mode: ModeArg,
    /// Number of sampled sources in sampled mode
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace existing output files
    #[arg(long)]
    overwrite: bool,
    /// Also write the N most frequent raw tokens as stop-word candidates
    #[arg(long)]
    candidates: Option<usize>,
}

impl PipelineArgs {
    fn into_config(self) -> Result<PipelineConfig, String> {
        let format = match self.format {
            Some(FormatArg::Jsonl) => CorpusFormat::Jsonl,
            Some(FormatArg::Csv) => CorpusFormat::Csv,
            None if self
                .corpus
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv")) =>
            {
                CorpusFormat::Csv
            }
            None => CorpusFormat::Jsonl,
        };
        let bc_mode = match self.bc_mode {
            ModeArg::Exact => BcMode::Exact,
            ModeArg::Sampled => BcMode::Sampled {
                samples: self.samples.ok_or("--bc-mode sampled requires --samples")?,
                seed: self.seed,
            },
        };
        Ok(PipelineConfig {
            corpus: self.corpus,
            format,
            stopwords: self.stopwords,
            lexicon: self.lexicon,
            anchor: self.anchor.map(|a| a.to_lowercase()),
            k: self.k,
            bc_mode,
            workers: self.workers,
            out: self.out,
            overwrite: self.overwrite,
            candidates: self.candidates,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (stage, args) = match cli.command {
        Command::Ingest(a) => (Stage::Ingest, a),
        Command::Build(a) => (Stage::Build, a),
        Command::Centrality(a) => (Stage::Centrality, a),
        Command::Topics(a) => (Stage::Topics, a),
        Command::Report(a) => (Stage::Report, a),
        Command::Run(a) => (Stage::Run, a),
    };
    let cfg = match args.into_config() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };

    match run_pipeline(&cfg, stage) {
        Ok(outcome) => {
            let s = &outcome.stats;
            println!(
                "documents: {} ({} with abstract), sentences: {}, tokens: {}, vocabulary: {}",
                s.documents, s.documents_with_abstract, s.sentences, s.tokens, s.vocabulary
            );
            if let Some(g) = &outcome.manifest.graph {
                println!("graph: {} nodes, {} edges", g.nodes, g.edges);
            }
            for (i, t) in outcome.topics.iter().enumerate() {
                let log = t
                    .log_bc
                    .map_or_else(|| "-".to_string(), |l| format!("{l:.4}"));
                println!("topic {}: {} (bc {}, log bc {log})", i + 1, t.word, t.bc);
            }
            for f in &outcome.manifest.outputs {
                println!("wrote {f}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
