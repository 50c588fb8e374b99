//! Corpus ingestion and tokenization.
//!
//! Abstracts are split into sentences on `.`, `!` or `?` followed by
//! whitespace or end of text. Each sentence is lowercased and split on
//! non-alphabetic characters; only tokens made entirely of ASCII letters
//! survive, which drops numbers, symbols and non-English words in one pass.
//! Stop words are removed before any adjacency is formed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: malformed record {record}: {reason}")]
    Malformed {
        path: PathBuf,
        record: usize,
        reason: String,
    },
    #[error("{path}: duplicate document id {id:?} at record {record}")]
    DuplicateId {
        path: PathBuf,
        id: String,
        record: usize,
    },
    #[error("unknown corpus format {0:?} (expected jsonl or csv)")]
    UnknownFormat(String),
}

/// On-disk layout of a corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            _ => Err(CorpusError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::Jsonl => "jsonl",
            CorpusFormat::Csv => "csv",
        })
    }
}

/// One corpus record. Titles are carried as metadata only; abstracts are
/// the sole source of tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub abstract_text: String,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        title: impl Into<String>,
        abstract_text: impl Into<String>,
    ) -> Self {
        Document {
            id: id.into(),
            title: title.into(),
            abstract_text: abstract_text.into(),
        }
    }

    pub fn has_abstract(&self) -> bool {
        !self.abstract_text.trim().is_empty()
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<String>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default, rename = "abstract")]
    abstract_text: Option<String>,
}

/// Reads every record of `path`, preserving file order.
///
/// Missing or null abstracts become empty strings; the document is still
/// returned so callers can count it.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Document>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::open(path).map_err(io_err)?;
    let raw = match format {
        CorpusFormat::Jsonl => read_jsonl(path, BufReader::new(file))?,
        CorpusFormat::Csv => read_csv(path, file)?,
    };

    let mut seen = HashSet::with_capacity(raw.len());
    let mut docs = Vec::with_capacity(raw.len());
    for (record, rec) in raw {
        let id = match rec.id {
            Some(id) if !id.trim().is_empty() => id,
            _ => {
                return Err(CorpusError::Malformed {
                    path: path.to_path_buf(),
                    record,
                    reason: "missing or empty id".into(),
                })
            }
        };
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: path.to_path_buf(),
                id,
                record,
            });
        }
        docs.push(Document {
            id,
            title: rec.title.unwrap_or_default(),
            abstract_text: rec.abstract_text.unwrap_or_default(),
        });
    }
    Ok(docs)
}

// Record numbers are 1-based line numbers for JSONL.
fn read_jsonl<R: BufRead>(path: &Path, reader: R) -> Result<Vec<(usize, RawRecord)>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let rec: RawRecord = serde_json::from_str(trimmed).map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            record: i + 1,
            reason: e.to_string(),
        })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

// Record numbers are 1-based data rows (the header is not counted).
fn read_csv<R: io::Read>(path: &Path, reader: R) -> Result<Vec<(usize, RawRecord)>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            record: 0,
            reason: e.to_string(),
        })?
        .clone();
    if !headers.is_empty() && !headers.iter().any(|h| h == "id") {
        return Err(CorpusError::Malformed {
            path: path.to_path_buf(),
            record: 0,
            reason: "header row has no \"id\" column".into(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<RawRecord>().enumerate() {
        let rec = row.map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            record: i + 1,
            reason: e.to_string(),
        })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

/// Where a stop-word list came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopWordSource {
    File(PathBuf),
    Bundled,
    Generated,
}

impl fmt::Display for StopWordSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopWordSource::File(p) => write!(f, "{}", p.display()),
            StopWordSource::Bundled => f.write_str("bundled"),
            StopWordSource::Generated => f.write_str("generated"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StopWordSet {
    words: HashSet<String>,
    source: StopWordSource,
}

impl StopWordSet {
    pub fn empty() -> Self {
        StopWordSet {
            words: HashSet::new(),
            source: StopWordSource::Generated,
        }
    }

    /// The bundled list of common English function words.
    pub fn bundled() -> Self {
        StopWordSet {
            words: parse_word_list(DEFAULT_STOPWORDS),
            source: StopWordSource::Bundled,
        }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWordSet {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
            source: StopWordSource::Generated,
        }
    }

    /// Reads a plain-text list: one word per line, `#` starts a comment
    /// line, blank lines are ignored.
    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(StopWordSet {
            words: parse_word_list(&text),
            source: StopWordSource::File(path.to_path_buf()),
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.bytes().any(|b| b.is_ascii_uppercase()) || !word.is_ascii() {
            self.words.contains(&word.to_lowercase())
        } else {
            self.words.contains(word)
        }
    }

    pub fn insert(&mut self, word: &str) -> bool {
        self.words.insert(word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn source(&self) -> &StopWordSource {
        &self.source
    }

    /// Words in lexicographic order.
    pub fn sorted(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.words.iter().map(String::as_str).collect();
        set.into_iter().collect()
    }
}

fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// A document's abstract as sentences of surviving tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub sentences: Vec<Vec<String>>,
}

impl TokenizedDocument {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }

    /// Renders the sentences back to text, one `. `-terminated sentence each.
    pub fn to_text(&self) -> String {
        self.sentences
            .iter()
            .map(|s| format!("{}.", s.join(" ")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Splits `text` on `.`, `!` or `?` when followed by whitespace or end of text.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
        }
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out
}

fn is_plain_word(token: &str) -> bool {
    !token.is_empty() && token.bytes().all(|b| b.is_ascii_lowercase())
}

/// Lowercases and splits one sentence, keeping `[a-z]+` tokens that are not stop words.
pub fn sentence_tokens(sentence: &str, stops: &StopWordSet) -> Vec<String> {
    sentence
        .to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| is_plain_word(t) && !stops.contains(t))
        .map(str::to_owned)
        .collect()
}

pub fn tokenize(doc: &Document, stops: &StopWordSet) -> TokenizedDocument {
    let sentences = split_sentences(&doc.abstract_text)
        .into_iter()
        .map(|s| sentence_tokens(s, stops))
        .filter(|s| !s.is_empty())
        .collect();
    TokenizedDocument {
        doc_id: doc.id.clone(),
        sentences,
    }
}

/// Tokenizes every document with an abstract, in input order.
///
/// With `workers > 1` documents are processed on a dedicated thread pool;
/// the output order is the same either way.
pub fn tokenize_corpus(
    docs: &[Document],
    stops: &StopWordSet,
    workers: NonZeroUsize,
) -> Vec<TokenizedDocument> {
    let with_abstract: Vec<&Document> = docs.iter().filter(|d| d.has_abstract()).collect();
    if workers.get() == 1 {
        return with_abstract.iter().map(|d| tokenize(d, stops)).collect();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.get())
        .build()
    {
        Ok(pool) => pool.install(|| {
            with_abstract
                .par_iter()
                .map(|d| tokenize(d, stops))
                .collect()
        }),
        Err(_) => with_abstract.iter().map(|d| tokenize(d, stops)).collect(),
    }
}

/// The `top_n` most frequent tokens, by descending count then ascending word.
///
/// Meant for building a stop list by hand: tokenize with an empty (or
/// partial) stop set, review the output, and add the uninformative words.
pub fn generate_stopword_candidates<'a, I>(docs: I, top_n: NonZeroUsize) -> Vec<(String, u64)>
where
    I: IntoIterator<Item = &'a TokenizedDocument>,
{
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in docs {
        for t in doc.tokens() {
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(top_n.get());
    ranked.into_iter().map(|(w, c)| (w.to_owned(), c)).collect()
}

/// Corpus-level token statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TokenStats {
    pub documents: usize,
    pub documents_with_abstract: usize,
    pub sentences: usize,
    pub tokens: usize,
    pub vocabulary: usize,
}

impl TokenStats {
    pub fn collect(docs: &[Document], tokenized: &[TokenizedDocument]) -> Self {
        let vocab: HashSet<&str> = tokenized.iter().flat_map(|d| d.tokens()).collect();
        TokenStats {
            documents: docs.len(),
            documents_with_abstract: docs.iter().filter(|d| d.has_abstract()).count(),
            sentences: tokenized.iter().map(|d| d.sentences.len()).sum(),
            tokens: tokenized.iter().map(TokenizedDocument::token_count).sum(),
            vocabulary: vocab.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn nz(n: usize) -> NonZeroUsize {
        NonZeroUsize::new(n).unwrap()
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn jsonl_record_maps_fields() {
        let f = write_tmp("{\"id\":\"d1\",\"title\":\"t\",\"abstract\":\"Viruses spread.\"}\n");
        let docs = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(docs, vec![Document::new("d1", "t", "Viruses spread.")]);
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let f = write_tmp("");
        assert!(load_corpus(f.path(), CorpusFormat::Jsonl)
            .unwrap()
            .is_empty());
        assert!(load_corpus(f.path(), CorpusFormat::Csv).unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let f =
            write_tmp("{\"id\":\"d1\",\"abstract\":\"a\"}\n{\"id\":\"d1\",\"abstract\":\"b\"}\n");
        let err = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(&err, CorpusError::DuplicateId { id, record: 2, .. } if id == "d1"));
        assert!(err.to_string().contains("d1"));
    }

    #[test]
    fn malformed_line_names_line_number() {
        let f = write_tmp("{\"id\":\"d1\"}\n\n{not json\n");
        let err = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap_err();
        assert!(
            matches!(err, CorpusError::Malformed { record: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn missing_abstract_yields_empty_document() {
        let f = write_tmp("{\"id\":\"d1\",\"title\":\"x\"}\n{\"id\":\"d2\",\"abstract\":null}\n");
        let docs = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(docs.len(), 2);
        assert!(docs.iter().all(|d| !d.has_abstract()));
    }

    #[test]
    fn csv_corpus_with_quoted_fields() {
        let f = write_tmp("id,title,abstract\nd1,\"A, title\",\"Bats carry virus.\"\nd2,,\n");
        let docs = load_corpus(f.path(), CorpusFormat::Csv).unwrap();
        assert_eq!(
            docs[0],
            Document::new("d1", "A, title", "Bats carry virus.")
        );
        assert_eq!(docs[1], Document::new("d2", "", ""));
    }

    #[test]
    fn csv_without_id_column_is_malformed() {
        let f = write_tmp("key,abstract\nd1,x\n");
        let err = load_corpus(f.path(), CorpusFormat::Csv).unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { record: 0, .. }));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err =
            load_corpus(Path::new("/nonexistent/corpus.jsonl"), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, CorpusError::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/corpus.jsonl"));
    }

    #[test]
    fn tokenize_splits_sentences_and_drops_stops() {
        let doc = Document::new("d", "", "The virus spreads fast. It mutates.");
        let stops = StopWordSet::from_words(["the", "it"]);
        let t = tokenize(&doc, &stops);
        assert_eq!(
            t.sentences,
            vec![vec!["virus", "spreads", "fast"], vec!["mutates"]]
        );
    }

    #[test]
    fn tokenize_drops_digits_and_splits_hyphens() {
        let doc = Document::new("d", "", "SARS-CoV-2 in 2020!");
        let t = tokenize(&doc, &StopWordSet::from_words(["in"]));
        assert_eq!(t.sentences, vec![vec!["sars", "cov"]]);
    }

    #[test]
    fn tokenize_empty_abstract() {
        let t = tokenize(&Document::new("d", "", ""), &StopWordSet::empty());
        assert!(t.sentences.is_empty());
    }

    #[test]
    fn non_ascii_words_are_dropped_whole() {
        let doc = Document::new("d", "", "Café 病毒 virus naïve host.");
        let t = tokenize(&doc, &StopWordSet::empty());
        assert_eq!(t.sentences, vec![vec!["virus", "host"]]);
    }

    #[test]
    fn decimal_point_is_not_a_sentence_boundary() {
        assert_eq!(
            split_sentences("dose 2.5 mg. next"),
            vec!["dose 2.5 mg", " next"]
        );
        assert_eq!(split_sentences("a?b! c"), vec!["a?b", " c"]);
    }

    #[test]
    fn stop_set_membership_ignores_case() {
        let stops = StopWordSet::from_words(["The"]);
        assert!(stops.contains("the"));
        assert!(stops.contains("THE"));
    }

    #[test]
    fn stopword_file_skips_comments_and_blanks() {
        let f = write_tmp("# header\nthe\n\n  Of \n#and\n");
        let stops = StopWordSet::from_file(f.path()).unwrap();
        assert_eq!(stops.sorted(), vec!["of", "the"]);
        assert_eq!(
            stops.source(),
            &StopWordSource::File(f.path().to_path_buf())
        );
    }

    #[test]
    fn bundled_list_covers_function_words() {
        let stops = StopWordSet::bundled();
        assert!(stops.len() >= 300);
        for w in ["the", "of", "and", "in", "with", "is"] {
            assert!(stops.contains(w), "{w}");
        }
        assert!(!stops.contains("virus"));
    }

    #[test]
    fn candidates_count_by_frequency() {
        let doc = TokenizedDocument {
            doc_id: "d".into(),
            sentences: vec![vec!["virus".into(), "cell".into(), "virus".into()]; 3],
        };
        let c = generate_stopword_candidates([&doc], nz(2));
        assert_eq!(c, vec![("virus".to_string(), 6), ("cell".to_string(), 3)]);
    }

    #[test]
    fn candidates_ties_are_lexicographic_and_truncation_is_noop() {
        let doc = TokenizedDocument {
            doc_id: "d".into(),
            sentences: vec![vec!["beta".into(), "alpha".into()]],
        };
        let c = generate_stopword_candidates([&doc], nz(10));
        assert_eq!(c, vec![("alpha".to_string(), 1), ("beta".to_string(), 1)]);
    }

    #[test]
    fn parallel_tokenization_preserves_order() {
        let docs: Vec<Document> = (0..50)
            .map(|i| Document::new(format!("d{i}"), "", format!("word{i} x alpha beta. gamma")))
            .collect();
        let stops = StopWordSet::empty();
        let seq = tokenize_corpus(&docs, &stops, nz(1));
        let par = tokenize_corpus(&docs, &stops, nz(4));
        assert_eq!(seq, par);
    }

    #[test]
    fn stats_count_documents_without_abstracts() {
        let docs = vec![Document::new("a", "", "x y. z"), Document::new("b", "", "")];
        let tok = tokenize_corpus(&docs, &StopWordSet::empty(), nz(1));
        let stats = TokenStats::collect(&docs, &tok);
        assert_eq!(
            stats,
            TokenStats {
                documents: 2,
                documents_with_abstract: 1,
                sentences: 2,
                tokens: 3,
                vocabulary: 3
            }
        );
    }
}
