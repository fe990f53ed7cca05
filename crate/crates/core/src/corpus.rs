//! Document ingestion, tokenization, vocabulary and query files.
//!
//! Two parsing modes are supported. The non-positional mode case-folds,
//! keeps only words and drops stopwords. The positional mode keeps the text
//! as written and emits words and separators alternately; a separator that is
//! a single space is omitted, so consecutive words in the text are usually
//! consecutive tokens. Documents are joined by a reserved separator token so
//! that phrases never match across a document boundary.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Record delimiter line used when none is configured.
pub const DEFAULT_MARKER: &str = "\x01";

/// Term of the token placed between consecutive documents in positional
/// mode. The tokenizer never produces an empty term.
pub const DOC_SEPARATOR_TERM: &str = "";

/// Query term id for terms the vocabulary does not contain.
pub const ABSENT_TERM: u32 = 0;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseMode {
    NonPositional,
    Positional,
}

impl ParseMode {
    pub fn name(self) -> &'static str {
        match self {
            ParseMode::NonPositional => "nonpos",
            ParseMode::Positional => "pos",
        }
    }
}

impl FromStr for ParseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonpos" => Ok(ParseMode::NonPositional),
            "pos" => Ok(ParseMode::Positional),
            _ => Err(Error::Unsupported(format!("mode `{s}` (expected nonpos or pos)"))),
        }
    }
}

impl fmt::Display for ParseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stopword list, compared after case folding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn none() -> Self {
        Self::default()
    }

    /// The 20 English stopwords shipped with the crate.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    /// The words in sorted order.
    pub fn words(&self) -> Vec<&str> {
        let mut w: Vec<&str> = self.0.iter().map(String::as_str).collect();
        w.sort_unstable();
        w
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct IngestOptions {
    pub mode: ParseMode,
    pub stopwords: Stopwords,
    pub max_doc_tokens: usize,
    pub marker: String,
}

impl IngestOptions {
    pub fn new(mode: ParseMode) -> Self {
        let stopwords = match mode {
            ParseMode::NonPositional => Stopwords::english(),
            ParseMode::Positional => Stopwords::none(),
        };
        Self {
            mode,
            stopwords,
            max_doc_tokens: u32::MAX as usize,
            marker: DEFAULT_MARKER.to_string(),
        }
    }

    pub fn with_stopwords(mut self, stopwords: Stopwords) -> Self {
        self.stopwords = stopwords;
        self
    }

    pub fn with_max_doc_tokens(mut self, max: usize) -> Self {
        self.max_doc_tokens = max;
        self
    }

    pub fn with_marker(mut self, marker: impl Into<String>) -> Self {
        self.marker = marker.into();
        self
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits text into maximal runs of word and non-word characters.
pub fn runs(text: &str) -> impl Iterator<Item = (bool, &str)> {
    let mut rest = text;
    std::iter::from_fn(move || {
        let first = rest.chars().next()?;
        let word = is_word_char(first);
        let end = rest
            .char_indices()
            .find(|&(_, c)| is_word_char(c) != word)
            .map_or(rest.len(), |(i, _)| i);
        let (run, tail) = rest.split_at(end);
        rest = tail;
        Some((word, run))
    })
}

/// Tokens of one document in the given mode (stopwords only apply to the
/// non-positional mode).
pub fn tokenize(text: &str, mode: ParseMode, stopwords: &Stopwords) -> Vec<String> {
    match mode {
        ParseMode::NonPositional => runs(text)
            .filter(|&(word, _)| word)
            .map(|(_, w)| w.to_lowercase())
            .filter(|w| !stopwords.contains(w))
            .collect(),
        ParseMode::Positional => runs(text)
            .filter(|&(word, run)| word || run != " ")
            .map(|(_, run)| run.to_string())
            .collect(),
    }
}

/// Splits raw input into document records at marker lines.
pub fn split_records<'a>(text: &'a str, marker: &str) -> Vec<Vec<&'a str>> {
    let mut records = vec![Vec::new()];
    for line in text.lines() {
        if line.strip_suffix('\r').unwrap_or(line) == marker {
            records.push(Vec::new());
        } else {
            records.last_mut().unwrap().push(line);
        }
    }
    records.retain(|r| !r.is_empty());
    records
}

/// Term dictionary with collection and document frequencies. Ids are
/// 1-based and assigned in order of first occurrence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    ids: HashMap<String, u32>,
    terms: Vec<String>,
    collection_freq: Vec<u64>,
    doc_freq: Vec<u32>,
}

impl Vocabulary {
    fn intern(&mut self, term: &str) -> u32 {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        self.terms.push(term.to_string());
        self.collection_freq.push(0);
        self.doc_freq.push(0);
        let id = self.terms.len() as u32;
        self.ids.insert(term.to_string(), id);
        id
    }

    /// Rebuilds a vocabulary from stored terms (frequencies left at zero).
    pub fn from_terms(terms: Vec<String>) -> Self {
        let ids = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32 + 1)).collect();
        let n = terms.len();
        Self {
            ids,
            terms,
            collection_freq: vec![0; n],
            doc_freq: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Id of `term`, or [`ABSENT_TERM`].
    pub fn lookup(&self, term: &str) -> u32 {
        self.ids.get(term).copied().unwrap_or(ABSENT_TERM)
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.terms.get((id as usize).checked_sub(1)?).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn collection_freq(&self, id: u32) -> u64 {
        self.collection_freq[id as usize - 1]
    }

    pub fn doc_freq(&self, id: u32) -> u32 {
        self.doc_freq[id as usize - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    /// 1-based.
    pub id: u32,
    pub tokens: Vec<u32>,
}

/// An ingested collection. In positional mode the concatenation of all
/// documents, with one separator token between consecutive ones, is the text
/// that word positions refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub mode: ParseMode,
    pub documents: Vec<Document>,
    /// 1-based offset where each document starts in the concatenation.
    pub doc_starts: Vec<u32>,
    pub total_tokens: u64,
    pub original_byte_size: u64,
    /// Id of the inter-document separator (positional mode only).
    pub separator: Option<u32>,
}

impl Corpus {
    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    /// Token ids of the whole concatenation, separators included.
    pub fn concatenation(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.total_tokens as usize);
        for (i, d) in self.documents.iter().enumerate() {
            if i > 0 {
                if let Some(sep) = self.separator {
                    out.push(sep);
                }
            }
            out.extend_from_slice(&d.tokens);
        }
        out
    }
}

/// Tokenizes a raw collection into a corpus and its vocabulary.
pub fn ingest(raw: &str, opts: &IngestOptions) -> Result<(Corpus, Vocabulary)> {
    let records = split_records(raw, &opts.marker);
    let mut vocab = Vocabulary::default();
    let separator = match opts.mode {
        ParseMode::Positional => Some(vocab.intern(DOC_SEPARATOR_TERM)),
        ParseMode::NonPositional => None,
    };
    let mut documents = Vec::with_capacity(records.len());
    let mut doc_starts = Vec::with_capacity(records.len());
    let mut total: u64 = 0;
    let mut seen = HashSet::new();
    for (i, lines) in records.iter().enumerate() {
        let text = lines.join("\n");
        let terms = tokenize(&text, opts.mode, &opts.stopwords);
        if terms.len() > opts.max_doc_tokens {
            return Err(Error::DocumentTooLong {
                doc: i + 1,
                tokens: terms.len(),
                max: opts.max_doc_tokens,
            });
        }
        if i > 0 && separator.is_some() {
            total += 1;
        }
        doc_starts.push(total + 1);
        total += terms.len() as u64;
        seen.clear();
        let tokens = terms
            .iter()
            .map(|t| {
                let id = vocab.intern(t);
                vocab.collection_freq[id as usize - 1] += 1;
                if seen.insert(id) {
                    vocab.doc_freq[id as usize - 1] += 1;
                }
                id
            })
            .collect();
        documents.push(Document { id: i as u32 + 1, tokens });
    }
    if let Some(sep) = separator {
        let boundaries = documents.len().saturating_sub(1) as u64;
        vocab.collection_freq[sep as usize - 1] = boundaries;
        vocab.doc_freq[sep as usize - 1] = 0;
    }
    if documents.iter().all(|d| d.tokens.is_empty()) {
        return Err(Error::EmptyCorpus);
    }
    if total > u32::MAX as u64 || documents.len() > u32::MAX as usize {
        return Err(Error::Unsupported("collection exceeds 2^32 - 1 tokens or documents".into()));
    }
    Ok((
        Corpus {
            mode: opts.mode,
            documents,
            doc_starts: doc_starts.into_iter().map(|s| s as u32).collect(),
            total_tokens: total,
            original_byte_size: raw.len() as u64,
            separator,
        },
        vocab,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    WordLowFreq,
    WordHighFreq,
    Conjunctive,
    Phrase,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [
        QueryKind::WordLowFreq,
        QueryKind::WordHighFreq,
        QueryKind::Conjunctive,
        QueryKind::Phrase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::WordLowFreq => "word-low",
            QueryKind::WordHighFreq => "word-high",
            QueryKind::Conjunctive => "and",
            QueryKind::Phrase => "phrase",
        }
    }

    pub fn is_word(self) -> bool {
        matches!(self, QueryKind::WordLowFreq | QueryKind::WordHighFreq)
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("query kind `{s}` (expected word-low, word-high, and, phrase)")))
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub terms: Vec<String>,
    /// Vocabulary ids; [`ABSENT_TERM`] for unknown terms.
    pub ids: Vec<u32>,
}

impl Query {
    pub fn has_absent_term(&self) -> bool {
        self.ids.contains(&ABSENT_TERM)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySet {
    pub kind: QueryKind,
    pub queries: Vec<Query>,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// One line per query, in the format [`parse_queries`] reads back.
    pub fn to_text(&self, mode: ParseMode) -> String {
        let mut out = String::new();
        for q in &self.queries {
            match mode {
                // adjacent word tokens were separated by an omitted single space
                ParseMode::Positional => {
                    let mut prev_word = false;
                    for t in &q.terms {
                        let word = t.chars().next().is_some_and(is_word_char);
                        if word && prev_word {
                            out.push(' ');
                        }
                        out.push_str(t);
                        prev_word = word;
                    }
                }
                ParseMode::NonPositional => out.push_str(&q.terms.join(" ")),
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a query file: one query per line. Terms are normalized like the
/// collection was, so in positional mode a line is tokenized into words and
/// separators, and in non-positional mode stopwords are dropped. Blank lines
/// are only allowed at the end of the file.
pub fn parse_queries(text: &str, kind: QueryKind, vocab: &Vocabulary, mode: ParseMode, stopwords: &Stopwords) -> Result<QuerySet> {
    let lines: Vec<&str> = text.lines().collect();
    let last = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |p| p + 1);
    let mut queries = Vec::with_capacity(last);
    for (n, line) in lines[..last].iter().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            return Err(Error::QueryParse {
                line: line_no,
                reason: "empty line".into(),
            });
        }
        let terms = match mode {
            ParseMode::Positional => tokenize(line.trim(), mode, stopwords),
            ParseMode::NonPositional => line.split_whitespace().flat_map(|t| tokenize(t, mode, stopwords)).collect(),
        };
        let words = terms.iter().filter(|t| t.chars().next().is_some_and(is_word_char)).count();
        if terms.is_empty() {
            // every term was a stopword: nothing indexed can match
            queries.push(Query {
                terms: vec![line.trim().to_string()],
                ids: vec![ABSENT_TERM],
            });
            continue;
        }
        let ok = match kind {
            QueryKind::WordLowFreq | QueryKind::WordHighFreq => terms.len() == 1,
            // stopwords may shrink a conjunction to a single term
            QueryKind::Conjunctive => line.split_whitespace().count() >= 2,
            QueryKind::Phrase => words >= 2,
        };
        if !ok {
            return Err(Error::QueryParse {
                line: line_no,
                reason: format!(
                    "a {kind} query needs {}",
                    if kind.is_word() { "exactly one term" } else { "at least two words" }
                ),
            });
        }
        let ids = terms.iter().map(|t| vocab.lookup(t)).collect();
        queries.push(Query { terms, ids });
    }
    Ok(QuerySet { kind, queries })
}

pub fn load_queries(
    path: impl AsRef<Path>,
    kind: QueryKind,
    vocab: &Vocabulary,
    mode: ParseMode,
    stopwords: &Stopwords,
) -> Result<QuerySet> {
    parse_queries(&std::fs::read_to_string(path)?, kind, vocab, mode, stopwords)
}
