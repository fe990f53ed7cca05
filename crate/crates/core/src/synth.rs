//! Synthetic versioned collections and query sets.
//!
//! A collection is a set of articles, each stored as a chain of versions.
//! Every version is derived from the previous one by a few edits of short
//! token spans, and now and then an edit is undone by the next version, which
//! mimics the revision history of a wiki. Words are drawn from a Zipf
//! distribution over a fixed vocabulary of made-up words.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Zipf};

use crate::corpus::{Corpus, Query, QueryKind, QuerySet, Vocabulary, DEFAULT_MARKER};

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ne", "ru", "sa", "to", "vi", "ba", "de", "fu", "go", "hi", "ju", "pe", "zo",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub articles: usize,
    pub versions: usize,
    /// Mean number of words in the first version of an article.
    pub article_len: usize,
    pub vocab_size: usize,
    pub zipf_exponent: f64,
    /// Expected fraction of tokens edited between consecutive versions.
    pub mutation_rate: f64,
    /// Mean length of an edited span, in tokens.
    pub edit_span: f64,
    /// Probability that a version undoes the previous edit.
    pub revert_rate: f64,
    /// Probability that a word is followed by a comma or a period.
    pub punctuation_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            articles: 100,
            versions: 50,
            article_len: 300,
            vocab_size: 20_000,
            zipf_exponent: 1.0,
            mutation_rate: 0.01,
            edit_span: 4.0,
            revert_rate: 0.1,
            punctuation_rate: 0.08,
            seed: 1,
        }
    }
}

/// The made-up word of the given rank (0-based). Distinct ranks give distinct words.
pub fn word_for(rank: usize) -> String {
    let mut w = String::new();
    let mut r = rank;
    loop {
        w.push_str(SYLLABLES[r % SYLLABLES.len()]);
        r /= SYLLABLES.len();
        if r == 0 {
            break;
        }
        r -= 1;
    }
    w
}

#[derive(Clone, Copy)]
struct Tok {
    word: u32,
    punct: u8, // 0 none, 1 comma, 2 period
}

struct Sampler {
    zipf: Zipf<f64>,
    punctuation_rate: f64,
}

impl Sampler {
    fn token(&self, rng: &mut ChaCha8Rng) -> Tok {
        let word = self.zipf.sample(rng) as u32 - 1;
        let punct = if rng.random_bool(self.punctuation_rate) {
            if rng.random_bool(0.5) {
                1
            } else {
                2
            }
        } else {
            0
        };
        Tok { word, punct }
    }
}

fn render(tokens: &[Tok], out: &mut String) {
    let mut capital = true;
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let w = word_for(t.word as usize);
        if capital {
            let mut c = w.chars();
            let first = c.next().unwrap();
            out.extend(first.to_uppercase());
            out.push_str(c.as_str());
        } else {
            out.push_str(&w);
        }
        match t.punct {
            1 => out.push(','),
            2 => out.push('.'),
            _ => {}
        }
        capital = t.punct == 2;
    }
    out.push('\n');
}

/// Applies one version's worth of span edits: replace, insert or delete a
/// run of tokens with geometric length.
fn edit(tokens: &mut Vec<Tok>, cfg: &SynthConfig, sampler: &Sampler, rng: &mut ChaCha8Rng) {
    let span = cfg.edit_span.max(1.0);
    let p = (cfg.mutation_rate / span).clamp(0.0, 1.0);
    let edits = Binomial::new(tokens.len() as u64, p).expect("valid binomial").sample(rng);
    for _ in 0..edits {
        let mut n = 1;
        while n < tokens.len() && rng.random_bool(1.0 - 1.0 / span) {
            n += 1;
        }
        let at = rng.random_range(0..tokens.len());
        let end = (at + n).min(tokens.len());
        match rng.random_range(0..4) {
            0 | 1 => {
                for t in &mut tokens[at..end] {
                    *t = sampler.token(rng);
                }
            }
            2 => {
                let fresh: Vec<Tok> = (0..n).map(|_| sampler.token(rng)).collect();
                tokens.splice(at..at, fresh);
            }
            _ if end - at < tokens.len() => {
                tokens.drain(at..end);
            }
            _ => {}
        }
    }
}

/// Generates a raw collection (documents separated by the default marker).
/// Documents are ordered article by article, versions in chronological order.
pub fn generate(cfg: &SynthConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sampler = Sampler {
        zipf: Zipf::new(cfg.vocab_size.max(1) as f64, cfg.zipf_exponent).expect("valid Zipf parameters"),
        punctuation_rate: cfg.punctuation_rate,
    };
    let mut out = String::new();
    let mut first = true;
    for _ in 0..cfg.articles {
        let len = rng.random_range(cfg.article_len / 2..=cfg.article_len * 3 / 2).max(1);
        let mut tokens: Vec<Tok> = (0..len).map(|_| sampler.token(&mut rng)).collect();
        let mut before: Option<Vec<Tok>> = None;
        for v in 0..cfg.versions {
            if v > 0 {
                if let Some(prev) = before.take().filter(|_| rng.random_bool(cfg.revert_rate.clamp(0.0, 1.0))) {
                    tokens = prev;
                } else {
                    before = Some(tokens.clone());
                    edit(&mut tokens, cfg, &sampler, &mut rng);
                }
            }
            if !first {
                out.push_str(DEFAULT_MARKER);
                out.push('\n');
            }
            first = false;
            render(&tokens, &mut out);
        }
    }
    out
}

fn is_word(term: &str) -> bool {
    term.chars().next().is_some_and(char::is_alphanumeric)
}

/// Draws a query set from the collection so that every query has at least
/// one answer (word queries excepted, which always do).
///
/// Low- and high-frequency word queries sample the least frequent half and
/// the most frequent 5% of the words. Conjunctive queries pick `terms`
/// distinct words of one document; phrase queries copy a run of `terms`
/// consecutive words (with the separators between them) from one document.
pub fn generate_queries(corpus: &Corpus, vocab: &Vocabulary, kind: QueryKind, count: usize, terms: usize, seed: u64) -> QuerySet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let query = |ids: Vec<u32>| Query {
        terms: ids.iter().map(|&id| vocab.term(id).unwrap().to_string()).collect(),
        ids,
    };
    let mut queries = Vec::with_capacity(count);
    match kind {
        QueryKind::WordLowFreq | QueryKind::WordHighFreq => {
            let mut words: Vec<u32> = (1..=vocab.len() as u32).filter(|&id| is_word(vocab.term(id).unwrap())).collect();
            words.sort_by_key(|&id| (vocab.collection_freq(id), id));
            let pool = if kind == QueryKind::WordLowFreq {
                &words[..words.len().div_ceil(2)]
            } else {
                &words[words.len() - words.len().div_ceil(20)..]
            };
            for _ in 0..count {
                queries.push(query(vec![*pool.choose(&mut rng).expect("vocabulary has words")]));
            }
        }
        QueryKind::Conjunctive => {
            let docs: Vec<Vec<u32>> = corpus
                .documents
                .iter()
                .map(|d| {
                    let mut w: Vec<u32> = d.tokens.iter().copied().filter(|&t| is_word(vocab.term(t).unwrap())).collect();
                    w.sort_unstable();
                    w.dedup();
                    w
                })
                .filter(|w| w.len() >= terms)
                .collect();
            for _ in 0..count {
                let Some(doc) = docs.choose(&mut rng) else { break };
                let mut ids: Vec<u32> = doc.choose_multiple(&mut rng, terms).copied().collect();
                ids.shuffle(&mut rng);
                queries.push(query(ids));
            }
        }
        QueryKind::Phrase => {
            // (document, token indices of its words)
            let docs: Vec<(usize, Vec<usize>)> = corpus
                .documents
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let w = (0..d.tokens.len())
                        .filter(|&k| is_word(vocab.term(d.tokens[k]).unwrap()))
                        .collect::<Vec<_>>();
                    (i, w)
                })
                .filter(|(_, w)| w.len() >= terms)
                .collect();
            for _ in 0..count {
                let Some((d, words)) = docs.choose(&mut rng) else { break };
                let start = rng.random_range(0..=words.len() - terms);
                let span = words[start]..=words[start + terms - 1];
                queries.push(query(corpus.documents[*d].tokens[span].to_vec()));
            }
        }
    }
    QuerySet { kind, queries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest, IngestOptions, ParseMode};
    use std::collections::HashSet;

    #[test]
    fn words_are_distinct() {
        let words: HashSet<String> = (0..5000).map(word_for).collect();
        assert_eq!(words.len(), 5000);
        assert_eq!(word_for(0), "ka");
        assert_eq!(word_for(16), "kaka");
    }

    #[test]
    fn versions_are_near_identical() {
        let cfg = SynthConfig {
            articles: 3,
            versions: 10,
            article_len: 200,
            ..SynthConfig::default()
        };
        let raw = generate(&cfg);
        assert_eq!(raw, generate(&cfg));
        let (c, _) = ingest(&raw, &IngestOptions::new(ParseMode::Positional)).unwrap();
        assert_eq!(c.num_docs(), 30);
        let a: HashSet<u32> = c.documents[0].tokens.iter().copied().collect();
        let b: HashSet<u32> = c.documents[1].tokens.iter().copied().collect();
        assert!(a.intersection(&b).count() * 10 >= a.len() * 9);
    }

    #[test]
    fn generated_queries_have_the_requested_shape() {
        let cfg = SynthConfig {
            articles: 4,
            versions: 5,
            article_len: 100,
            ..SynthConfig::default()
        };
        let raw = generate(&cfg);
        let (c, v) = ingest(&raw, &IngestOptions::new(ParseMode::Positional)).unwrap();
        let q = generate_queries(&c, &v, QueryKind::Phrase, 50, 5, 3);
        assert_eq!(q.len(), 50);
        for query in &q.queries {
            assert_eq!(query.terms.iter().filter(|t| is_word(t)).count(), 5);
            assert!(is_word(&query.terms[0]) && is_word(query.terms.last().unwrap()));
        }
        let (c, v) = ingest(&raw, &IngestOptions::new(ParseMode::NonPositional)).unwrap();
        let q = generate_queries(&c, &v, QueryKind::Conjunctive, 50, 2, 3);
        assert!(q.queries.iter().all(|q| q.ids.len() == 2 && q.ids[0] != q.ids[1]));
        let lo = generate_queries(&c, &v, QueryKind::WordLowFreq, 20, 1, 3);
        let hi = generate_queries(&c, &v, QueryKind::WordHighFreq, 20, 1, 3);
        let max_lo = lo.queries.iter().map(|q| v.collection_freq(q.ids[0])).max().unwrap();
        let min_hi = hi.queries.iter().map(|q| v.collection_freq(q.ids[0])).min().unwrap();
        assert!(max_lo <= min_hi);
    }
}
