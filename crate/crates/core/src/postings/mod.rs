//! Posting lists and their stored representations.

mod image;
mod sampling;
pub(crate) mod store;

use std::fmt;
use std::str::FromStr;

pub use image::{materialize, IndexImage, SpaceBreakdown, FORMAT_VERSION, MAGIC};
pub use sampling::{cm_step, st_samples, st_step, CmSamples, SampleTable, StSamples};

use crate::corpus::{Corpus, ParseMode};
use crate::error::{Error, Result};

/// One increasing list per vocabulary id (`lists[id - 1]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostingLists {
    pub mode: ParseMode,
    /// Largest possible value: number of documents, or total tokens.
    pub universe: u32,
    pub lists: Vec<Vec<u32>>,
}

impl PostingLists {
    pub fn get(&self, id: u32) -> &[u32] {
        id.checked_sub(1)
            .and_then(|i| self.lists.get(i as usize))
            .map_or(&[], Vec::as_slice)
    }

    pub fn total_postings(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

/// Document lists: the increasing ids of the documents containing each term.
pub fn build_nonpositional(corpus: &Corpus, vocab_len: usize) -> PostingLists {
    let mut lists = vec![Vec::new(); vocab_len];
    for d in &corpus.documents {
        for &t in &d.tokens {
            let l: &mut Vec<u32> = &mut lists[t as usize - 1];
            if l.last() != Some(&d.id) {
                l.push(d.id);
            }
        }
    }
    PostingLists {
        mode: ParseMode::NonPositional,
        universe: corpus.num_docs() as u32,
        lists,
    }
}

/// Position lists: 1-based offsets of every occurrence in the concatenation.
pub fn build_positional(corpus: &Corpus, vocab_len: usize) -> PostingLists {
    let mut lists = vec![Vec::new(); vocab_len];
    for (p, t) in corpus.concatenation().into_iter().enumerate() {
        lists[t as usize - 1].push(p as u32 + 1);
    }
    PostingLists {
        mode: ParseMode::Positional,
        universe: corpus.total_tokens as u32,
        lists,
    }
}

pub fn build_lists(corpus: &Corpus, vocab_len: usize) -> PostingLists {
    match corpus.mode {
        ParseMode::NonPositional => build_nonpositional(corpus, vocab_len),
        ParseMode::Positional => build_positional(corpus, vocab_len),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    Vbyte,
    Rice,
    RiceRuns,
    Simple9,
    VbyteCm,
    VbyteSt,
    Hybrid,
    Repair,
    RepairSkip,
    RepairSkipCm,
    RepairSkipSt,
    VbyteLzend,
}

impl Representation {
    pub const ALL: [Representation; 12] = [
        Representation::Vbyte,
        Representation::Rice,
        Representation::RiceRuns,
        Representation::Simple9,
        Representation::VbyteCm,
        Representation::VbyteSt,
        Representation::Hybrid,
        Representation::Repair,
        Representation::RepairSkip,
        Representation::RepairSkipCm,
        Representation::RepairSkipSt,
        Representation::VbyteLzend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Vbyte => "vbyte",
            Representation::Rice => "rice",
            Representation::RiceRuns => "rice-runs",
            Representation::Simple9 => "simple9",
            Representation::VbyteCm => "vbyte-cm",
            Representation::VbyteSt => "vbyte-st",
            Representation::Hybrid => "hybrid",
            Representation::Repair => "repair",
            Representation::RepairSkip => "repair-skip",
            Representation::RepairSkipCm => "repair-skip-cm",
            Representation::RepairSkipSt => "repair-skip-st",
            Representation::VbyteLzend => "vbyte-lzend",
        }
    }

    pub fn tag(self) -> u8 {
        Self::ALL.iter().position(|&r| r == self).unwrap() as u8 + 1
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Self::ALL
            .get((tag as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Format(format!("unknown representation tag {tag}")))
    }

    pub fn is_repair(self) -> bool {
        matches!(
            self,
            Representation::Repair | Representation::RepairSkip | Representation::RepairSkipCm | Representation::RepairSkipSt
        )
    }

    /// Whether the representation can encode lists of the given mode.
    pub fn supports(self, mode: ParseMode) -> Result<()> {
        if self == Representation::RiceRuns && mode == ParseMode::Positional {
            return Err(Error::Unsupported(
                "rice-runs needs runs of consecutive values, which do not arise in position lists; \
                 use rice for positional indexes"
                    .into(),
            ));
        }
        Ok(())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| {
            let valid: Vec<_> = Self::ALL.iter().map(|r| r.name()).collect();
            Error::Unsupported(format!("representation `{s}` (valid: {})", valid.join(", ")))
        })
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Build parameters. Only the ones relevant to the chosen representation matter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    /// CM sampling: one sample every `k * ceil(log2 l)` entries.
    pub k: u32,
    /// ST sampling: about one sample every `B` entries.
    pub st_b: u32,
    /// Fixed Rice parameter; `None` picks one per list.
    pub rice_b: Option<u8>,
    /// Sampling period of the LZ-End phrase-end bitmap.
    pub ds: u32,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            k: 4,
            st_b: 16,
            rice_b: None,
            ds: crate::succinct::DEFAULT_SPARSE_SAMPLING as u32,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest, IngestOptions, Stopwords};

    #[test]
    fn document_lists() {
        let opts = IngestOptions::new(ParseMode::NonPositional).with_stopwords(Stopwords::none());
        let (c, v) = ingest("x y\n\x01\nx\n\x01\nx x z", &opts).unwrap();
        let l = build_nonpositional(&c, v.len());
        assert_eq!(l.get(v.lookup("x")), &[1, 2, 3]);
        assert_eq!(l.get(v.lookup("z")), &[3]);
        assert_eq!(l.get(0), &[] as &[u32]);
        assert_eq!(l.universe, 3);
    }

    #[test]
    fn position_lists() {
        let (c, v) = ingest("w1 w2 w1 w2", &IngestOptions::new(ParseMode::Positional)).unwrap();
        let l = build_positional(&c, v.len());
        assert_eq!(l.get(v.lookup("w1")), &[1, 3]);
        assert_eq!(l.get(v.lookup("absent")), &[] as &[u32]);
        assert_eq!(l.universe, 4);
        // the document separator term never occurs in a single document
        assert!(l.get(c.separator.unwrap()).is_empty());
    }

    #[test]
    fn representation_names() {
        for r in Representation::ALL {
            assert_eq!(r.name().parse::<Representation>().unwrap(), r);
            assert_eq!(Representation::from_tag(r.tag()).unwrap(), r);
        }
        assert!(Representation::RiceRuns.supports(ParseMode::Positional).is_err());
        assert!("lzma".parse::<Representation>().is_err());
    }
}
