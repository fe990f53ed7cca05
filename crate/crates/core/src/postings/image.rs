//! Persisted index: header, vocabulary, directory, payload, samples, document starts.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "UIDX" | version u16 | mode u8 | representation u8
//! k u32 | B u32 | rice_b u8 (255 = per list) | ds u32
//! universe u32 | original bytes u64
//! then five length-prefixed sections: vocabulary (terms, then the stopwords
//! used at build time), directory, payload, samples, doc starts
//! ```

use std::path::Path;

use super::store::Store;
use super::{Params, PostingLists, Representation};
use crate::corpus::{Corpus, ParseMode, Stopwords, Vocabulary};
use crate::error::{Error, Result};
use crate::io::{ByteReader, ByteWriter};
use crate::succinct::IntVector;

pub const MAGIC: &[u8; 4] = b"UIDX";
pub const FORMAT_VERSION: u16 = 1;

/// Index size split by component, in bytes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceBreakdown {
    /// Encoded lists (or `C`, or the LZ-End parse) with their pointers.
    pub payload: usize,
    pub grammar: usize,
    pub samples: usize,
    /// Uncompressed list lengths.
    pub directory: usize,
}

impl SpaceBreakdown {
    pub fn total(&self) -> usize {
        self.payload + self.grammar + self.samples + self.directory
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexImage {
    pub mode: ParseMode,
    pub repr: Representation,
    pub params: Params,
    pub universe: u32,
    pub original_byte_size: u64,
    pub vocab: Vocabulary,
    pub doc_starts: Vec<u32>,
    /// Stopwords removed at build time, so queries can be parsed the same way.
    pub stopwords: Stopwords,
    lengths: IntVector,
    pub(crate) store: Store,
}

/// Encodes the lists under a representation. The result has an empty
/// vocabulary and no document starts; [`IndexImage::build`] fills both.
pub fn materialize(lists: &PostingLists, repr: Representation, params: &Params) -> Result<IndexImage> {
    repr.supports(lists.mode)?;
    let lengths: Vec<u64> = lists.lists.iter().map(|l| l.len() as u64).collect();
    Ok(IndexImage {
        mode: lists.mode,
        repr,
        params: *params,
        universe: lists.universe,
        original_byte_size: 0,
        vocab: Vocabulary::default(),
        doc_starts: Vec::new(),
        stopwords: Stopwords::none(),
        lengths: IntVector::from_values(&lengths),
        store: Store::build(repr, &lists.lists, lists.universe, params)?,
    })
}

impl IndexImage {
    pub fn build(corpus: &Corpus, vocab: &Vocabulary, repr: Representation, params: &Params) -> Result<Self> {
        repr.supports(corpus.mode)?;
        let lists = super::build_lists(corpus, vocab.len());
        let mut image = materialize(&lists, repr, params)?;
        image.vocab = Vocabulary::from_terms(vocab.terms().to_vec());
        image.doc_starts = corpus.doc_starts.clone();
        image.original_byte_size = corpus.original_byte_size;
        Ok(image)
    }

    /// Number of lists (vocabulary size).
    pub fn list_count(&self) -> usize {
        self.lengths.len()
    }

    /// Uncompressed length of the list of term `id`; 0 for unknown ids.
    pub fn list_len(&self, id: u32) -> usize {
        match id.checked_sub(1) {
            Some(w) if (w as usize) < self.lengths.len() => self.lengths.get(w as usize) as usize,
            _ => 0,
        }
    }

    pub(crate) fn slot(&self, id: u32) -> Option<usize> {
        let w = id.checked_sub(1)? as usize;
        (w < self.lengths.len()).then_some(w)
    }

    /// Absolute postings of term `id` (empty for unknown ids).
    pub fn decode_list(&self, id: u32) -> Result<Vec<u32>> {
        match self.slot(id) {
            Some(w) => self.store.decode(w, self.list_len(id)),
            None => Ok(Vec::new()),
        }
    }

    pub fn space(&self) -> SpaceBreakdown {
        SpaceBreakdown {
            payload: self.store.payload_bytes(),
            grammar: self.store.grammar_bytes(),
            samples: self.store.sample_bytes(),
            directory: self.lengths.size_in_bytes(),
        }
    }

    /// Size of the index structures. The vocabulary strings and the document
    /// start table are the same for every representation and are left out.
    pub fn index_bytes(&self) -> usize {
        self.space().total()
    }

    /// Serialized size of the parts shared by every representation: the
    /// vocabulary section and the document start section.
    pub fn shared_bytes(&self) -> usize {
        let mut s = ByteWriter::new();
        self.write_vocab(&mut s);
        let vocab = s.into_inner().len();
        vocab + 8 + 4 * self.doc_starts.len()
    }

    fn write_vocab(&self, s: &mut ByteWriter) {
        s.u64(self.vocab.len() as u64);
        for t in self.vocab.terms() {
            s.blob(t.as_bytes());
        }
        let stop = self.stopwords.words();
        s.u64(stop.len() as u64);
        for t in stop {
            s.blob(t.as_bytes());
        }
    }

    /// Index size as a percentage of the original collection.
    pub fn space_pct(&self) -> f64 {
        if self.original_byte_size == 0 {
            return 0.0;
        }
        self.index_bytes() as f64 * 100.0 / self.original_byte_size as f64
    }

    /// Re-Pair statistics: `(entries in C, rules)`.
    pub fn repair_stats(&self) -> Option<(usize, usize)> {
        match &self.store {
            Store::Repair(r) => Some((r.lists.c_len(), r.grammar.rule_count())),
            _ => None,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u16(FORMAT_VERSION);
        w.u8(match self.mode {
            ParseMode::NonPositional => 0,
            ParseMode::Positional => 1,
        });
        w.u8(self.repr.tag());
        w.u32(self.params.k);
        w.u32(self.params.st_b);
        w.u8(self.params.rice_b.unwrap_or(u8::MAX));
        w.u32(self.params.ds);
        w.u32(self.universe);
        w.u64(self.original_byte_size);

        let mut s = ByteWriter::new();
        self.write_vocab(&mut s);
        w.blob(&s.into_inner());

        let mut s = ByteWriter::new();
        self.lengths.write_to(&mut s);
        w.blob(&s.into_inner());

        let mut s = ByteWriter::new();
        self.store.write_payload(&mut s);
        w.blob(&s.into_inner());

        let mut s = ByteWriter::new();
        self.store.write_samples(&mut s);
        w.blob(&s.into_inner());

        let mut s = ByteWriter::new();
        s.u64(self.doc_starts.len() as u64);
        for &d in &self.doc_starts {
            s.u32(d);
        }
        w.blob(&s.into_inner());
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        if r.take(4).ok() != Some(MAGIC.as_slice()) {
            return Err(Error::Format("missing UIDX magic".into()));
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("format version {version}, expected {FORMAT_VERSION}")));
        }
        let mode = match r.u8()? {
            0 => ParseMode::NonPositional,
            1 => ParseMode::Positional,
            m => return Err(Error::Format(format!("unknown mode byte {m}"))),
        };
        let repr = Representation::from_tag(r.u8()?)?;
        let k = r.u32()?;
        let st_b = r.u32()?;
        let rice_b = match r.u8()? {
            u8::MAX => None,
            b => Some(b),
        };
        let ds = r.u32()?;
        let universe = r.u32()?;
        let original_byte_size = r.u64()?;

        let mut s = ByteReader::new(r.blob()?);
        let n = s.u64()? as usize;
        let mut terms = Vec::with_capacity(n.min(s.remaining()));
        for _ in 0..n {
            let t = std::str::from_utf8(s.blob()?).map_err(|_| Error::Format("vocabulary term is not UTF-8".into()))?;
            terms.push(t.to_string());
        }
        let n = s.u64()? as usize;
        let mut stop = String::new();
        for _ in 0..n {
            let t = std::str::from_utf8(s.blob()?).map_err(|_| Error::Format("stopword is not UTF-8".into()))?;
            stop.push_str(t);
            stop.push('\n');
        }
        s.expect_end("vocabulary")?;

        let mut s = ByteReader::new(r.blob()?);
        let lengths = IntVector::read_from(&mut s)?;
        s.expect_end("directory")?;

        let mut payload = ByteReader::new(r.blob()?);
        let mut samples = ByteReader::new(r.blob()?);
        let store = Store::read(repr, &mut payload, &mut samples)?;
        payload.expect_end("payload")?;
        samples.expect_end("samples")?;

        let mut s = ByteReader::new(r.blob()?);
        let d = s.u64()? as usize;
        let mut doc_starts = Vec::with_capacity(d.min(s.remaining() / 4));
        for _ in 0..d {
            doc_starts.push(s.u32()?);
        }
        s.expect_end("document starts")?;
        r.expect_end("index image")?;

        if !terms.is_empty() && terms.len() != lengths.len() {
            return Err(Error::Format("vocabulary and directory sizes differ".into()));
        }
        Ok(Self {
            mode,
            repr,
            params: Params { k, st_b, rice_b, ds },
            universe,
            original_byte_size,
            vocab: Vocabulary::from_terms(terms),
            doc_starts,
            stopwords: Stopwords::parse(&stop),
            lengths,
            store,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::postings::store::use_bitmap;

    fn lists() -> PostingLists {
        PostingLists {
            mode: ParseMode::NonPositional,
            universe: 16,
            lists: vec![
                vec![1, 3, 4, 6, 8, 10],
                vec![2, 5, 14],
                vec![],
                vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16],
            ],
        }
    }

    #[test]
    fn every_representation_round_trips() {
        let l = lists();
        for repr in Representation::ALL {
            let img = materialize(
                &l,
                repr,
                &Params {
                    k: 1,
                    st_b: 2,
                    ..Params::default()
                },
            )
            .unwrap();
            for (w, list) in l.lists.iter().enumerate() {
                assert_eq!(&img.decode_list(w as u32 + 1).unwrap(), list, "{repr}");
            }
            assert!(img.decode_list(0).unwrap().is_empty());
            assert!(img.decode_list(99).unwrap().is_empty());
            let back = IndexImage::from_bytes(&img.to_bytes()).unwrap();
            assert_eq!(back, img, "{repr}");
            assert!(img.index_bytes() > 0);
        }
    }

    #[test]
    fn stopwords_survive_the_round_trip() {
        let mut img = materialize(&lists(), Representation::Rice, &Params::default()).unwrap();
        img.stopwords = Stopwords::english();
        let back = IndexImage::from_bytes(&img.to_bytes()).unwrap();
        assert!(back.stopwords.contains("the"));
        assert_eq!(back, img);
    }

    #[test]
    fn hybrid_threshold() {
        assert!(use_bitmap(3, 16));
        assert!(!use_bitmap(2, 16));
    }

    #[test]
    fn rejects_bad_images() {
        let img = materialize(&lists(), Representation::Vbyte, &Params::default()).unwrap();
        let bytes = img.to_bytes();
        assert!(matches!(
            IndexImage::from_bytes(&bytes[..10]),
            Err(Error::Format(_) | Error::Truncated(_))
        ));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(IndexImage::from_bytes(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[7] = 99;
        assert!(matches!(IndexImage::from_bytes(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn positional_rice_runs_is_rejected() {
        let mut l = lists();
        l.mode = ParseMode::Positional;
        assert!(matches!(
            materialize(&l, Representation::RiceRuns, &Params::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
