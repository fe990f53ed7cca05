//! LZ-End parsing and random-access extraction.
//!
//! Each phrase copies a substring of the text that ends exactly where an
//! earlier phrase ends, then adds one explicit symbol. Because sources end on
//! phrase boundaries, any text suffix ending at a phrase boundary can be
//! extracted right to left without decompressing anything before it.
//!
//! The parser runs backward searches on an FM-index of the reversed text:
//! extending the current phrase by one symbol prepends that symbol to the
//! reversed pattern. Rows of the suffix array whose text position ends a
//! phrase carry that phrase's id in a range-minimum tree.

use crate::codecs::vbyte;
use crate::error::{Error, Result};
use crate::io::{ByteReader, ByteWriter};
use crate::succinct::{IntVector, SparseBitmap, DEFAULT_SPARSE_SAMPLING};

/// A phrase as produced by the parser (used by tests and oracles).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phrase {
    /// 1-based id of the phrase where the source ends; 0 when void.
    pub source: u32,
    /// Length of the copied part.
    pub copy_len: u32,
    pub symbol: u8,
}

/// Compact LZ-End parse: source ids, trailing symbols and the phrase-end bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LzEndParse {
    sources: IntVector,
    symbols: Vec<u8>,
    ends: SparseBitmap,
}

struct MinTree {
    size: usize,
    t: Vec<u32>,
}

impl MinTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two();
        Self {
            size,
            t: vec![u32::MAX; 2 * size],
        }
    }

    fn set(&mut self, i: usize, v: u32) {
        let mut p = i + self.size;
        self.t[p] = v;
        while p > 1 {
            p /= 2;
            self.t[p] = self.t[2 * p].min(self.t[2 * p + 1]);
        }
    }

    /// Minimum over `[lo, hi)`.
    fn min(&self, lo: usize, hi: usize) -> u32 {
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        let mut m = u32::MAX;
        while l < r {
            if l & 1 == 1 {
                m = m.min(self.t[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                m = m.min(self.t[r]);
            }
            l /= 2;
            r /= 2;
        }
        m
    }
}

struct Fenwick(Vec<u32>);

impl Fenwick {
    fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count in `[0, i)`.
    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i &= i - 1;
        }
        s
    }
}

/// FM-index over the reversed text with an implicit terminator in row 0's BWT slot.
struct ReverseFm {
    /// `C[c]`: first row of suffixes starting with `c`.
    c: [usize; 257],
    /// BWT rows holding each symbol, for rank by binary search.
    occ: Vec<Vec<u32>>,
    /// Row of the suffix of the reversed text starting at each position.
    row_of: Vec<u32>,
}

impl ReverseFm {
    fn new(text: &[u8]) -> Self {
        let n = text.len();
        let rev: Vec<u8> = text.iter().rev().copied().collect();
        let mut sa = vec![0i32; n];
        divsufsort::sort_in_place(&rev, &mut sa);
        let mut counts = [0usize; 256];
        for &b in &rev {
            counts[b as usize] += 1;
        }
        let mut c = [0usize; 257];
        c[0] = 1; // the terminator row
        for s in 0..256 {
            c[s + 1] = c[s] + counts[s];
        }
        let mut occ: Vec<Vec<u32>> = counts.iter().map(|&k| Vec::with_capacity(k)).collect();
        let mut row_of = vec![0u32; n];
        // row 0 is the terminator suffix, preceded by the last symbol
        occ[rev[n - 1] as usize].push(0);
        for (j, &s) in sa.iter().enumerate() {
            let row = j + 1;
            row_of[s as usize] = row as u32;
            if s > 0 {
                occ[rev[s as usize - 1] as usize].push(row as u32);
            }
        }
        Self { c, occ, row_of }
    }

    fn rank(&self, sym: u8, row: usize) -> usize {
        self.occ[sym as usize].partition_point(|&r| (r as usize) < row)
    }

    /// Prepends `sym` to the pattern whose rows are `[sp, ep)`.
    fn step(&self, sym: u8, sp: usize, ep: usize) -> (usize, usize) {
        let base = self.c[sym as usize];
        (base + self.rank(sym, sp), base + self.rank(sym, ep))
    }
}

/// Greedy LZ-End parse. Each phrase takes the longest copy whose source ends
/// at an earlier phrase end (smallest phrase id on ties), leaving at least
/// one symbol for the explicit trailing symbol.
pub fn parse_phrases(text: &[u8]) -> Vec<Phrase> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    let fm = ReverseFm::new(text);
    let rows = n + 1;
    let mut marks = MinTree::new(rows);
    let mut seen = Fenwick(vec![0; rows + 1]);
    // row of the reversed-text suffix whose occurrence ends at text position q
    let row_ending_at = |q: usize| fm.row_of[n - 1 - q] as usize;
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut sp, mut ep) = (0, rows);
        let (mut best_len, mut best_src) = (0, 0);
        let mut l = 0;
        while l + 1 < n - i {
            (sp, ep) = fm.step(text[i + l], sp, ep);
            // stop once the pattern no longer occurs ending before i
            if sp >= ep || seen.prefix(ep) == seen.prefix(sp) {
                break;
            }
            l += 1;
            let m = marks.min(sp, ep);
            if m != u32::MAX {
                best_len = l;
                best_src = m;
            }
        }
        let end = i + best_len;
        phrases.push(Phrase {
            source: best_src,
            copy_len: best_len as u32,
            symbol: text[end],
        });
        for q in i..=end {
            seen.add(row_ending_at(q));
        }
        marks.set(row_ending_at(end), phrases.len() as u32);
        i = end + 1;
    }
    phrases
}

/// Quadratic reference parser: tries every earlier phrase end.
pub fn parse_phrases_naive(text: &[u8]) -> Vec<Phrase> {
    let n = text.len();
    let mut phrases = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut best_len, mut best_src) = (0, 0);
        for (k, &q) in ends.iter().enumerate() {
            for l in (best_len + 1)..=(q + 1).min(n - i - 1) {
                if text[i..i + l] == text[q + 1 - l..=q] {
                    best_len = l;
                    best_src = k as u32 + 1;
                }
            }
        }
        let end = i + best_len;
        phrases.push(Phrase {
            source: best_src,
            copy_len: best_len as u32,
            symbol: text[end],
        });
        ends.push(end);
        i = end + 1;
    }
    phrases
}

/// Reconstructs the text from a phrase list, checking that every source
/// ends on a phrase boundary inside the already decoded prefix.
pub fn reconstruct(phrases: &[Phrase]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ends = Vec::with_capacity(phrases.len());
    for p in phrases {
        if p.source > 0 || p.copy_len > 0 {
            let q = *ends.get((p.source as usize).wrapping_sub(1)).ok_or(Error::Corrupt {
                codec: "lz-end",
                reason: format!("source {} is not an earlier phrase", p.source),
            })?;
            let l = p.copy_len as usize;
            if l > q + 1 {
                return Err(Error::Corrupt {
                    codec: "lz-end",
                    reason: "source starts before the text".into(),
                });
            }
            out.extend_from_within(q + 1 - l..=q);
        }
        out.push(p.symbol);
        ends.push(out.len() - 1);
    }
    Ok(out)
}

impl LzEndParse {
    pub fn new(text: &[u8], ds: usize) -> Result<Self> {
        Self::from_phrases(&parse_phrases(text), ds)
    }

    pub fn from_phrases(phrases: &[Phrase], ds: usize) -> Result<Self> {
        let mut ends = Vec::with_capacity(phrases.len());
        let mut pos = 0u64;
        for p in phrases {
            pos += p.copy_len as u64 + 1;
            ends.push(pos);
        }
        Ok(Self {
            sources: IntVector::from_values(&phrases.iter().map(|p| p.source as u64).collect::<Vec<_>>()),
            symbols: phrases.iter().map(|p| p.symbol).collect(),
            ends: SparseBitmap::from_positions(&ends, pos, ds.max(1))?,
        })
    }

    /// Text length.
    pub fn len(&self) -> u64 {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.len() == 0
    }

    pub fn phrase_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn phrases(&self) -> Result<Vec<Phrase>> {
        let ends = self.ends.positions()?;
        let mut prev = 0;
        Ok(ends
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let p = Phrase {
                    source: self.sources.get(k) as u32,
                    copy_len: (e - prev - 1) as u32,
                    symbol: self.symbols[k],
                };
                prev = e;
                p
            })
            .collect())
    }

    /// 1-based end position of phrase `k` (`k = 0` gives 0).
    fn end(&self, k: usize) -> u64 {
        if k == 0 {
            0
        } else {
            self.ends.select1(k).expect("phrase id in range")
        }
    }

    /// Appends, right to left, the `len` symbols ending at the end of phrase `k`.
    fn suffix_reversed(&self, k: usize, len: u64, out: &mut Vec<u8>) {
        let mut pending = vec![(k, len)];
        while let Some((mut k, mut l)) = pending.pop() {
            while l > 0 {
                out.push(self.symbols[k - 1]);
                l -= 1;
                if l == 0 {
                    break;
                }
                let copy = self.end(k) - self.end(k - 1) - 1;
                let m = l.min(copy);
                if m == 0 {
                    k -= 1;
                    continue;
                }
                if l > m {
                    pending.push((k - 1, l - m));
                }
                k = self.sources.get(k - 1) as usize;
                l = m;
            }
        }
    }

    /// Text positions `i..=j` (1-based). Extraction runs to the end of the
    /// phrase containing `j` and trims the excess.
    pub fn extract(&self, i: u64, j: u64) -> Result<Vec<u8>> {
        if i == 0 || i > j || j > self.len() {
            return Err(Error::OutOfRange {
                what: "lz-end extract",
                index: if i == 0 || i > j { i } else { j },
                valid: format!("1 <= i <= j <= {}", self.len()),
            });
        }
        let p = self.ends.rank1(j - 1)? + 1;
        let end = self.ends.select1(p)?;
        let mut out = Vec::with_capacity((end - i + 1) as usize);
        self.suffix_reversed(p, end - i + 1, &mut out);
        out.reverse();
        out.truncate((j - i + 1) as usize);
        Ok(out)
    }

    pub fn size_in_bytes(&self) -> usize {
        self.sources.size_in_bytes() + self.symbols.len() + self.ends.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.u64(self.symbols.len() as u64);
        self.sources.write_to(w);
        w.blob(&self.symbols);
        self.ends.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let z = r.u64()? as usize;
        let sources = IntVector::read_from(r)?;
        let symbols = r.blob()?.to_vec();
        let ends = SparseBitmap::read_from(r)?;
        if sources.len() != z || symbols.len() != z || ends.count_ones() != z {
            return Err(Error::Format("lz-end phrase arrays disagree on the phrase count".into()));
        }
        if sources.iter().enumerate().any(|(k, s)| s as usize > k) {
            return Err(Error::Format("lz-end source refers to a later phrase".into()));
        }
        Ok(Self { sources, symbols, ends })
    }
}

/// Vbyte encodings of all gap lists, concatenated and LZ-End parsed, with
/// each list's span in the uncompressed byte sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VbyteLzendStore {
    parse: Option<LzEndParse>,
    offsets: IntVector,
}

impl VbyteLzendStore {
    pub fn build(gap_lists: &[Vec<u32>], ds: usize) -> Result<Self> {
        let mut bytes = Vec::new();
        let mut offsets = Vec::with_capacity(gap_lists.len() + 1);
        offsets.push(0);
        for l in gap_lists {
            vbyte::encode_into(l, &mut bytes);
            offsets.push(bytes.len() as u64);
        }
        let parse = if bytes.is_empty() {
            None
        } else {
            Some(LzEndParse::new(&bytes, ds)?)
        };
        Ok(Self {
            parse,
            offsets: IntVector::from_values(&offsets),
        })
    }

    pub fn with_default_sampling(gap_lists: &[Vec<u32>]) -> Result<Self> {
        Self::build(gap_lists, DEFAULT_SPARSE_SAMPLING)
    }

    pub fn parse(&self) -> Option<&LzEndParse> {
        self.parse.as_ref()
    }

    pub fn list_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Gap list `w` (0-based list index) holding `count` gaps.
    pub fn fetch_list(&self, w: usize, count: usize) -> Result<Vec<u32>> {
        if w + 1 >= self.offsets.len() {
            return Ok(Vec::new());
        }
        let (a, b) = (self.offsets.get(w), self.offsets.get(w + 1));
        if a == b {
            return Ok(Vec::new());
        }
        let parse = self.parse.as_ref().ok_or(Error::Format("lz-end store has no text".into()))?;
        vbyte::decode(&parse.extract(a + 1, b)?, count)
    }

    pub fn size_in_bytes(&self) -> usize {
        self.parse.as_ref().map_or(0, LzEndParse::size_in_bytes) + self.offsets.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.u8(self.parse.is_some() as u8);
        if let Some(p) = &self.parse {
            p.write_to(w);
        }
        self.offsets.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let parse = if r.u8()? != 0 { Some(LzEndParse::read_from(r)?) } else { None };
        let offsets = IntVector::read_from(r)?;
        let text_len = parse.as_ref().map_or(0, LzEndParse::len);
        if offsets.is_empty() || offsets.get(offsets.len() - 1) != text_len {
            return Err(Error::Format("lz-end list offsets do not cover the text".into()));
        }
        Ok(Self { parse, offsets })
    }
}
