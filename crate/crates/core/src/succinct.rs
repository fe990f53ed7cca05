//! Plain bitvectors with rank/select, packed fixed-width integer arrays and
//! gap-encoded sparse bitmaps.
//!
//! All positions are 1-based: `rank1(i)` counts the ones in `[1, i]` and
//! `select1(j)` returns the position of the `j`-th one, so
//! `rank1(select1(j)) == j`.

use crate::codecs::vbyte;
use crate::error::{Error, Result};
use crate::io::{ByteReader, ByteWriter};

const WORD: usize = 64;
const WORDS_PER_SUPER: usize = 8; // 512-bit superblocks

/// Bitvector with a two-level rank directory (512-bit superblocks holding
/// absolute counts, 64-bit blocks holding counts relative to the superblock).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
    supers: Vec<u64>,
    blocks: Vec<u16>,
    ones: usize,
}

#[derive(Default)]
pub struct BitVectorBuilder {
    len: usize,
    words: Vec<u64>,
}

impl BitVectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    /// Sets the bit at 1-based `pos`, which must be within the preallocated length.
    pub fn set(&mut self, pos: usize) {
        debug_assert!(pos >= 1 && pos <= self.len);
        let i = pos - 1;
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitVector {
        BitVector::from_words(self.words, self.len)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut b = BitVectorBuilder::new();
        for bit in iter {
            b.push(bit);
        }
        b.build()
    }
}

impl BitVector {
    /// Parses a string of `0`/`1` characters; anything else (spaces) is ignored.
    pub fn from_bit_str(s: &str) -> Self {
        s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect()
    }

    fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.truncate(len.div_ceil(WORD));
        if !len.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % WORD)) - 1;
            }
        }
        let mut supers = Vec::with_capacity(words.len() / WORDS_PER_SUPER + 1);
        let mut blocks = Vec::with_capacity(words.len());
        let mut total = 0u64;
        let mut in_super = 0u16;
        for (i, w) in words.iter().enumerate() {
            if i % WORDS_PER_SUPER == 0 {
                supers.push(total);
                in_super = 0;
            }
            blocks.push(in_super);
            let c = w.count_ones();
            total += c as u64;
            in_super += c as u16;
        }
        Self {
            len,
            words,
            supers,
            blocks,
            ones: total as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    /// Bit at 1-based position `pos`.
    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        debug_assert!(pos >= 1 && pos <= self.len, "bit {pos} of {}", self.len);
        let i = pos - 1;
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    /// Number of ones in `[1, i]`. Caller guarantees `i <= len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        if i == self.len {
            return self.ones;
        }
        let w = i / WORD;
        let b = i % WORD;
        let base = self.supers[w / WORDS_PER_SUPER] as usize + self.blocks[w] as usize;
        if b == 0 {
            base
        } else {
            base + (self.words[w] & ((1u64 << b) - 1)).count_ones() as usize
        }
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// Checked rank of bit `b` over `[1, i]`.
    pub fn rank(&self, bit: bool, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::OutOfRange {
                what: "rank",
                index: i as u64,
                valid: format!("0..={}", self.len),
            });
        }
        Ok(if bit { self.rank1(i) } else { self.rank0(i) })
    }

    /// Checked select: position of the `j`-th bit equal to `bit`.
    pub fn select(&self, bit: bool, j: usize) -> Result<usize> {
        let total = if bit { self.ones } else { self.count_zeros() };
        if j == 0 || j > total {
            return Err(Error::OutOfRange {
                what: "select",
                index: j as u64,
                valid: format!("1..={total}"),
            });
        }
        Ok(if bit { self.select1(j) } else { self.select0(j) })
    }

    /// Position of the `j`-th one, `1 <= j <= count_ones()`.
    pub fn select1(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.ones);
        self.select_impl(j, |s| self.supers[s] as usize, |w| self.blocks[w] as usize, |w| self.words[w])
    }

    /// Position of the `j`-th zero, `1 <= j <= count_zeros()`.
    pub fn select0(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.count_zeros());
        self.select_impl(
            j,
            |s| s * WORD * WORDS_PER_SUPER - self.supers[s] as usize,
            |w| (w % WORDS_PER_SUPER) * WORD - self.blocks[w] as usize,
            |w| !self.words[w],
        )
    }

    fn select_impl(
        &self,
        j: usize,
        before_super: impl Fn(usize) -> usize,
        before_block: impl Fn(usize) -> usize,
        word: impl Fn(usize) -> u64,
    ) -> usize {
        // last superblock with fewer than j matching bits before it
        let (mut lo, mut hi) = (0usize, self.supers.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if before_super(mid) < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sb = lo;
        let first = sb * WORDS_PER_SUPER;
        let last = (first + WORDS_PER_SUPER).min(self.words.len());
        let mut w = first;
        while w + 1 < last && before_super(sb) + before_block(w + 1) < j {
            w += 1;
        }
        let rem = j - before_super(sb) - before_block(w);
        w * WORD + select_in_word(word(w), rem) + 1
    }

    /// The word, superblock and block counts all follow from `len`, so only
    /// `len` is written ahead of them; the image is exactly `size_in_bytes`.
    pub fn write_to(&self, w: &mut ByteWriter) {
        w.u64(self.len as u64);
        for &x in self.words.iter().chain(&self.supers) {
            w.u64(x);
        }
        for &b in &self.blocks {
            w.u16(b);
        }
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.u64()? as usize;
        let nw = len.div_ceil(WORD);
        let ns = nw.div_ceil(WORDS_PER_SUPER);
        if nw.saturating_mul(10).saturating_add(ns.saturating_mul(8)) > r.remaining() {
            return Err(Error::Format(format!("bitvector of {len} bits exceeds section")));
        }
        let words = (0..nw).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let supers = (0..ns).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let blocks = (0..nw).map(|_| r.u16()).collect::<Result<Vec<_>>>()?;
        let bv = Self::from_words(words, len);
        if bv.supers != supers || bv.blocks != blocks {
            return Err(Error::Format("bitvector rank directory mismatch".into()));
        }
        Ok(bv)
    }

    pub fn size_in_bytes(&self) -> usize {
        8 + 8 * (self.words.len() + self.supers.len()) + 2 * self.blocks.len()
    }

    /// 1-based positions of all ones.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz + 1)
                }
            })
        })
    }
}

/// 0-based offset of the `r`-th (1-based) set bit of `w`.
#[inline]
fn select_in_word(mut w: u64, r: usize) -> usize {
    debug_assert!(r >= 1 && r <= w.count_ones() as usize);
    for _ in 1..r {
        w &= w - 1;
    }
    w.trailing_zeros() as usize
}

/// Number of bits needed to write `max` in binary (0 for 0).
#[inline]
pub fn bits_for(max: u64) -> u8 {
    (64 - max.leading_zeros()) as u8
}

/// Packed array of fixed-width unsigned integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntVector {
    len: usize,
    width: u8,
    words: Vec<u64>,
}

impl IntVector {
    pub fn with_width(width: u8, len: usize) -> Self {
        assert!(width <= 64);
        let bits = len * width as usize;
        Self {
            len: 0,
            width,
            words: Vec::with_capacity(bits.div_ceil(WORD)),
        }
    }

    /// Packs `values` using the minimum width able to hold the largest one.
    pub fn from_values(values: &[u64]) -> Self {
        let width = bits_for(values.iter().copied().max().unwrap_or(0));
        let mut v = Self::with_width(width, values.len());
        for &x in values {
            v.push(x);
        }
        v
    }

    pub fn from_u32s(values: &[u32]) -> Self {
        let width = bits_for(values.iter().copied().max().unwrap_or(0) as u64);
        let mut v = Self::with_width(width, values.len());
        for &x in values {
            v.push(x as u64);
        }
        v
    }

    pub fn push(&mut self, value: u64) {
        let w = self.width as usize;
        debug_assert!(w == 64 || value >> w == 0, "{value} does not fit {w} bits");
        if w == 0 {
            self.len += 1;
            return;
        }
        let bit = self.len * w;
        let (wi, off) = (bit / WORD, bit % WORD);
        if wi >= self.words.len() {
            self.words.push(0);
        }
        self.words[wi] |= value << off;
        if off + w > WORD {
            self.words.push(value >> (WORD - off));
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len, "index {i} of {}", self.len);
        let w = self.width as usize;
        if w == 0 {
            return 0;
        }
        let bit = i * w;
        let (wi, off) = (bit / WORD, bit % WORD);
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        let lo = self.words[wi] >> off;
        if off + w > WORD {
            (lo | (self.words[wi + 1] << (WORD - off))) & mask
        } else {
            lo & mask
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn size_in_bytes(&self) -> usize {
        8 * self.words.len()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.u64(self.len as u64);
        w.u8(self.width);
        w.u64_slice(&self.words);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.u64()? as usize;
        let width = r.u8()?;
        if width > 64 {
            return Err(Error::Format(format!("int vector width {width}")));
        }
        let words = r.u64_vec()?;
        if words.len() != (len * width as usize).div_ceil(WORD) {
            return Err(Error::Format("int vector length mismatch".into()));
        }
        Ok(Self { len, width, words })
    }
}

pub const DEFAULT_SPARSE_SAMPLING: usize = 32;

/// Sparse bitmap stored as Vbyte-coded distances between consecutive ones,
/// plus the absolute position (and code offset) of every `period`-th one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBitmap {
    len: u64,
    ones: usize,
    period: usize,
    gaps: Vec<u8>,
    sample_pos: IntVector,
    sample_off: IntVector,
}

impl SparseBitmap {
    /// Builds from strictly increasing 1-based positions not exceeding `len`.
    pub fn from_positions(positions: &[u64], len: u64, period: usize) -> Result<Self> {
        assert!(period >= 1, "sampling period must be positive");
        let mut gaps = Vec::new();
        let mut sample_pos = Vec::new();
        let mut sample_off = Vec::new();
        let mut prev = 0u64;
        for (k, &p) in positions.iter().enumerate() {
            if p <= prev || p > len {
                return Err(Error::OutOfRange {
                    what: "sparse bitmap position",
                    index: p,
                    valid: format!("strictly increasing in 1..={len}"),
                });
            }
            if k % period == 0 {
                sample_pos.push(p);
                sample_off.push(gaps.len() as u64);
            }
            vbyte::write_u64(&mut gaps, p - prev);
            prev = p;
        }
        Ok(Self {
            len,
            ones: positions.len(),
            period,
            gaps,
            sample_pos: IntVector::from_values(&sample_pos),
            sample_off: IntVector::from_values(&sample_off),
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Position of the `j`-th one (1-based `j`).
    pub fn select1(&self, j: usize) -> Result<u64> {
        if j == 0 || j > self.ones {
            return Err(Error::OutOfRange {
                what: "sparse select",
                index: j as u64,
                valid: format!("1..={}", self.ones),
            });
        }
        let idx = j - 1;
        let s = idx / self.period;
        let mut pos = self.sample_pos.get(s);
        let mut off = self.sample_off.get(s) as usize;
        vbyte::read_u64(&self.gaps, &mut off)?; // the sampled one itself
        for _ in 0..idx % self.period {
            pos += vbyte::read_u64(&self.gaps, &mut off)?;
        }
        Ok(pos)
    }

    /// Number of ones in `[1, i]`.
    pub fn rank1(&self, i: u64) -> Result<usize> {
        if i > self.len {
            return Err(Error::OutOfRange {
                what: "sparse rank",
                index: i,
                valid: format!("0..={}", self.len),
            });
        }
        // last sample at or before i
        let (mut lo, mut hi) = (0usize, self.sample_pos.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.sample_pos.get(mid) <= i {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            return Ok(0);
        }
        let s = lo - 1;
        let mut count = s * self.period + 1;
        let mut pos = self.sample_pos.get(s);
        let mut off = self.sample_off.get(s) as usize;
        vbyte::read_u64(&self.gaps, &mut off)?;
        while count < self.ones && count < (s + 1) * self.period {
            let next = pos + vbyte::read_u64(&self.gaps, &mut off)?;
            if next > i {
                break;
            }
            pos = next;
            count += 1;
        }
        Ok(count)
    }

    /// All one-positions in increasing order.
    pub fn positions(&self) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(self.ones);
        let mut off = 0usize;
        let mut pos = 0u64;
        for _ in 0..self.ones {
            pos += vbyte::read_u64(&self.gaps, &mut off)?;
            out.push(pos);
        }
        Ok(out)
    }

    pub fn size_in_bytes(&self) -> usize {
        self.gaps.len() + self.sample_pos.size_in_bytes() + self.sample_off.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.u64(self.len);
        w.u64(self.ones as u64);
        w.u64(self.period as u64);
        w.blob(&self.gaps);
        self.sample_pos.write_to(w);
        self.sample_off.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.u64()?;
        let ones = r.u64()? as usize;
        let period = r.u64()? as usize;
        if period == 0 {
            return Err(Error::Format("sparse bitmap sampling period 0".into()));
        }
        let gaps = r.blob()?.to_vec();
        let sample_pos = IntVector::read_from(r)?;
        let sample_off = IntVector::read_from(r)?;
        if sample_pos.len() != ones.div_ceil(period) || sample_off.len() != sample_pos.len() {
            return Err(Error::Format("sparse bitmap sample count mismatch".into()));
        }
        Ok(Self {
            len,
            ones,
            period,
            gaps,
            sample_pos,
            sample_off,
        })
    }
}
