//! Payload layouts for every representation.

use super::sampling::{cm_step, st_samples, st_step, SampleTable};
use super::Representation;
use crate::codecs::bits::{BitReader, BitWriter};
use crate::codecs::{from_gaps, rice, simple9, to_gaps, vbyte, Codec};
use crate::error::{Error, Result};
use crate::grammar::{repair_compress, CompressedLists, Grammar, Symbol};
use crate::io::{ByteReader, ByteWriter};
use crate::lzend::VbyteLzendStore;
use crate::succinct::{BitVector, BitVectorBuilder, IntVector};

/// All lists under one codec, back to back. Offsets are bit positions for
/// the Rice codecs and byte positions otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CodecStore {
    pub codec: Codec,
    pub data: Vec<u8>,
    pub offsets: IntVector,
    /// Rice parameter per list (Rice codecs only).
    pub params: IntVector,
}

impl CodecStore {
    pub fn build(codec: Codec, gap_lists: &[Vec<u32>], rice_b: Option<u8>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(gap_lists.len() + 1);
        let mut params = Vec::new();
        offsets.push(0u64);
        let data = match codec {
            Codec::Vbyte => {
                let mut d = Vec::new();
                for l in gap_lists {
                    vbyte::encode_into(l, &mut d);
                    offsets.push(d.len() as u64);
                }
                d
            }
            Codec::Simple9 => {
                let mut words = Vec::new();
                for l in gap_lists {
                    simple9::encode_into(l, &mut words)?;
                    offsets.push(words.len() as u64 * 4);
                }
                let mut d = Vec::with_capacity(words.len() * 4);
                simple9::words_to_bytes(&words, &mut d);
                d
            }
            Codec::Rice | Codec::RiceRuns => {
                let mut w = BitWriter::new();
                for l in gap_lists {
                    let b = if codec == Codec::Rice {
                        let b = rice_b.unwrap_or_else(|| rice::parameter_for(l.iter().copied()));
                        rice::encode_into(l, b, &mut w)?;
                        b
                    } else {
                        let b = rice_b.unwrap_or_else(|| rice::runs_parameter_for(l));
                        rice::runs_encode_into(l, b, &mut w)?;
                        b
                    };
                    params.push(b as u64);
                    offsets.push(w.len());
                }
                w.into_stream().bytes
            }
        };
        Ok(Self {
            codec,
            data,
            offsets: IntVector::from_values(&offsets),
            params: IntVector::from_values(&params),
        })
    }

    #[inline]
    pub fn span(&self, w: usize) -> (u64, u64) {
        (self.offsets.get(w), self.offsets.get(w + 1))
    }

    pub fn decode_gaps(&self, w: usize, count: usize) -> Result<Vec<u32>> {
        let (a, b) = self.span(w);
        match self.codec {
            Codec::Vbyte => vbyte::decode(&self.data[a as usize..b as usize], count),
            Codec::Simple9 => simple9::decode(&simple9::bytes_to_words(&self.data[a as usize..b as usize]), count),
            Codec::Rice => rice::decode_from(&mut BitReader::new(&self.data, a, b), count, self.params.get(w) as u8),
            Codec::RiceRuns => rice::runs_decode_from(&mut BitReader::new(&self.data, a, b), count, self.params.get(w) as u8),
        }
    }

    pub fn size_in_bytes(&self) -> usize {
        self.data.len() + self.offsets.size_in_bytes() + self.params.size_in_bytes()
    }

    fn write_to(&self, w: &mut ByteWriter) {
        w.u8(self.codec.tag());
        w.blob(&self.data);
        self.offsets.write_to(w);
        self.params.write_to(w);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let codec = Codec::from_tag(r.u8()?)?;
        let data = r.blob()?.to_vec();
        let offsets = IntVector::read_from(r)?;
        let params = IntVector::read_from(r)?;
        let bits = matches!(codec, Codec::Rice | Codec::RiceRuns);
        let limit = if bits { data.len() as u64 * 8 } else { data.len() as u64 };
        let monotone = (1..offsets.len()).all(|i| offsets.get(i - 1) <= offsets.get(i));
        if offsets.is_empty() || !monotone || offsets.get(offsets.len() - 1) > limit {
            return Err(Error::Format("codec list offsets out of range".into()));
        }
        if bits && params.len() + 1 != offsets.len() {
            return Err(Error::Format("missing rice parameters".into()));
        }
        Ok(Self {
            codec,
            data,
            offsets,
            params,
        })
    }
}

/// Vbyte lists, except that lists with more than `u/8` postings are bitmaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct HybridStore {
    pub is_bitmap: BitVector,
    pub vbyte: CodecStore,
    pub bitmaps: Vec<BitVector>,
}

/// The bitmap choice: a list of `len` postings over `[1, u]` becomes a bitmap iff `len > u/8`.
pub fn use_bitmap(len: usize, universe: u32) -> bool {
    len as u64 * 8 > universe as u64
}

impl HybridStore {
    fn build(lists: &[Vec<u32>], universe: u32) -> Result<Self> {
        let mut flags = BitVectorBuilder::new();
        let mut gap_lists = Vec::with_capacity(lists.len());
        let mut bitmaps = Vec::new();
        for l in lists {
            let bitmap = use_bitmap(l.len(), universe);
            flags.push(bitmap);
            if bitmap {
                let mut b = BitVectorBuilder::with_len(universe as usize);
                for &p in l {
                    b.set(p as usize);
                }
                bitmaps.push(b.build());
                gap_lists.push(Vec::new());
            } else {
                gap_lists.push(to_gaps(l));
            }
        }
        Ok(Self {
            is_bitmap: flags.build(),
            vbyte: CodecStore::build(Codec::Vbyte, &gap_lists, None)?,
            bitmaps,
        })
    }

    pub fn bitmap(&self, w: usize) -> Option<&BitVector> {
        if self.is_bitmap.get(w + 1) {
            Some(&self.bitmaps[self.is_bitmap.rank1(w + 1) - 1])
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RepairSamples {
    None,
    Cm(SampleTable),
    St(SampleTable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RepairStore {
    pub lists: CompressedLists,
    pub grammar: Grammar,
    pub samples: RepairSamples,
}

impl RepairStore {
    /// Sum contributed by each entry of list `w`'s span of `C`.
    pub fn entry_sums(&self, w: usize) -> Vec<u64> {
        self.lists
            .span(w)
            .map(|i| match self.grammar.decode(self.lists.raw(i)) {
                Symbol::Terminal(t) => t as u64,
                Symbol::NonTerminal(p) => self.grammar.sum_at(p),
            })
            .collect()
    }

    pub fn expand_gaps(&self, w: usize) -> Vec<u32> {
        let mut out = Vec::new();
        self.lists.expand_list(&self.grammar, w, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Store {
    Codec(CodecStore),
    VbyteCm(CodecStore, SampleTable),
    VbyteSt(CodecStore, SampleTable),
    Hybrid(HybridStore),
    Repair(RepairStore),
    Lzend(VbyteLzendStore),
}

/// Byte offset of every entry boundary of a Vbyte list (relative to its start).
fn vbyte_offsets(gaps: &[u32]) -> Vec<u64> {
    let mut offs = Vec::with_capacity(gaps.len() + 1);
    let mut buf = Vec::with_capacity(5);
    let mut at = 0u64;
    offs.push(0);
    for &g in gaps {
        buf.clear();
        vbyte::write_u64(&mut buf, g as u64);
        at += buf.len() as u64;
        offs.push(at);
    }
    offs
}

fn cm_samples_vbyte(gap_lists: &[Vec<u32>], k: u32) -> SampleTable {
    let per_list: Vec<Vec<(u64, u64)>> = gap_lists
        .iter()
        .map(|gaps| {
            let step = cm_step(k, gaps.len());
            if step == 0 || gaps.len() < 2 * step {
                return Vec::new();
            }
            let offs = vbyte_offsets(gaps);
            let abs = from_gaps(gaps);
            (1..)
                .map(|j| j * step)
                .take_while(|&e| e < gaps.len())
                .map(|e| (abs[e - 1] as u64, offs[e]))
                .collect()
        })
        .collect();
    SampleTable::from_lists(&per_list, true)
}

fn st_samples_vbyte(gap_lists: &[Vec<u32>], universe: u32, b: u32) -> SampleTable {
    let per_list: Vec<Vec<(u64, u64)>> = gap_lists
        .iter()
        .map(|gaps| {
            if gaps.is_empty() {
                return Vec::new();
            }
            let offs = vbyte_offsets(gaps);
            let sums: Vec<u64> = gaps.iter().map(|&g| g as u64).collect();
            st_samples(&sums, st_step(universe, b, gaps.len()))
                .into_iter()
                .map(|(v, e)| (v, offs[e - 1]))
                .collect()
        })
        .collect();
    SampleTable::from_lists(&per_list, true)
}

impl Store {
    pub fn build(repr: Representation, lists: &[Vec<u32>], universe: u32, params: &super::Params) -> Result<Self> {
        let gap_lists = || lists.iter().map(|l| to_gaps(l)).collect::<Vec<_>>();
        Ok(match repr {
            Representation::Vbyte => Store::Codec(CodecStore::build(Codec::Vbyte, &gap_lists(), None)?),
            Representation::Rice => Store::Codec(CodecStore::build(Codec::Rice, &gap_lists(), params.rice_b)?),
            Representation::RiceRuns => Store::Codec(CodecStore::build(Codec::RiceRuns, &gap_lists(), params.rice_b)?),
            Representation::Simple9 => Store::Codec(CodecStore::build(Codec::Simple9, &gap_lists(), None)?),
            Representation::VbyteCm => {
                let g = gap_lists();
                Store::VbyteCm(CodecStore::build(Codec::Vbyte, &g, None)?, cm_samples_vbyte(&g, params.k))
            }
            Representation::VbyteSt => {
                let g = gap_lists();
                Store::VbyteSt(
                    CodecStore::build(Codec::Vbyte, &g, None)?,
                    st_samples_vbyte(&g, universe, params.st_b),
                )
            }
            Representation::Hybrid => Store::Hybrid(HybridStore::build(lists, universe)?),
            Representation::Repair | Representation::RepairSkip | Representation::RepairSkipCm | Representation::RepairSkipSt => {
                let skipping = repr != Representation::Repair;
                let (clists, grammar) = repair_compress(&gap_lists(), skipping);
                let mut store = RepairStore {
                    lists: clists,
                    grammar,
                    samples: RepairSamples::None,
                };
                store.samples = match repr {
                    Representation::RepairSkipCm => RepairSamples::Cm(repair_cm_samples(&store, params.k)),
                    Representation::RepairSkipSt => RepairSamples::St(repair_st_samples(&store, lists, universe, params.st_b)),
                    _ => RepairSamples::None,
                };
                Store::Repair(store)
            }
            Representation::VbyteLzend => Store::Lzend(VbyteLzendStore::build(&gap_lists(), params.ds.max(1) as usize)?),
        })
    }

    /// Gap list `w` (0-based) of `count` postings.
    pub fn decode_gaps(&self, w: usize, count: usize) -> Result<Vec<u32>> {
        match self {
            Store::Codec(s) | Store::VbyteCm(s, _) | Store::VbyteSt(s, _) => s.decode_gaps(w, count),
            Store::Hybrid(h) => match h.bitmap(w) {
                Some(b) => Ok(to_gaps(&b.ones().map(|p| p as u32).collect::<Vec<_>>())),
                None => h.vbyte.decode_gaps(w, count),
            },
            Store::Repair(r) => Ok(r.expand_gaps(w)),
            Store::Lzend(l) => l.fetch_list(w, count),
        }
    }

    /// Absolute postings of list `w`.
    pub fn decode(&self, w: usize, count: usize) -> Result<Vec<u32>> {
        if let Store::Hybrid(h) = self {
            if let Some(b) = h.bitmap(w) {
                return Ok(b.ones().map(|p| p as u32).collect());
            }
        }
        Ok(from_gaps(&self.decode_gaps(w, count)?))
    }

    /// Bytes of the list payload (everything except samples).
    pub fn payload_bytes(&self) -> usize {
        match self {
            Store::Codec(s) | Store::VbyteCm(s, _) | Store::VbyteSt(s, _) => s.size_in_bytes(),
            Store::Hybrid(h) => {
                h.is_bitmap.size_in_bytes() + h.vbyte.size_in_bytes() + h.bitmaps.iter().map(BitVector::size_in_bytes).sum::<usize>()
            }
            Store::Repair(r) => r.lists.size_in_bytes(),
            Store::Lzend(l) => l.size_in_bytes(),
        }
    }

    pub fn grammar_bytes(&self) -> usize {
        match self {
            Store::Repair(r) => r.grammar.size_in_bytes(),
            _ => 0,
        }
    }

    pub fn sample_bytes(&self) -> usize {
        match self {
            Store::VbyteCm(_, s) | Store::VbyteSt(_, s) => s.size_in_bytes(),
            Store::Repair(RepairStore {
                samples: RepairSamples::Cm(s) | RepairSamples::St(s),
                ..
            }) => s.size_in_bytes(),
            _ => 0,
        }
    }

    pub fn write_payload(&self, w: &mut ByteWriter) {
        match self {
            Store::Codec(s) | Store::VbyteCm(s, _) | Store::VbyteSt(s, _) => s.write_to(w),
            Store::Hybrid(h) => {
                h.is_bitmap.write_to(w);
                h.vbyte.write_to(w);
                w.u64(h.bitmaps.len() as u64);
                for b in &h.bitmaps {
                    b.write_to(w);
                }
            }
            Store::Repair(r) => {
                r.grammar.write_to(w);
                r.lists.write_to(w);
            }
            Store::Lzend(l) => l.write_to(w),
        }
    }

    pub fn write_samples(&self, w: &mut ByteWriter) {
        match self {
            Store::VbyteCm(_, s) | Store::VbyteSt(_, s) => s.write_to(w),
            Store::Repair(RepairStore {
                samples: RepairSamples::Cm(s) | RepairSamples::St(s),
                ..
            }) => s.write_to(w),
            _ => {}
        }
    }

    pub fn read(repr: Representation, payload: &mut ByteReader<'_>, samples: &mut ByteReader<'_>) -> Result<Self> {
        Ok(match repr {
            Representation::Vbyte | Representation::Rice | Representation::RiceRuns | Representation::Simple9 => {
                Store::Codec(CodecStore::read_from(payload)?)
            }
            Representation::VbyteCm => Store::VbyteCm(CodecStore::read_from(payload)?, SampleTable::read_from(samples)?),
            Representation::VbyteSt => Store::VbyteSt(CodecStore::read_from(payload)?, SampleTable::read_from(samples)?),
            Representation::Hybrid => {
                let is_bitmap = BitVector::read_from(payload)?;
                let vbyte = CodecStore::read_from(payload)?;
                let n = payload.u64()? as usize;
                if n != is_bitmap.count_ones() {
                    return Err(Error::Format("hybrid bitmap count mismatch".into()));
                }
                let bitmaps = (0..n).map(|_| BitVector::read_from(payload)).collect::<Result<_>>()?;
                Store::Hybrid(HybridStore { is_bitmap, vbyte, bitmaps })
            }
            Representation::Repair | Representation::RepairSkip | Representation::RepairSkipCm | Representation::RepairSkipSt => {
                let grammar = Grammar::read_from(payload)?;
                let lists = CompressedLists::read_from(payload)?;
                if grammar.is_skipping() != (repr != Representation::Repair) {
                    return Err(Error::Format("grammar variant does not match the representation".into()));
                }
                let samples = match repr {
                    Representation::RepairSkipCm => RepairSamples::Cm(SampleTable::read_from(samples)?),
                    Representation::RepairSkipSt => RepairSamples::St(SampleTable::read_from(samples)?),
                    _ => RepairSamples::None,
                };
                Store::Repair(RepairStore { lists, grammar, samples })
            }
            Representation::VbyteLzend => Store::Lzend(VbyteLzendStore::read_from(payload)?),
        })
    }
}

/// CM samples over `C`: every `k * ceil(log2 n')` entries of a span of `n'`
/// entries, the absolute value preceding the sampled entry.
fn repair_cm_samples(store: &RepairStore, k: u32) -> SampleTable {
    let per_list: Vec<Vec<(u64, u64)>> = (0..store.lists.len())
        .map(|w| {
            let sums = store.entry_sums(w);
            let step = cm_step(k, sums.len());
            if step == 0 || sums.len() < 2 * step {
                return Vec::new();
            }
            let mut acc = 0;
            let mut out = Vec::new();
            for (e, s) in sums.iter().enumerate() {
                if e > 0 && e % step == 0 {
                    out.push((acc, e as u64));
                }
                acc += s;
            }
            out
        })
        .collect();
    SampleTable::from_lists(&per_list, false)
}

fn repair_st_samples(store: &RepairStore, lists: &[Vec<u32>], universe: u32, b: u32) -> SampleTable {
    let per_list: Vec<Vec<(u64, u64)>> = (0..store.lists.len())
        .map(|w| {
            let len = lists[w].len();
            if len == 0 {
                return Vec::new();
            }
            st_samples(&store.entry_sums(w), st_step(universe, b, len))
                .into_iter()
                .map(|(v, e)| (v, e as u64))
                .collect()
        })
        .collect();
    SampleTable::from_lists(&per_list, true)
}
