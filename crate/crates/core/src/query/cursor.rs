//! Search cursors over stored lists: sampled Vbyte lists, bitmaps and
//! Re-Pair lists with phrase sums.

use std::ops::Range;

use super::intersect::{Probe, SortedAccess};
use super::WorkCounters;
use crate::codecs::vbyte;
use crate::grammar::{CompressedLists, Grammar, Symbol};
use crate::postings::store::{RepairSamples, RepairStore};
use crate::postings::{cm_step, st_step, SampleTable};
use crate::succinct::BitVector;

/// Largest sample index in `[from, to)` with value `< x`, galloping from `from`.
fn gallop_samples(t: &SampleTable, from: usize, to: usize, x: u64, wc: &mut WorkCounters) -> Option<usize> {
    if from >= to {
        return None;
    }
    wc.comparisons += 1;
    if t.value(from) >= x {
        return None;
    }
    let mut step = 1;
    while from + step < to {
        wc.comparisons += 1;
        if t.value(from + step) >= x {
            break;
        }
        step *= 2;
    }
    // t[from + step/2] < x; t[from + step] >= x or past the end
    let (mut lo, mut hi) = (from + step / 2, (from + step).min(to));
    while hi - lo > 1 {
        wc.comparisons += 1;
        let mid = (lo + hi) / 2;
        if t.value(mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn read_gap(bytes: &[u8], pos: &mut usize) -> u64 {
    vbyte::read_u64(bytes, pos).expect("stored vbyte list is well formed")
}

/// Vbyte list with CM samples: sample `j` of the list holds the value before
/// posting `(j + 1) * step` and that posting's byte offset.
pub struct VbyteCmList<'a> {
    bytes: &'a [u8],
    samples: &'a SampleTable,
    range: Range<usize>,
    step: usize,
    len: usize,
}

impl<'a> VbyteCmList<'a> {
    pub fn new(bytes: &'a [u8], samples: &'a SampleTable, w: usize, k: u32, len: usize) -> Self {
        Self {
            bytes,
            samples,
            range: samples.range(w),
            step: cm_step(k, len),
            len,
        }
    }

    /// Decoding state `(postings before, byte offset, value before)` of sample `s`.
    fn state(&self, s: usize) -> (usize, usize, u64) {
        (
            (s - self.range.start + 1) * self.step,
            self.samples.pos(s) as usize,
            self.samples.value(s),
        )
    }

    pub fn probe(&self) -> VbyteCmProbe<'_, 'a> {
        VbyteCmProbe {
            list: self,
            done: 0,
            byte: 0,
            acc: 0,
            last: None,
        }
    }
}

impl SortedAccess for VbyteCmList<'_> {
    fn len(&self) -> usize {
        self.len
    }

    fn lower_bound(&self, x: u64, lo: usize, hi: usize, wc: &mut WorkCounters) -> usize {
        // first sample not below x
        let (mut a, mut b) = (self.range.start, self.range.end);
        while a < b {
            wc.comparisons += 1;
            let mid = (a + b) / 2;
            if self.samples.value(mid) < x {
                a = mid + 1;
            } else {
                b = mid;
            }
        }
        let (mut done, mut byte, mut acc) = if a == self.range.start { (0, 0, 0) } else { self.state(a - 1) };
        while done < self.len {
            acc += read_gap(self.bytes, &mut byte);
            wc.comparisons += 1;
            if acc >= x {
                break;
            }
            done += 1;
        }
        done.clamp(lo, hi)
    }

    fn get(&self, i: usize, _: &mut WorkCounters) -> u64 {
        let j = i.checked_div(self.step).map_or(0, |j| j.min(self.range.len()));
        let (mut done, mut byte, mut acc) = if j == 0 { (0, 0, 0) } else { self.state(self.range.start + j - 1) };
        loop {
            acc += read_gap(self.bytes, &mut byte);
            if done == i {
                return acc;
            }
            done += 1;
        }
    }
}

pub struct VbyteCmProbe<'l, 'a> {
    list: &'l VbyteCmList<'a>,
    done: usize,
    byte: usize,
    acc: u64,
    last: Option<u64>,
}

impl Probe for VbyteCmProbe<'_, '_> {
    fn len(&self) -> usize {
        self.list.len
    }

    fn next_geq(&mut self, x: u64, wc: &mut WorkCounters) -> Option<u64> {
        if let Some(v) = self.last {
            if v >= x {
                return Some(v);
            }
        }
        let l = self.list;
        if l.step > 0 {
            // only samples at or past the current posting help
            let from = l.range.start + self.done.div_ceil(l.step).saturating_sub(1);
            if let Some(s) = gallop_samples(l.samples, from, l.range.end, x, wc) {
                let (done, byte, acc) = l.state(s);
                if done >= self.done {
                    (self.done, self.byte, self.acc) = (done, byte, acc);
                }
            }
        }
        while self.done < l.len {
            self.acc += read_gap(l.bytes, &mut self.byte);
            self.done += 1;
            wc.comparisons += 1;
            if self.acc >= x {
                self.last = Some(self.acc);
                return self.last;
            }
        }
        self.last = None;
        None
    }
}

/// Vbyte list with ST samples, probed forward: the bucket of the probe value
/// gives the byte offset to resume decoding from.
pub struct VbyteStProbe<'a> {
    bytes: &'a [u8],
    samples: &'a SampleTable,
    range: Range<usize>,
    step: u64,
    len: usize,
    byte: usize,
    acc: u64,
    last: Option<u64>,
}

impl<'a> VbyteStProbe<'a> {
    pub fn new(bytes: &'a [u8], samples: &'a SampleTable, w: usize, universe: u32, b: u32, len: usize) -> Self {
        Self {
            bytes,
            samples,
            range: samples.range(w),
            step: st_step(universe, b, len),
            len,
            byte: 0,
            acc: 0,
            last: None,
        }
    }
}

impl Probe for VbyteStProbe<'_> {
    fn len(&self) -> usize {
        self.len
    }

    fn next_geq(&mut self, x: u64, wc: &mut WorkCounters) -> Option<u64> {
        if let Some(v) = self.last {
            if v >= x {
                return Some(v);
            }
        }
        let bucket = x.div_ceil(self.step) as usize;
        if bucket > self.range.len() {
            self.byte = self.bytes.len();
            self.last = None;
            return None;
        }
        if bucket > 0 {
            let s = self.range.start + bucket - 1;
            let off = self.samples.pos(s) as usize;
            if off > self.byte {
                self.byte = off;
                self.acc = self.samples.value(s);
            }
        }
        while self.byte < self.bytes.len() {
            self.acc += read_gap(self.bytes, &mut self.byte);
            wc.comparisons += 1;
            if self.acc >= x {
                self.last = Some(self.acc);
                return self.last;
            }
        }
        self.last = None;
        None
    }
}

/// Smallest 1-position of `bits` that is `>= x`.
fn next_one(bits: &BitVector, x: u64) -> Option<u64> {
    let x = x.max(1);
    if x > bits.len() as u64 {
        return None;
    }
    if bits.get(x as usize) {
        return Some(x);
    }
    let r = bits.rank1(x as usize);
    (r < bits.count_ones()).then(|| bits.select1(r + 1) as u64)
}

/// Bitmap list: membership is one bit access, successors use rank and select.
pub struct BitmapProbe<'a> {
    bits: &'a BitVector,
    last: Option<u64>,
}

impl<'a> BitmapProbe<'a> {
    pub fn new(bits: &'a BitVector) -> Self {
        Self { bits, last: None }
    }
}

impl Probe for BitmapProbe<'_> {
    fn len(&self) -> usize {
        self.bits.count_ones()
    }

    fn next_geq(&mut self, x: u64, wc: &mut WorkCounters) -> Option<u64> {
        if let Some(v) = self.last {
            if v >= x {
                return Some(v);
            }
        }
        wc.comparisons += 1;
        self.last = next_one(self.bits, x);
        self.last
    }
}

impl SortedAccess for BitVector {
    fn len(&self) -> usize {
        self.count_ones()
    }

    fn lower_bound(&self, x: u64, lo: usize, hi: usize, wc: &mut WorkCounters) -> usize {
        wc.comparisons += 1;
        let below = if x <= 1 {
            0
        } else {
            self.rank1(((x - 1) as usize).min(BitVector::len(self)))
        };
        below.clamp(lo, hi)
    }

    fn get(&self, i: usize, _: &mut WorkCounters) -> u64 {
        self.select1(i + 1) as u64
    }
}

/// One open node of the descent into a phrase.
#[derive(Clone, Copy, Debug)]
struct Frame {
    /// Next `R_B` position to read in this node's subtree.
    pos: usize,
    /// Children not yet visited.
    open: u8,
    /// Node laid out inside its parent's tree; the parent resumes where it ends.
    inline: bool,
}

enum Seeds<'a> {
    None,
    Cm {
        table: &'a SampleTable,
        range: Range<usize>,
        step: usize,
    },
    St {
        table: &'a SampleTable,
        range: Range<usize>,
        step: u64,
    },
}

/// Cursor over a Re-Pair list with phrase sums. Advancing to `d` adds whole
/// phrase sums while they stay below `d` and descends only into the phrase
/// that reaches `d`; the descent stays open for the next, larger probes.
pub struct SkipCursor<'a> {
    grammar: &'a Grammar,
    lists: &'a CompressedLists,
    start: usize,
    end: usize,
    /// Next unread entry of `C`.
    i: usize,
    /// Value of the last posting consumed.
    s: u64,
    stack: Vec<Frame>,
    last: Option<u64>,
    len: usize,
    seeds: Seeds<'a>,
}

impl<'a> SkipCursor<'a> {
    /// Cursor over list `w`, seeded by whatever samples the store keeps.
    pub(crate) fn new(store: &'a RepairStore, w: usize, len: usize, k: u32, universe: u32, b: u32) -> Self {
        assert!(store.grammar.is_skipping(), "skipping needs phrase sums");
        let span = store.lists.span(w);
        let seeds = match &store.samples {
            RepairSamples::None => Seeds::None,
            RepairSamples::Cm(t) => Seeds::Cm {
                table: t,
                range: t.range(w),
                step: cm_step(k, span.len()),
            },
            RepairSamples::St(t) => Seeds::St {
                table: t,
                range: t.range(w),
                step: st_step(universe, b, len),
            },
        };
        Self {
            grammar: &store.grammar,
            lists: &store.lists,
            start: span.start,
            end: span.end,
            i: span.start,
            s: 0,
            stack: Vec::new(),
            last: None,
            len,
            seeds,
        }
    }

    /// Whether `d` is in the list. Successive probes must not decrease.
    pub fn search(&mut self, d: u64, wc: &mut WorkCounters) -> bool {
        self.next_geq(d, wc) == Some(d)
    }

    /// Entries of `C` passed so far (fully or partially).
    pub fn position(&self) -> usize {
        self.i - self.start
    }

    /// Jumps to a sampled entry of `C` at or past the current one whose
    /// preceding value is below `d`.
    fn seed(&mut self, d: u64, wc: &mut WorkCounters) {
        let target = match &self.seeds {
            Seeds::None => None,
            Seeds::Cm { table, range, step } => {
                if *step == 0 {
                    None
                } else {
                    let from = range.start + (self.i - self.start).div_ceil(*step).saturating_sub(1);
                    gallop_samples(table, from, range.end, d, wc).map(|s| (self.start + (s - range.start + 1) * step, table.value(s)))
                }
            }
            Seeds::St { table, range, step } => {
                let bucket = d.div_ceil(*step) as usize;
                if bucket > range.len() {
                    // d is past the last value
                    Some((self.end, self.s))
                } else if bucket == 0 {
                    None
                } else {
                    let s = range.start + bucket - 1;
                    Some((self.start + table.pos(s) as usize - 1, table.value(s)))
                }
            }
        };
        if let Some((entry, value)) = target {
            if entry >= self.i {
                self.i = entry;
                self.s = value;
                self.stack.clear();
            }
        }
    }

    /// End of the subtree rooted at the internal node at `pos`.
    fn subtree_end(&self, pos: usize) -> usize {
        let shape = self.grammar.shape();
        let mut need = 1usize;
        let mut p = pos;
        while need > 0 {
            if shape.get(p) {
                need += 1;
            } else {
                need -= 1;
            }
            p += 1;
        }
        p
    }

    /// Adds a terminal; returns true once the sum reaches `d`.
    fn terminal(&mut self, t: u32, d: u64, wc: &mut WorkCounters) -> bool {
        wc.terminals += 1;
        wc.comparisons += 1;
        self.s += t as u64;
        self.s >= d
    }

    /// Adds a phrase if it stays below `d`; false means descend.
    fn skip_phrase(&mut self, sum: u64, d: u64, wc: &mut WorkCounters) -> bool {
        wc.comparisons += 1;
        if self.s + sum < d {
            self.s += sum;
            true
        } else {
            false
        }
    }

    /// One step inside the open phrase; true once the sum reaches `d`.
    fn descend_step(&mut self, d: u64, wc: &mut WorkCounters) -> bool {
        let top = *self.stack.last().expect("open frame");
        if top.open == 0 {
            self.stack.pop();
            if top.inline {
                if let Some(parent) = self.stack.last_mut() {
                    parent.pos = top.pos;
                }
            }
            return false;
        }
        let g = self.grammar;
        let q = top.pos;
        let frame = self.stack.last_mut().expect("open frame");
        frame.open -= 1;
        frame.pos = q + 1;
        if g.shape().get(q) {
            // inline internal node with its sum at q
            if self.skip_phrase(g.sum_at(q), d, wc) {
                let end = self.subtree_end(q);
                self.stack.last_mut().expect("open frame").pos = end;
            } else {
                self.stack.push(Frame {
                    pos: q + 1,
                    open: 2,
                    inline: true,
                });
            }
            return false;
        }
        match g.decode(g.leaf_raw(q)) {
            Symbol::Terminal(t) => self.terminal(t, d, wc),
            Symbol::NonTerminal(r) => {
                if !self.skip_phrase(g.sum_at(r), d, wc) {
                    self.stack.push(Frame {
                        pos: r + 1,
                        open: 2,
                        inline: false,
                    });
                }
                false
            }
        }
    }
}

impl Probe for SkipCursor<'_> {
    fn len(&self) -> usize {
        self.len
    }

    fn next_geq(&mut self, d: u64, wc: &mut WorkCounters) -> Option<u64> {
        if let Some(v) = self.last {
            if v >= d {
                return Some(v);
            }
        }
        if self.i == self.end && self.stack.is_empty() {
            self.last = None;
            return None;
        }
        self.seed(d, wc);
        loop {
            if !self.stack.is_empty() {
                if self.descend_step(d, wc) {
                    break;
                }
                continue;
            }
            if self.i >= self.end {
                self.last = None;
                return None;
            }
            let raw = self.lists.raw(self.i);
            self.i += 1;
            wc.c_entries += 1;
            match self.grammar.decode(raw) {
                Symbol::Terminal(t) => {
                    if self.terminal(t, d, wc) {
                        break;
                    }
                }
                Symbol::NonTerminal(p) => {
                    if !self.skip_phrase(self.grammar.sum_at(p), d, wc) {
                        self.stack.push(Frame {
                            pos: p + 1,
                            open: 2,
                            inline: false,
                        });
                    }
                }
            }
        }
        self.last = Some(self.s);
        self.last
    }
}
