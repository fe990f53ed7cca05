//! Query evaluation: word, conjunctive and phrase queries over any stored
//! representation, plus translation of positions to documents.

mod cursor;
mod intersect;

use std::fmt;
use std::str::FromStr;

pub use cursor::{BitmapProbe, SkipCursor, VbyteCmList, VbyteCmProbe, VbyteStProbe};
pub use intersect::{bys_intersect, merge_intersect, svs_intersect, Probe, SliceProbe, SortedAccess};

use crate::corpus::{ParseMode, Query, QueryKind, QuerySet};
use crate::error::{Error, Result};
use crate::postings::store::Store;
use crate::postings::{IndexImage, Representation};

/// Work done by one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounters {
    /// Entries of `C` read.
    pub c_entries: u64,
    /// Terminals (gaps) expanded.
    pub terminals: u64,
    pub comparisons: u64,
}

impl WorkCounters {
    pub fn add(&mut self, other: &WorkCounters) {
        self.c_entries += other.c_entries;
        self.terminals += other.terminals;
        self.comparisons += other.comparisons;
    }
}

/// Pairwise intersection method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Merge,
    Svs,
    Bys,
    /// Skipping search over Re-Pair lists (full expansion for plain Re-Pair).
    Repair,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Merge, Algorithm::Svs, Algorithm::Bys, Algorithm::Repair];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Merge => "merge",
            Algorithm::Svs => "svs",
            Algorithm::Bys => "bys",
            Algorithm::Repair => "repair",
        }
    }

    /// Representations this algorithm can run on.
    pub fn valid_representations(self) -> Vec<Representation> {
        use Representation::*;
        match self {
            Algorithm::Merge => Representation::ALL.to_vec(),
            Algorithm::Svs => vec![VbyteCm, VbyteSt, Hybrid],
            Algorithm::Bys => vec![VbyteCm, Hybrid],
            Algorithm::Repair => vec![Repair, RepairSkip, RepairSkipCm, RepairSkipSt],
        }
    }

    pub fn check(self, repr: Representation) -> Result<()> {
        let valid = self.valid_representations();
        if valid.contains(&repr) {
            return Ok(());
        }
        Err(Error::IncompatibleAlgorithm {
            algorithm: self.name().into(),
            representation: repr.name().into(),
            valid: valid.iter().map(|r| r.name()).collect::<Vec<_>>().join(", "),
        })
    }

    /// The natural algorithm for a representation.
    pub fn default_for(repr: Representation) -> Algorithm {
        use Representation::*;
        match repr {
            VbyteCm | VbyteSt | Hybrid => Algorithm::Svs,
            Repair | RepairSkip | RepairSkipCm | RepairSkipSt => Algorithm::Repair,
            _ => Algorithm::Merge,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown algorithm {s:?} (expected merge, svs, bys or repair)")))
    }
}

/// Matches of one query with the work spent on it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryResult {
    /// Document ids, or starting positions for phrases.
    pub values: Vec<u32>,
    pub counters: WorkCounters,
}

/// Below this ratio of list lengths svs merges instead.
pub const DEFAULT_SVS_THRESHOLD: usize = 20;

/// Evaluates queries against one index with one algorithm.
pub struct Engine<'a> {
    image: &'a IndexImage,
    algorithm: Algorithm,
    svs_threshold: usize,
}

/// Values `v - shift` for every `v > shift`.
fn unshift(list: &[u32], shift: u64) -> Vec<u32> {
    let s = shift as u32;
    let from = list.partition_point(|&v| v <= s);
    list[from..].iter().map(|&v| v - s).collect()
}

impl<'a> Engine<'a> {
    pub fn new(image: &'a IndexImage, algorithm: Algorithm) -> Result<Self> {
        algorithm.check(image.repr)?;
        Ok(Self {
            image,
            algorithm,
            svs_threshold: DEFAULT_SVS_THRESHOLD,
        })
    }

    pub fn with_svs_threshold(mut self, ratio: usize) -> Self {
        self.svs_threshold = ratio;
        self
    }

    pub fn image(&self) -> &IndexImage {
        self.image
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// Decodes a whole list, counting the expansion for Re-Pair lists.
    fn full_list(&self, w: usize, len: usize, wc: &mut WorkCounters) -> Result<Vec<u32>> {
        if let Store::Repair(r) = &self.image.store {
            wc.c_entries += r.lists.span(w).len() as u64;
            wc.terminals += len as u64;
        }
        self.image.store.decode(w, len)
    }

    /// Candidates `x` for which `x + shift` is in list `w`.
    fn intersect_with(&self, cand: &[u32], w: usize, len: usize, shift: u64, wc: &mut WorkCounters) -> Result<Vec<u32>> {
        let img = self.image;
        let (k, b, u) = (img.params.k, img.params.st_b, img.universe);
        let merged = |wc: &mut WorkCounters| -> Result<Vec<u32>> {
            let list = self.full_list(w, len, wc)?;
            Ok(merge_intersect(cand, &unshift(&list, shift), wc))
        };
        match (self.algorithm, &img.store) {
            (Algorithm::Svs, _) if len < self.svs_threshold.saturating_mul(cand.len()) => merged(wc),
            (Algorithm::Svs, Store::VbyteCm(cs, t)) => {
                let (a, e) = cs.span(w);
                let list = VbyteCmList::new(&cs.data[a as usize..e as usize], t, w, k, len);
                Ok(svs_intersect(cand, &mut list.probe(), shift, wc))
            }
            (Algorithm::Svs, Store::VbyteSt(cs, t)) => {
                let (a, e) = cs.span(w);
                let mut p = VbyteStProbe::new(&cs.data[a as usize..e as usize], t, w, u, b, len);
                Ok(svs_intersect(cand, &mut p, shift, wc))
            }
            (Algorithm::Svs, Store::Hybrid(h)) => match h.bitmap(w) {
                Some(bits) => Ok(svs_intersect(cand, &mut BitmapProbe::new(bits), shift, wc)),
                None => {
                    let list = self.full_list(w, len, wc)?;
                    Ok(svs_intersect(cand, &mut SliceProbe::new(&list), shift, wc))
                }
            },
            (Algorithm::Bys, Store::VbyteCm(cs, t)) => {
                let (a, e) = cs.span(w);
                let list = VbyteCmList::new(&cs.data[a as usize..e as usize], t, w, k, len);
                Ok(bys_intersect(cand, &list, shift, wc))
            }
            (Algorithm::Bys, Store::Hybrid(h)) => match h.bitmap(w) {
                Some(bits) => Ok(bys_intersect(cand, bits, shift, wc)),
                None => {
                    let list = self.full_list(w, len, wc)?;
                    Ok(bys_intersect(cand, list.as_slice(), shift, wc))
                }
            },
            (Algorithm::Repair, Store::Repair(r)) if r.grammar.is_skipping() => {
                let mut c = SkipCursor::new(r, w, len, k, u, b);
                Ok(svs_intersect(cand, &mut c, shift, wc))
            }
            _ => merged(wc),
        }
    }

    /// Positions `x` with `x + shift_i` in the list of `id_i` for every operand.
    /// Lists are taken shortest first; an empty list ends the query at once.
    pub fn intersect(&self, operands: &[(u32, u64)], wc: &mut WorkCounters) -> Result<Vec<u32>> {
        let img = self.image;
        let mut ops: Vec<(usize, usize, u64)> = Vec::with_capacity(operands.len());
        for &(id, shift) in operands {
            let Some(w) = img.slot(id) else { return Ok(Vec::new()) };
            let len = img.list_len(id);
            if len == 0 {
                return Ok(Vec::new());
            }
            ops.push((w, len, shift));
        }
        ops.sort_by_key(|&(w, len, shift)| (len, shift, w));
        ops.dedup();
        let Some(&(w, len, shift)) = ops.first() else {
            return Ok(Vec::new());
        };
        let mut cand = unshift(&self.full_list(w, len, wc)?, shift);
        for &(w, len, shift) in &ops[1..] {
            if cand.is_empty() {
                break;
            }
            cand = self.intersect_with(&cand, w, len, shift, wc)?;
        }
        Ok(cand)
    }

    /// Postings of one term.
    pub fn word(&self, id: u32) -> Result<QueryResult> {
        let mut counters = WorkCounters::default();
        let values = self.intersect(&[(id, 0)], &mut counters)?;
        Ok(QueryResult { values, counters })
    }

    /// Documents containing every term (non-positional indexes).
    pub fn conjunctive(&self, ids: &[u32]) -> Result<QueryResult> {
        if self.image.mode != ParseMode::NonPositional {
            return Err(Error::Unsupported("conjunctive queries need a non-positional index".into()));
        }
        let ops: Vec<(u32, u64)> = ids.iter().map(|&id| (id, 0)).collect();
        let mut counters = WorkCounters::default();
        let values = self.intersect(&ops, &mut counters)?;
        Ok(QueryResult { values, counters })
    }

    /// Starting positions of the token sequence (positional indexes).
    pub fn phrase(&self, ids: &[u32]) -> Result<QueryResult> {
        if self.image.mode != ParseMode::Positional {
            return Err(Error::Unsupported("phrase queries need a positional index".into()));
        }
        let ops: Vec<(u32, u64)> = ids.iter().enumerate().map(|(j, &id)| (id, j as u64)).collect();
        let mut counters = WorkCounters::default();
        let values = self.intersect(&ops, &mut counters)?;
        Ok(QueryResult { values, counters })
    }

    pub fn run(&self, query: &Query, kind: QueryKind) -> Result<QueryResult> {
        match kind {
            QueryKind::WordLowFreq | QueryKind::WordHighFreq => match query.ids.as_slice() {
                [id] => self.word(*id),
                _ => Err(Error::Unsupported("a word query has exactly one term".into())),
            },
            QueryKind::Conjunctive => self.conjunctive(&query.ids),
            QueryKind::Phrase => self.phrase(&query.ids),
        }
    }

    pub fn run_batch_sequential(&self, set: &QuerySet) -> Result<Vec<QueryResult>> {
        set.queries.iter().map(|q| self.run(q, set.kind)).collect()
    }

    /// Evaluates a query set, queries in parallel when the `parallel`
    /// feature is on. Each query runs on one thread.
    #[cfg(feature = "parallel")]
    pub fn run_batch(&self, set: &QuerySet) -> Result<Vec<QueryResult>> {
        use rayon::prelude::*;
        set.queries.par_iter().map(|q| self.run(q, set.kind)).collect()
    }

    #[cfg(not(feature = "parallel"))]
    pub fn run_batch(&self, set: &QuerySet) -> Result<Vec<QueryResult>> {
        self.run_batch_sequential(set)
    }
}

impl IndexImage {
    /// Skipping cursor over the list of term `id` (Re-Pair with phrase sums only).
    pub fn skip_cursor(&self, id: u32) -> Result<SkipCursor<'_>> {
        let Store::Repair(r) = &self.store else {
            return Err(Error::Unsupported(format!("{} lists have no skipping cursor", self.repr)));
        };
        if !r.grammar.is_skipping() {
            return Err(Error::Unsupported("plain Re-Pair stores no phrase sums".into()));
        }
        let w = self.slot(id).ok_or_else(|| Error::OutOfRange {
            what: "term id",
            index: id as u64,
            valid: format!("[1, {}]", self.list_count()),
        })?;
        Ok(SkipCursor::new(
            r,
            w,
            self.list_len(id),
            self.params.k,
            self.universe,
            self.params.st_b,
        ))
    }
}

/// Maps increasing absolute positions to 1-based `(document, offset)` pairs,
/// searching onward from the previous answer.
pub fn translate(positions: &[u32], doc_starts: &[u32], total_tokens: u64) -> Result<Vec<(u32, u32)>> {
    let mut out = Vec::with_capacity(positions.len());
    let mut doc = 0usize;
    for &p in positions {
        if p as u64 > total_tokens || p == 0 || doc_starts.first().is_none_or(|&s| p < s) {
            return Err(Error::OutOfRange {
                what: "position",
                index: p as u64,
                valid: format!("[1, {total_tokens}]"),
            });
        }
        // gallop past doc to the last start <= p
        let mut step = 1;
        while doc + step < doc_starts.len() && doc_starts[doc + step] <= p {
            step *= 2;
        }
        let lo = doc + step / 2;
        let hi = (doc + step).min(doc_starts.len());
        doc = lo + doc_starts[lo..hi].partition_point(|&s| s <= p) - 1;
        out.push((doc as u32 + 1, p - doc_starts[doc] + 1));
    }
    Ok(out)
}
