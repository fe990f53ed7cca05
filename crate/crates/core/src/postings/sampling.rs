//! List sampling: by position (CM) and by value domain (ST).
//!
//! Both kinds store, per sample, the absolute value preceding the sampled
//! entry and a pointer to that entry. An entry is a single posting for codec
//! lists and a symbol of `C` for Re-Pair lists.

use crate::error::Result;
use crate::io::{ByteReader, ByteWriter};
use crate::succinct::IntVector;

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// CM step `k * ceil(log2 l)` for a list of `l` entries.
pub fn cm_step(k: u32, len: usize) -> usize {
    k as usize * ceil_log2(len as u64) as usize
}

/// ST step `2^ceil(log2(u * B / l))` for a list of `l` postings over `[1, u]`.
pub fn st_step(universe: u32, b: u32, len: usize) -> u64 {
    let target = universe as u64 * b as u64;
    let len = len.max(1) as u64;
    let mut e = 0;
    while (len << e) < target {
        e += 1;
    }
    1 << e
}

/// ST samples over a list given the sum each entry contributes: for bucket
/// `j` (values in `((j-1)*step, j*step]`, up to the largest value) the
/// absolute value before, and the 1-based index of, the entry holding the
/// first value above `(j-1)*step`. Entries are never empty, so an entry
/// ending above a threshold contains the first value above it.
pub fn st_samples(entry_sums: &[u64], step: u64) -> Vec<(u64, usize)> {
    let total: u64 = entry_sums.iter().sum();
    let buckets = total.div_ceil(step);
    let mut out = Vec::with_capacity(buckets as usize);
    let mut before = 0;
    let mut e = 0;
    for j in 0..buckets {
        let threshold = j * step;
        while before + entry_sums[e] <= threshold {
            before += entry_sums[e];
            e += 1;
        }
        out.push((before, e + 1));
    }
    out
}

/// Samples of every list, concatenated: list `w` owns `ptr[w]..ptr[w+1]`.
/// `pos` holds a pointer per sample (an entry index or a byte offset,
/// relative to the list start) and may be empty when it is implied.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleTable {
    ptr: IntVector,
    vals: IntVector,
    pos: IntVector,
}

pub type CmSamples = SampleTable;
pub type StSamples = SampleTable;

impl SampleTable {
    /// Builds from per-list `(value, pointer)` pairs.
    pub fn from_lists(lists: &[Vec<(u64, u64)>], keep_pos: bool) -> Self {
        let mut ptr = Vec::with_capacity(lists.len() + 1);
        let mut vals = Vec::new();
        let mut pos = Vec::new();
        ptr.push(0);
        for l in lists {
            for &(v, p) in l {
                vals.push(v);
                if keep_pos {
                    pos.push(p);
                }
            }
            ptr.push(vals.len() as u64);
        }
        Self {
            ptr: IntVector::from_values(&ptr),
            vals: IntVector::from_values(&vals),
            pos: IntVector::from_values(&pos),
        }
    }

    /// Sample index range of list `w` (0-based list index).
    #[inline]
    pub fn range(&self, w: usize) -> std::ops::Range<usize> {
        self.ptr.get(w) as usize..self.ptr.get(w + 1) as usize
    }

    #[inline]
    pub fn value(&self, i: usize) -> u64 {
        self.vals.get(i)
    }

    #[inline]
    pub fn pos(&self, i: usize) -> u64 {
        self.pos.get(i)
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn size_in_bytes(&self) -> usize {
        self.ptr.size_in_bytes() + self.vals.size_in_bytes() + self.pos.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        self.ptr.write_to(w);
        self.vals.write_to(w);
        self.pos.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        Ok(Self {
            ptr: IntVector::read_from(r)?,
            vals: IntVector::read_from(r)?,
            pos: IntVector::read_from(r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps() {
        assert_eq!(cm_step(4, 256), 32);
        assert_eq!(cm_step(4, 1), 0);
        assert_eq!(cm_step(2, 5), 6);
        assert_eq!(st_step(1024, 16, 64), 256);
        assert_eq!(st_step(1000, 16, 64), 256);
        assert_eq!(st_step(10, 1, 100), 1);
    }

    #[test]
    fn figure_st_samples() {
        // gamma = D B with phrase sums 6 and 4
        assert_eq!(st_samples(&[6, 4], 4), vec![(0, 1), (0, 1), (6, 2)]);
        assert_eq!(st_samples(&[5], 8), vec![(0, 1)]);
        // plain postings 1 3 4 6 8 10 as entries
        assert_eq!(st_samples(&[1, 2, 1, 2, 2, 2], 4), vec![(0, 1), (4, 4), (8, 6)]);
    }

    #[test]
    fn empty_buckets_point_past_the_gap() {
        // values 2 and 20; buckets 2..5 hold nothing below 20
        let s = st_samples(&[2, 18], 4);
        assert_eq!(s.len(), 5);
        assert!(s[1..].iter().all(|&x| x == (2, 2)));
    }

    #[test]
    fn table_layout() {
        let t = SampleTable::from_lists(&[vec![(3, 1), (9, 4)], vec![], vec![(7, 2)]], true);
        assert_eq!(t.range(0), 0..2);
        assert_eq!(t.range(1), 2..2);
        assert_eq!((t.value(2), t.pos(2)), (7, 2));
    }
}
