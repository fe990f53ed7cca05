//! Intersection algorithms over sorted lists.

use super::WorkCounters;

/// Forward-only search inside one list.
pub trait Probe {
    /// Uncompressed list length.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest element `>= x` at or after the previous answer, or `None`
    /// when the list has none. Probes must not decrease.
    fn next_geq(&mut self, x: u64, wc: &mut WorkCounters) -> Option<u64>;
}

/// Random access by position, for the recursive binary-search intersection.
pub trait SortedAccess {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First index in `[lo, hi)` holding a value `>= x` (`hi` if none).
    fn lower_bound(&self, x: u64, lo: usize, hi: usize, wc: &mut WorkCounters) -> usize;

    fn get(&self, i: usize, wc: &mut WorkCounters) -> u64;
}

/// Galloping cursor over a plain sorted array.
pub struct SliceProbe<'a> {
    data: &'a [u32],
    pos: usize,
}

impl<'a> SliceProbe<'a> {
    pub fn new(data: &'a [u32]) -> Self {
        Self { data, pos: 0 }
    }
}

impl Probe for SliceProbe<'_> {
    fn len(&self) -> usize {
        self.data.len()
    }

    fn next_geq(&mut self, x: u64, wc: &mut WorkCounters) -> Option<u64> {
        let d = self.data;
        if self.pos >= d.len() {
            return None;
        }
        wc.comparisons += 1;
        if d[self.pos] as u64 >= x {
            return Some(d[self.pos] as u64);
        }
        // d[lo] < x; check lo + 1, lo + 2, lo + 4, ...
        let lo = self.pos;
        let mut step = 1;
        let mut hi = lo + 1;
        while hi < d.len() && (d[hi] as u64) < x {
            wc.comparisons += 1;
            step *= 2;
            hi = lo + step;
        }
        let hi = hi.min(d.len());
        let start = lo + step / 2 + 1;
        let off = d[start.min(hi)..hi].partition_point(|&v| {
            wc.comparisons += 1;
            (v as u64) < x
        });
        self.pos = start.min(hi) + off;
        d.get(self.pos).map(|&v| v as u64)
    }
}

impl SortedAccess for [u32] {
    fn len(&self) -> usize {
        <[u32]>::len(self)
    }

    fn lower_bound(&self, x: u64, lo: usize, hi: usize, wc: &mut WorkCounters) -> usize {
        lo + self[lo..hi].partition_point(|&v| {
            wc.comparisons += 1;
            (v as u64) < x
        })
    }

    fn get(&self, i: usize, _: &mut WorkCounters) -> u64 {
        self[i] as u64
    }
}

/// Linear merge of two sorted lists.
pub fn merge_intersect(a: &[u32], b: &[u32], wc: &mut WorkCounters) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        wc.comparisons += 1;
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Searches the longer list for every element `x` of the shorter one, as
/// `x + shift`; returns the matching `x`.
pub fn svs_intersect(short: &[u32], long: &mut dyn Probe, shift: u64, wc: &mut WorkCounters) -> Vec<u32> {
    let mut out = Vec::with_capacity(short.len());
    for &x in short {
        let target = x as u64 + shift;
        match long.next_geq(target, wc) {
            None => break,
            Some(v) if v == target => out.push(x),
            Some(_) => {}
        }
    }
    out
}

/// Binary-searches the longer list for the median of the shorter one and
/// recurses on both halves.
pub fn bys_intersect<L: SortedAccess + ?Sized>(short: &[u32], long: &L, shift: u64, wc: &mut WorkCounters) -> Vec<u32> {
    enum Work {
        Range(usize, usize, usize, usize),
        Emit(u32),
    }
    let mut out = Vec::new();
    // explicit stack of (short range, long range); pushed right to left so
    // results come out in order
    let mut work = vec![Work::Range(0, short.len(), 0, long.len())];
    while let Some(item) = work.pop() {
        let (a0, a1, b0, b1) = match item {
            Work::Emit(x) => {
                out.push(x);
                continue;
            }
            Work::Range(a0, a1, b0, b1) => (a0, a1, b0, b1),
        };
        if a0 >= a1 || b0 >= b1 {
            continue;
        }
        let mid = (a0 + a1) / 2;
        let x = short[mid] as u64 + shift;
        let r = long.lower_bound(x, b0, b1, wc);
        let found = r < b1 && long.get(r, wc) == x;
        work.push(Work::Range(mid + 1, a1, if found { r + 1 } else { r }, b1));
        if found {
            work.push(Work::Emit(short[mid]));
        }
        work.push(Work::Range(a0, mid, b0, r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn oracle(a: &[u32], b: &[u32]) -> Vec<u32> {
        let s: BTreeSet<u32> = b.iter().copied().collect();
        a.iter().copied().filter(|x| s.contains(x)).collect()
    }

    #[test]
    fn small_cases() {
        let mut wc = WorkCounters::default();
        assert_eq!(merge_intersect(&[1, 3, 5], &[3, 4, 5], &mut wc), vec![3, 5]);
        assert!(merge_intersect(&[1, 2], &[], &mut wc).is_empty());
        let long: Vec<u32> = (1..=10).collect();
        assert_eq!(svs_intersect(&[5], &mut SliceProbe::new(&long), 0, &mut wc), vec![5]);
        assert_eq!(svs_intersect(&[2, 4, 9], &mut SliceProbe::new(&long), 0, &mut wc), vec![2, 4, 9]);
        assert_eq!(bys_intersect(&long, long.as_slice(), 0, &mut wc), long);
        assert!(bys_intersect(&[1, 3], [2u32, 4].as_slice(), 0, &mut wc).is_empty());
        // shifted: x such that x + 1 is in the long list
        assert_eq!(svs_intersect(&[1, 4, 10], &mut SliceProbe::new(&long), 1, &mut wc), vec![1, 4]);
    }

    fn sorted_set(max: u32, n: usize) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::btree_set(1..max, 0..n).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn algorithms_agree(a in sorted_set(3000, 60), b in sorted_set(3000, 1500), shift in 0u64..3) {
            let mut wc = WorkCounters::default();
            let shifted: Vec<u32> = b.iter().filter(|&&v| v as u64 > shift).map(|&v| v - shift as u32).collect();
            let expect = oracle(&a, &shifted);
            prop_assert_eq!(merge_intersect(&a, &shifted, &mut wc), expect.clone());
            prop_assert_eq!(svs_intersect(&a, &mut SliceProbe::new(&b), shift, &mut wc), expect.clone());
            prop_assert_eq!(bys_intersect(&a, b.as_slice(), shift, &mut wc), expect);
        }
    }
}
