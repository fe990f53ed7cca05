//! Re-Pair compression of concatenated d-gap lists.
//!
//! Lists are compressed together so rules capture repetitions across lists,
//! but no pair ever straddles two lists. The dictionary is stored as a forest:
//! `R_B` holds the preorder shape of each rule tree (1 = internal, 0 = leaf),
//! `R_S` holds the leaf values, and nonterminals are named by the position of
//! their 1 in `R_B`. A rule used inside another rule has its tree inlined at
//! its first use; later uses become leaves pointing to it. In the skipping
//! variant `R_S` is aligned with every position of `R_B` and holds, at each
//! 1, the sum of the gaps that nonterminal expands to.
//!
//! Values in `C` and in `R_S` leaves are terminals when `<= u` (the largest
//! gap) and nonterminal `R_B` positions offset by `u` otherwise.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::io::{ByteReader, ByteWriter};
use crate::succinct::{BitVector, BitVectorBuilder, IntVector};

/// Symbols at or above this value denote rule `sym - NT_BASE` during compression.
const NT_BASE: u64 = 1 << 32;
const DEAD: u64 = u64::MAX;
const NIL: u32 = u32::MAX;

/// Output of the pairing phase: rules in creation order plus the reduced
/// sequence of every list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RePairOutput {
    /// `rules[r] = (left, right)`; symbols `>= 2^32` refer to `rules[sym - 2^32]`.
    pub rules: Vec<(u64, u64)>,
    pub sequences: Vec<Vec<u64>>,
}

impl RePairOutput {
    pub fn is_rule(sym: u64) -> bool {
        sym >= NT_BASE
    }

    pub fn rule_index(sym: u64) -> usize {
        (sym - NT_BASE) as usize
    }

    pub fn rule_symbol(index: usize) -> u64 {
        NT_BASE + index as u64
    }

    /// Expands a pairing-phase symbol (test helper and oracle).
    pub fn expand(&self, sym: u64, out: &mut Vec<u32>) {
        let mut stack = vec![sym];
        while let Some(s) = stack.pop() {
            if Self::is_rule(s) {
                let (l, r) = self.rules[Self::rule_index(s)];
                stack.push(r);
                stack.push(l);
            } else {
                out.push(s as u32);
            }
        }
    }
}

#[derive(Clone, Copy)]
struct PairEntry {
    count: u32,
    head: u32,
}

struct Pairing {
    sym: Vec<u64>,
    next: Vec<u32>,
    prev: Vec<u32>,
    occ_next: Vec<u32>,
    occ_prev: Vec<u32>,
    pairs: HashMap<(u64, u64), PairEntry>,
    heap: BinaryHeap<(u32, Reverse<(u64, u64)>)>,
}

impl Pairing {
    fn pair_at(&self, p: u32) -> (u64, u64) {
        (self.sym[p as usize], self.sym[self.next[p as usize] as usize])
    }

    fn add_occ(&mut self, p: u32) {
        let pair = self.pair_at(p);
        let e = self.pairs.entry(pair).or_insert(PairEntry { count: 0, head: NIL });
        self.occ_prev[p as usize] = NIL;
        self.occ_next[p as usize] = e.head;
        if e.head != NIL {
            self.occ_prev[e.head as usize] = p;
        }
        e.head = p;
        e.count += 1;
        if e.count >= 2 {
            self.heap.push((e.count, Reverse(pair)));
        }
    }

    fn remove_occ(&mut self, p: u32) {
        let pair = self.pair_at(p);
        let (op, on) = (self.occ_prev[p as usize], self.occ_next[p as usize]);
        let e = self.pairs.get_mut(&pair).expect("occurrence of an unknown pair");
        if op != NIL {
            self.occ_next[op as usize] = on;
        } else {
            e.head = on;
        }
        if on != NIL {
            self.occ_prev[on as usize] = op;
        }
        e.count -= 1;
        if e.count == 0 {
            self.pairs.remove(&pair);
        } else if e.count >= 2 {
            let c = e.count;
            self.heap.push((c, Reverse(pair)));
        }
    }

    fn occurrences(&self, pair: (u64, u64)) -> Vec<u32> {
        let mut out = Vec::new();
        let mut p = self.pairs.get(&pair).map_or(NIL, |e| e.head);
        while p != NIL {
            out.push(p);
            p = self.occ_next[p as usize];
        }
        out.sort_unstable();
        out
    }

    fn matches(&self, p: u32, pair: (u64, u64)) -> bool {
        let q = self.next[p as usize];
        self.sym[p as usize] == pair.0 && q != NIL && self.sym[q as usize] == pair.1
    }

    fn replace_at(&mut self, p: u32, nt: u64) {
        let q = self.next[p as usize];
        let h = self.prev[p as usize];
        let r = self.next[q as usize];
        if h != NIL {
            self.remove_occ(h);
        }
        self.remove_occ(p);
        if r != NIL {
            self.remove_occ(q);
        }
        self.sym[p as usize] = nt;
        self.sym[q as usize] = DEAD;
        self.next[p as usize] = r;
        if r != NIL {
            self.prev[r as usize] = p;
        }
        if h != NIL {
            self.add_occ(h);
        }
        if r != NIL {
            self.add_occ(p);
        }
    }
}

/// Runs Re-Pair over the lists, never forming pairs across list boundaries.
///
/// The most frequent pair is replaced first; ties go to the smallest pair
/// (terminals sort before nonterminals, older rules before newer ones).
/// Replacement stops once no pair has two non-overlapping occurrences.
pub fn repair(lists: &[Vec<u32>]) -> RePairOutput {
    let total: usize = lists.iter().map(Vec::len).sum();
    assert!(total < NIL as usize, "sequence too long for 32-bit positions");
    let mut st = Pairing {
        sym: Vec::with_capacity(total),
        next: vec![NIL; total],
        prev: vec![NIL; total],
        occ_next: vec![NIL; total],
        occ_prev: vec![NIL; total],
        pairs: HashMap::new(),
        heap: BinaryHeap::new(),
    };
    let mut starts = Vec::with_capacity(lists.len());
    for list in lists {
        starts.push(st.sym.len() as u32);
        let base = st.sym.len();
        for (k, &g) in list.iter().enumerate() {
            st.sym.push(g as u64);
            if k > 0 {
                st.prev[base + k] = (base + k - 1) as u32;
                st.next[base + k - 1] = (base + k) as u32;
            }
        }
    }
    for p in 0..total as u32 {
        if st.next[p as usize] != NIL {
            st.add_occ(p);
        }
    }

    let mut rules: Vec<(u64, u64)> = Vec::new();
    while let Some((count, Reverse(pair))) = st.heap.pop() {
        if st.pairs.get(&pair).map(|e| e.count) != Some(count) {
            continue; // stale heap entry
        }
        let occs = st.occurrences(pair);
        // non-overlapping occurrences, scanning left to right
        let mut chosen = Vec::with_capacity(occs.len());
        let mut consumed = NIL;
        for &p in &occs {
            if p != consumed && st.matches(p, pair) {
                chosen.push(p);
                consumed = st.next[p as usize];
            }
        }
        if chosen.len() < 2 {
            continue;
        }
        let nt = RePairOutput::rule_symbol(rules.len());
        rules.push(pair);
        for p in chosen {
            // earlier replacements in a run of equal symbols may have consumed p
            if st.sym[p as usize] != DEAD && st.matches(p, pair) {
                st.replace_at(p, nt);
            }
        }
    }

    let sequences = lists
        .iter()
        .zip(&starts)
        .map(|(list, &s)| {
            let mut seq = Vec::new();
            if !list.is_empty() {
                let mut p = s;
                while p != NIL {
                    seq.push(st.sym[p as usize]);
                    p = st.next[p as usize];
                }
            }
            seq
        })
        .collect();
    RePairOutput { rules, sequences }
}

/// A decoded symbol of `C` or of an `R_S` leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(u32),
    /// 1-based position of the nonterminal's 1 in `R_B`.
    NonTerminal(usize),
}

/// Compact Re-Pair dictionary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    shape: BitVector,
    values: IntVector,
    max_terminal: u64,
    rules: usize,
    skipping: bool,
}

impl Grammar {
    /// Lays the rules out as a forest. Trees are emitted from the newest rule
    /// to the oldest; a rule not yet placed when first met as a child is
    /// inlined there. Returns the grammar and the `R_B` position of every rule.
    pub fn from_rules(rules: &[(u64, u64)], max_terminal: u64, skipping: bool) -> (Self, Vec<usize>) {
        enum Item {
            Node(usize),
            Child(u64),
        }
        let mut pos_of = vec![0usize; rules.len()];
        let mut shape = BitVectorBuilder::new();
        // (R_B position, rule) for every internal node; leaf values in preorder
        let mut internal: Vec<(usize, usize)> = Vec::with_capacity(rules.len());
        let mut leaves: Vec<(usize, u64)> = Vec::with_capacity(rules.len() + 1);
        let mut stack = Vec::new();
        for root in (0..rules.len()).rev() {
            if pos_of[root] != 0 {
                continue;
            }
            stack.push(Item::Node(root));
            while let Some(item) = stack.pop() {
                let node = match item {
                    Item::Node(r) => r,
                    Item::Child(sym) if RePairOutput::is_rule(sym) && pos_of[RePairOutput::rule_index(sym)] == 0 => {
                        RePairOutput::rule_index(sym)
                    }
                    Item::Child(sym) => {
                        shape.push(false);
                        let v = if RePairOutput::is_rule(sym) {
                            max_terminal + pos_of[RePairOutput::rule_index(sym)] as u64
                        } else {
                            sym
                        };
                        leaves.push((shape.len(), v));
                        continue;
                    }
                };
                shape.push(true);
                pos_of[node] = shape.len();
                internal.push((shape.len(), node));
                let (l, r) = rules[node];
                stack.push(Item::Child(r));
                stack.push(Item::Child(l));
            }
        }
        let shape = shape.build();

        let values = if skipping {
            let sums = rule_sums(rules);
            let mut all = vec![0u64; shape.len()];
            for &(p, r) in &internal {
                all[p - 1] = sums[r];
            }
            for &(p, v) in &leaves {
                all[p - 1] = v;
            }
            IntVector::from_values(&all)
        } else {
            IntVector::from_values(&leaves.iter().map(|&(_, v)| v).collect::<Vec<_>>())
        };
        (
            Self {
                shape,
                values,
                max_terminal,
                rules: rules.len(),
                skipping,
            },
            pos_of,
        )
    }

    pub fn shape(&self) -> &BitVector {
        &self.shape
    }

    pub fn values(&self) -> &IntVector {
        &self.values
    }

    /// Largest terminal value `u`.
    pub fn max_terminal(&self) -> u64 {
        self.max_terminal
    }

    pub fn rule_count(&self) -> usize {
        self.rules
    }

    pub fn is_skipping(&self) -> bool {
        self.skipping
    }

    /// Interprets an encoded value (terminal, or `u` + `R_B` position).
    #[inline]
    pub fn decode(&self, v: u64) -> Symbol {
        if v <= self.max_terminal {
            Symbol::Terminal(v as u32)
        } else {
            Symbol::NonTerminal((v - self.max_terminal) as usize)
        }
    }

    pub fn encode(&self, s: Symbol) -> u64 {
        match s {
            Symbol::Terminal(t) => t as u64,
            Symbol::NonTerminal(p) => self.max_terminal + p as u64,
        }
    }

    /// Raw `R_S` value attached to the leaf at `R_B` position `pos`.
    #[inline]
    pub fn leaf_raw(&self, pos: usize) -> u64 {
        if self.skipping {
            self.values.get(pos - 1)
        } else {
            self.values.get(self.shape.rank0(pos) - 1)
        }
    }

    /// Phrase sum stored at the 1 in position `pos` (skipping variant only).
    #[inline]
    pub fn sum_at(&self, pos: usize) -> u64 {
        debug_assert!(self.skipping);
        self.values.get(pos - 1)
    }

    fn check_nonterminal(&self, pos: usize) -> Result<()> {
        if pos == 0 || pos > self.shape.len() || !self.shape.get(pos) {
            return Err(Error::InvalidSymbol(self.max_terminal + pos as u64));
        }
        Ok(())
    }

    /// Appends the gaps `sym` expands to.
    pub fn expand_into(&self, sym: Symbol, out: &mut Vec<u32>) -> Result<()> {
        match sym {
            Symbol::Terminal(t) => {
                out.push(t);
                Ok(())
            }
            Symbol::NonTerminal(p) => {
                self.check_nonterminal(p)?;
                self.expand_unchecked(p, out);
                Ok(())
            }
        }
    }

    /// Depth-first expansion of the nonterminal at `root`: walk `R_B` until
    /// the subtree closes, recursing into leaves that name other rules.
    pub(crate) fn expand_unchecked(&self, root: usize, out: &mut Vec<u32>) {
        // (next R_B position, subtrees still open)
        let mut stack: Vec<(usize, usize)> = vec![(root + 1, 2)];
        while let Some(top) = stack.last_mut() {
            if top.1 == 0 {
                stack.pop();
                continue;
            }
            let pos = top.0;
            top.0 += 1;
            if self.shape.get(pos) {
                top.1 += 1;
                continue;
            }
            top.1 -= 1;
            match self.decode(self.leaf_raw(pos)) {
                Symbol::Terminal(t) => out.push(t),
                Symbol::NonTerminal(r) => stack.push((r + 1, 2)),
            }
        }
    }

    pub fn expand_symbol(&self, sym: Symbol) -> Result<Vec<u32>> {
        let mut out = Vec::new();
        self.expand_into(sym, &mut out)?;
        Ok(out)
    }

    /// Sum of the gaps a symbol expands to; terminals are their own sum.
    pub fn phrase_sum(&self, sym: Symbol) -> Result<u64> {
        match sym {
            Symbol::Terminal(t) => Ok(t as u64),
            Symbol::NonTerminal(p) => {
                if !self.skipping {
                    return Err(Error::Unsupported("phrase sums are only stored by the skipping grammar".into()));
                }
                self.check_nonterminal(p)?;
                Ok(self.sum_at(p))
            }
        }
    }

    /// `R_B` positions of every nonterminal.
    pub fn nonterminals(&self) -> impl Iterator<Item = usize> + '_ {
        self.shape.ones()
    }

    pub fn size_in_bytes(&self) -> usize {
        self.shape.size_in_bytes() + self.values.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.u64(self.max_terminal);
        w.u64(self.rules as u64);
        w.u8(self.skipping as u8);
        self.shape.write_to(w);
        self.values.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let max_terminal = r.u64()?;
        let rules = r.u64()? as usize;
        let skipping = r.u8()? != 0;
        let shape = BitVector::read_from(r)?;
        let values = IntVector::read_from(r)?;
        let expected = if skipping { shape.len() } else { shape.count_zeros() };
        if values.len() != expected || shape.count_ones() != rules {
            return Err(Error::Format("grammar R_S does not align with R_B".into()));
        }
        Ok(Self {
            shape,
            values,
            max_terminal,
            rules,
            skipping,
        })
    }
}

fn rule_sums(rules: &[(u64, u64)]) -> Vec<u64> {
    let mut sums = vec![0u64; rules.len()];
    let val = |s: u64, sums: &[u64]| {
        if RePairOutput::is_rule(s) {
            sums[RePairOutput::rule_index(s)]
        } else {
            s
        }
    };
    for (r, &(a, b)) in rules.iter().enumerate() {
        sums[r] = val(a, &sums) + val(b, &sums);
    }
    sums
}

/// The reduced sequence `C` with per-list pointers. Uncompressed lengths
/// live in the index directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedLists {
    seq: IntVector,
    starts: IntVector,
}

impl CompressedLists {
    pub fn len(&self) -> usize {
        self.starts.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries of `C` belonging to list `w` (0-based list index).
    pub fn span(&self, w: usize) -> std::ops::Range<usize> {
        self.starts.get(w) as usize..self.starts.get(w + 1) as usize
    }

    #[inline]
    pub fn raw(&self, i: usize) -> u64 {
        self.seq.get(i)
    }

    /// Total number of entries in `C` (n').
    pub fn c_len(&self) -> usize {
        self.seq.len()
    }

    pub fn sequence(&self) -> &IntVector {
        &self.seq
    }

    /// Gap list of `w` by expanding its span.
    pub fn expand_list(&self, g: &Grammar, w: usize, out: &mut Vec<u32>) {
        for i in self.span(w) {
            match g.decode(self.raw(i)) {
                Symbol::Terminal(t) => out.push(t),
                Symbol::NonTerminal(p) => g.expand_unchecked(p, out),
            }
        }
    }

    pub fn size_in_bytes(&self) -> usize {
        self.seq.size_in_bytes() + self.starts.size_in_bytes()
    }

    /// Bytes of the list pointers alone.
    pub fn directory_bytes(&self) -> usize {
        self.starts.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        self.seq.write_to(w);
        self.starts.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let seq = IntVector::read_from(r)?;
        let starts = IntVector::read_from(r)?;
        let monotone = (1..starts.len()).all(|i| starts.get(i - 1) <= starts.get(i));
        if starts.is_empty() || !monotone || starts.get(starts.len() - 1) as usize != seq.len() {
            return Err(Error::Format("compressed list pointers do not match C".into()));
        }
        Ok(Self { seq, starts })
    }
}

/// Compresses the gap lists (one per word, possibly empty) into `C` plus a
/// grammar, with or without phrase sums for skipping.
pub fn repair_compress(gap_lists: &[Vec<u32>], skipping: bool) -> (CompressedLists, Grammar) {
    let out = repair(gap_lists);
    let u = gap_lists.iter().flatten().copied().max().unwrap_or(0) as u64;
    let (grammar, pos_of) = Grammar::from_rules(&out.rules, u, skipping);
    let mut flat = Vec::with_capacity(out.sequences.iter().map(Vec::len).sum());
    let mut starts = Vec::with_capacity(gap_lists.len() + 1);
    for seq in &out.sequences {
        starts.push(flat.len() as u64);
        flat.extend(seq.iter().map(|&s| {
            if RePairOutput::is_rule(s) {
                u + pos_of[RePairOutput::rule_index(s)] as u64
            } else {
                s
            }
        }));
    }
    starts.push(flat.len() as u64);
    (
        CompressedLists {
            seq: IntVector::from_values(&flat),
            starts: IntVector::from_values(&starts),
        },
        grammar,
    )
}
