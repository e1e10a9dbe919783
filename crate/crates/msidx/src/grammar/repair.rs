//! Pair-replacement grammar compression over symbol sequences.
//!
//! [`repair_rounds`] repeatedly replaces a most frequent adjacent symbol
//! pair with a fresh non-terminal until no pair occurs twice. Frequency is
//! the number of adjacent positions holding the pair; replacement sweeps
//! occurrences left to right, skipping ones invalidated by an earlier
//! replacement in the same round. Ties on frequency break towards the
//! lexicographically smallest `(left, right)` symbol pair, which makes the
//! output grammar deterministic.
//!
//! The sequence lives in an array with tombstones and neighbor links; pair
//! counts are maintained exactly under edits, candidate positions are kept
//! per pair, and the current maximum is tracked with a lazy max-heap.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

const TOMB: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

struct Engine<'a, F: FnMut(u32, u32) -> u32> {
    syms: Vec<u32>,
    /// Next live position (or `len`), valid at live positions.
    next: Vec<u32>,
    /// Previous live position (or `NONE`), valid at live positions.
    prev: Vec<u32>,
    counts: HashMap<(u32, u32), usize>,
    occ: HashMap<(u32, u32), Vec<u32>>,
    heap: BinaryHeap<(usize, Reverse<(u32, u32)>)>,
    alloc: &'a mut F,
}

impl<F: FnMut(u32, u32) -> u32> Engine<'_, F> {
    fn bump(&mut self, pair: (u32, u32), pos: u32) {
        let c = self.counts.entry(pair).or_insert(0);
        *c += 1;
        self.occ.entry(pair).or_default().push(pos);
        if *c >= 2 {
            self.heap.push((*c, Reverse(pair)));
        }
    }

    fn drop_adjacency(&mut self, pair: (u32, u32)) {
        let c = self.counts.get_mut(&pair).expect("adjacency accounted");
        *c -= 1;
        if *c >= 2 {
            self.heap.push((*c, Reverse(pair)));
        }
    }

    /// Replaces every still-valid occurrence of `pair`; returns the count
    /// of replacements performed.
    fn replace_pair(&mut self, pair: (u32, u32)) -> usize {
        let (a, b) = pair;
        let fresh = (self.alloc)(a, b);
        let mut positions = self.occ.remove(&pair).unwrap_or_default();
        positions.sort_unstable();
        let mut done = 0usize;
        for pos in positions {
            let pos = pos as usize;
            if self.syms[pos] != a {
                continue;
            }
            let j = self.next[pos] as usize;
            if j >= self.syms.len() || self.syms[j] != b {
                continue;
            }
            // Adjacencies destroyed: (x, a), the pair itself, and (b, y).
            let x = self.prev[pos];
            let y = self.next[j];
            if x != NONE {
                self.drop_adjacency((self.syms[x as usize], a));
            }
            self.drop_adjacency(pair);
            if (y as usize) < self.syms.len() {
                self.drop_adjacency((b, self.syms[y as usize]));
            }
            // Substitute and relink.
            self.syms[pos] = fresh;
            self.syms[j] = TOMB;
            self.next[pos] = y;
            if (y as usize) < self.syms.len() {
                self.prev[y as usize] = pos as u32;
            }
            // Adjacencies created around the fresh symbol.
            if x != NONE {
                self.bump((self.syms[x as usize], fresh), x);
            }
            if (y as usize) < self.syms.len() {
                self.bump((fresh, self.syms[y as usize]), pos as u32);
            }
            done += 1;
        }
        debug_assert!(done > 0, "selected pair had no live occurrence");
        debug_assert_eq!(self.counts.get(&pair).copied().unwrap_or(0), 0);
        done
    }
}

/// Runs replacement rounds over `input`, allocating fresh non-terminals
/// through `alloc(left, right)`, and returns the irreducible top-level
/// sequence.
pub(crate) fn repair_rounds<F: FnMut(u32, u32) -> u32>(
    input: &[u32],
    alloc: &mut F,
) -> Vec<u32> {
    let len = input.len();
    if len < 2 {
        return input.to_vec();
    }
    let mut eng = Engine {
        syms: input.to_vec(),
        next: (1..=len as u32).collect(),
        prev: std::iter::once(NONE).chain(0..len as u32 - 1).collect(),
        counts: HashMap::new(),
        occ: HashMap::new(),
        heap: BinaryHeap::new(),
        alloc,
    };
    for i in 0..len - 1 {
        let pair = (input[i], input[i + 1]);
        let c = eng.counts.entry(pair).or_insert(0);
        *c += 1;
        eng.occ.entry(pair).or_default().push(i as u32);
    }
    for (&pair, &c) in &eng.counts {
        if c >= 2 {
            eng.heap.push((c, Reverse(pair)));
        }
    }

    while let Some((c, Reverse(pair))) = eng.heap.pop() {
        let cur = eng.counts.get(&pair).copied().unwrap_or(0);
        if cur != c || cur < 2 {
            continue;
        }
        eng.replace_pair(pair);
    }

    (0..len).filter(|&i| eng.syms[i] != TOMB).map(|i| eng.syms[i]).collect()
}
