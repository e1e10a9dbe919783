//! Grammar self-index: parse, compress, assemble.
//!
//! [`build_slp`] turns a text into a straight-line program in two
//! compression levels. The text is first split into overlapping phrases by
//! prefix-free parsing; pair replacement then runs over the concatenated
//! distinct phrases (kept apart by unique separators) and again over the
//! phrase occurrence sequence, and the results are stitched together with
//! left-to-right chain rules. Overlaps and padding are trimmed by
//! decomposing phrase subtrees, so the final root expands to the text
//! exactly once. Unreachable rules are collected before the grammar is
//! returned.

mod pfp;
mod repair;
mod slp;

pub use pfp::{pfp_parse, reconstruct_padded, PfpOutput, KR_BASE, KR_MODULUS};
pub use slp::{LceStats, Slp, SlpError, SlpReader, SlpRule};

use std::collections::HashMap;

use crate::text::Text;
use repair::repair_rounds;

/// First symbol id reserved for phrase separators during dictionary
/// compression; real rule ids stay below it.
const SEP_BASE: u32 = 1 << 31;

struct SlpBuilder {
    rules: Vec<SlpRule>,
    exp_len: Vec<usize>,
    byte_id: [u32; 256],
    pair_index: HashMap<(u32, u32), u32>,
}

impl SlpBuilder {
    fn new() -> SlpBuilder {
        SlpBuilder {
            rules: Vec::new(),
            exp_len: Vec::new(),
            byte_id: [u32::MAX; 256],
            pair_index: HashMap::new(),
        }
    }

    fn terminal(&mut self, b: u8) -> u32 {
        if self.byte_id[b as usize] == u32::MAX {
            self.byte_id[b as usize] = self.push(SlpRule::Terminal(b), 1);
        }
        self.byte_id[b as usize]
    }

    fn push(&mut self, rule: SlpRule, len: usize) -> u32 {
        let id = self.rules.len() as u32;
        assert!(id < SEP_BASE, "rule space exhausted");
        self.rules.push(rule);
        self.exp_len.push(len);
        id
    }

    /// Allocates a new pair rule unconditionally (replacement rounds need
    /// symbols with no prior occurrences).
    fn fresh_pair(&mut self, l: u32, r: u32) -> u32 {
        let len = self.exp_len[l as usize] + self.exp_len[r as usize];
        let id = self.push(SlpRule::Pair(l, r), len);
        self.pair_index.entry((l, r)).or_insert(id);
        id
    }

    /// Reuses an existing rule for `(l, r)` when one exists; identical
    /// chain steps then share ids, which also helps LCE skipping.
    fn chain_pair(&mut self, l: u32, r: u32) -> u32 {
        match self.pair_index.get(&(l, r)) {
            Some(&id) => id,
            None => self.fresh_pair(l, r),
        }
    }

    /// Chains symbols left to right into a single covering rule.
    fn chain(&mut self, syms: &[u32]) -> u32 {
        assert!(!syms.is_empty());
        let mut acc = syms[0];
        for &s in &syms[1..] {
            acc = self.chain_pair(acc, s);
        }
        acc
    }

    /// Symbols covering `expansion(sym)[off..]`, left to right.
    fn suffix_symbols(&self, sym: u32, mut off: usize) -> Vec<u32> {
        debug_assert!(off < self.exp_len[sym as usize]);
        let mut pending = Vec::new();
        let mut cur = sym;
        while off > 0 {
            match self.rules[cur as usize] {
                SlpRule::Pair(l, r) => {
                    let ll = self.exp_len[l as usize];
                    if off < ll {
                        pending.push(r);
                        cur = l;
                    } else {
                        off -= ll;
                        cur = r;
                    }
                }
                SlpRule::Terminal(_) => unreachable!("offset inside a terminal"),
            }
        }
        let mut out = vec![cur];
        out.extend(pending.into_iter().rev());
        out
    }

    /// Symbols covering `expansion(sym)[..len]`, left to right.
    fn prefix_symbols(&self, sym: u32, mut len: usize) -> Vec<u32> {
        debug_assert!(len >= 1 && len <= self.exp_len[sym as usize]);
        let mut out = Vec::new();
        let mut cur = sym;
        loop {
            if len == self.exp_len[cur as usize] {
                out.push(cur);
                return out;
            }
            match self.rules[cur as usize] {
                SlpRule::Pair(l, r) => {
                    let ll = self.exp_len[l as usize];
                    if len >= ll {
                        out.push(l);
                        len -= ll;
                        cur = r;
                    } else {
                        cur = l;
                    }
                }
                SlpRule::Terminal(_) => unreachable!("len below terminal size"),
            }
        }
    }

    /// Cover of a symbol sequence with `front` and `back` characters
    /// trimmed off; empty when nothing remains.
    fn trim_cover(&self, seq: &[u32], front: usize, back: usize) -> Vec<u32> {
        let total: usize = seq.iter().map(|&s| self.exp_len[s as usize]).sum();
        debug_assert!(total >= front + back);
        let keep = total - front - back;
        if keep == 0 {
            return Vec::new();
        }
        let mut i = 0usize;
        let mut f = front;
        while f > 0 && f >= self.exp_len[seq[i] as usize] {
            f -= self.exp_len[seq[i] as usize];
            i += 1;
        }
        let mut cover = Vec::new();
        if f > 0 {
            cover.extend(self.suffix_symbols(seq[i], f));
            i += 1;
        }
        cover.extend_from_slice(&seq[i..]);
        let mut out = Vec::new();
        let mut rem = keep;
        for &s in &cover {
            if rem == 0 {
                break;
            }
            let el = self.exp_len[s as usize];
            if el <= rem {
                out.push(s);
                rem -= el;
            } else {
                out.extend(self.prefix_symbols(s, rem));
                rem = 0;
            }
        }
        debug_assert_eq!(rem, 0);
        out
    }
}

/// Output of standalone pair compression over a symbol sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairCompression {
    /// Pair rules in creation order as `(id, left, right)`; replacement
    /// rules first, chain rules after them.
    pub rules: Vec<(u32, u32, u32)>,
    /// Rule covering the whole input sequence.
    pub root: u32,
    /// Irreducible sequence left after replacement rounds.
    pub sequence: Vec<u32>,
}

/// Compresses a non-empty symbol sequence by repeated pair replacement,
/// then chains the remaining sequence left to right into a root.
///
/// Input symbols must be `< base`; new rule ids are assigned upwards from
/// `base`.
pub fn repair_compress(input: &[u32], base: u32) -> RepairCompression {
    assert!(!input.is_empty());
    debug_assert!(input.iter().all(|&s| s < base));
    let mut rules: Vec<(u32, u32, u32)> = Vec::new();
    let mut lens: HashMap<u32, usize> = HashMap::new();
    let len_of = |lens: &HashMap<u32, usize>, s: u32| lens.get(&s).copied().unwrap_or(1);
    let mut next = base;
    let mut alloc = |l: u32, r: u32| {
        let id = next;
        next += 1;
        rules.push((id, l, r));
        id
    };
    let sequence = repair_rounds(input, &mut alloc);
    for &(id, l, r) in &rules {
        let v = len_of(&lens, l) + len_of(&lens, r);
        lens.insert(id, v);
    }
    let mut dedupe: HashMap<(u32, u32), u32> = rules
        .iter()
        .map(|&(id, l, r)| ((l, r), id))
        .collect();
    let mut root = sequence[0];
    for &s in &sequence[1..] {
        root = *dedupe.entry((root, s)).or_insert_with(|| {
            let id = next;
            next += 1;
            rules.push((id, root, s));
            id
        });
    }
    RepairCompression { rules, root, sequence }
}

/// Builds the grammar for `text` with parsing parameters `w` and `p`.
///
/// The result expands to the text exactly (sentinel included, padding
/// trimmed) and every rule is reachable from the root.
pub fn build_slp(text: &Text, w: usize, p: usize) -> Slp {
    let pfp = pfp_parse(text, w, p);
    build_slp_from_pfp(text, &pfp)
}

/// Assembles the grammar from an existing parse of `text`.
pub fn build_slp_from_pfp(text: &Text, pfp: &PfpOutput) -> Slp {
    let w = pfp.window;
    let mut b = SlpBuilder::new();

    // Level one: compress the distinct phrases jointly. Unique separators
    // keep phrase boundaries intact because no pair containing one can
    // repeat.
    let mut dict_seq = Vec::new();
    for (di, phrase) in pfp.dictionary.iter().enumerate() {
        for &byte in phrase {
            dict_seq.push(b.terminal(byte));
        }
        dict_seq.push(SEP_BASE + di as u32);
    }
    let out = {
        let mut alloc = |l: u32, r: u32| b.fresh_pair(l, r);
        repair_rounds(&dict_seq, &mut alloc)
    };
    let mut phrase_seqs: Vec<Vec<u32>> = Vec::with_capacity(pfp.dictionary.len());
    let mut cur = Vec::new();
    for s in out {
        if s >= SEP_BASE {
            phrase_seqs.push(std::mem::take(&mut cur));
        } else {
            cur.push(s);
        }
    }
    debug_assert!(cur.is_empty());
    debug_assert_eq!(phrase_seqs.len(), pfp.dictionary.len());
    for (d, seq) in phrase_seqs.iter().enumerate() {
        let total: usize = seq.iter().map(|&s| b.exp_len[s as usize]).sum();
        debug_assert_eq!(total, pfp.dictionary[d].len());
        let _ = (d, total);
    }

    // Level two: every phrase occurrence contributes its phrase without
    // the leading w-character overlap; for the first occurrence that strip
    // removes exactly the left padding. The last occurrence also drops the
    // right padding.
    let k = pfp.parse.len();
    let mut front_trimmed: Vec<Option<u32>> = vec![None; pfp.dictionary.len()];
    let mut parse_seq = Vec::with_capacity(k);
    for (idx, &d) in pfp.parse.iter().enumerate() {
        if idx + 1 < k {
            let sym = match front_trimmed[d] {
                Some(sym) => sym,
                None => {
                    let cover = b.trim_cover(&phrase_seqs[d], w, 0);
                    let sym = b.chain(&cover);
                    front_trimmed[d] = Some(sym);
                    sym
                }
            };
            parse_seq.push(sym);
        } else {
            let cover = b.trim_cover(&phrase_seqs[d], w, w);
            if !cover.is_empty() {
                parse_seq.push(b.chain(&cover));
            }
        }
    }
    assert!(!parse_seq.is_empty(), "text reduced to padding only");

    let final_seq = {
        let mut alloc = |l: u32, r: u32| b.fresh_pair(l, r);
        repair_rounds(&parse_seq, &mut alloc)
    };
    let root = b.chain(&final_seq);

    let (rules, root, top_seq) = collect_reachable(b.rules, root, final_seq);
    let slp = Slp::from_parts(rules, root, top_seq).expect("assembled grammar is valid");
    debug_assert_eq!(slp.text_len(), text.len());
    slp
}

/// Drops rules unreachable from the root and renumbers the rest,
/// preserving order (children stay below parents).
fn collect_reachable(
    rules: Vec<SlpRule>,
    root: u32,
    top_seq: Vec<u32>,
) -> (Vec<SlpRule>, u32, Vec<u32>) {
    let mut keep = vec![false; rules.len()];
    let mut stack = vec![root];
    while let Some(s) = stack.pop() {
        if keep[s as usize] {
            continue;
        }
        keep[s as usize] = true;
        if let SlpRule::Pair(l, r) = rules[s as usize] {
            stack.push(l);
            stack.push(r);
        }
    }
    debug_assert!(top_seq.iter().all(|&s| keep[s as usize]));
    let mut remap = vec![u32::MAX; rules.len()];
    let mut new_rules = Vec::with_capacity(keep.iter().filter(|&&k| k).count());
    for (i, rule) in rules.into_iter().enumerate() {
        if !keep[i] {
            continue;
        }
        remap[i] = new_rules.len() as u32;
        new_rules.push(match rule {
            SlpRule::Terminal(b) => SlpRule::Terminal(b),
            SlpRule::Pair(l, r) => {
                SlpRule::Pair(remap[l as usize], remap[r as usize])
            }
        });
    }
    let new_top = top_seq.iter().map(|&s| remap[s as usize]).collect();
    (new_rules, remap[root as usize], new_top)
}
