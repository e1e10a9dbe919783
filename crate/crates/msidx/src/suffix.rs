//! Full suffix structures and brute-force oracles.
//!
//! [`SuffixStructures`] holds the plain suffix array, its inverse, the LCP
//! and permuted LCP arrays and the BWT of a text. These arrays are only
//! materialized at build time; the compressed index keeps none of them.
//!
//! The `oracle_*` functions are deliberately naive reference
//! implementations used to cross-check the compressed structures in tests.

use crate::text::{MsEntry, Pattern, Text};

/// Uncompressed suffix structures of a sentinel-terminated text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixStructures {
    /// `sa[k]` is the start of the k-th smallest suffix.
    pub sa: Vec<usize>,
    /// `isa[p]` is the lexicographic rank of the suffix starting at `p`.
    pub isa: Vec<usize>,
    /// `lcp[k]` is the longest common prefix of suffixes `sa[k-1]` and
    /// `sa[k]`; `lcp[0] = 0`.
    pub lcp: Vec<usize>,
    /// `plcp[p] = lcp[isa[p]]`, the LCP array in text order.
    pub plcp: Vec<usize>,
    /// `bwt[k] = text[sa[k] - 1]`, wrapping to the sentinel at `sa[k] = 0`.
    pub bwt: Vec<u8>,
}

impl SuffixStructures {
    /// Builds all arrays for `text`.
    ///
    /// The suffix array is computed by prefix doubling with radix keys,
    /// `O(n log n)` rounds of sorting; LCP by Kasai's algorithm.
    pub fn build(text: &Text) -> SuffixStructures {
        let s = &text.bytes;
        let n = s.len();
        debug_assert!(n >= 2);
        debug_assert_eq!(*s.last().unwrap(), crate::text::SENTINEL);

        let sa = suffix_array(s);
        let mut isa = vec![0usize; n];
        for (k, &p) in sa.iter().enumerate() {
            isa[p] = k;
        }
        let lcp = lcp_kasai(s, &sa, &isa);
        let mut plcp = vec![0usize; n];
        for p in 0..n {
            plcp[p] = lcp[isa[p]];
        }
        let mut bwt = vec![0u8; n];
        for (k, &p) in sa.iter().enumerate() {
            bwt[k] = if p == 0 { s[n - 1] } else { s[p - 1] };
        }
        SuffixStructures { sa, isa, lcp, plcp, bwt }
    }
}

fn suffix_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<u64> = s.iter().map(|&b| b as u64).collect();
    let mut tmp = vec![0u64; n];
    let mut k = 1usize;
    loop {
        let key = |i: usize| -> u64 {
            let hi = rank[i] + 1;
            let lo = if i + k < n { rank[i + k] + 1 } else { 0 };
            (hi << 32) | lo
        };
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0]] = 0;
        for j in 1..n {
            tmp[sa[j]] = tmp[sa[j - 1]] + u64::from(key(sa[j]) != key(sa[j - 1]));
        }
        rank.copy_from_slice(&tmp);
        if rank[sa[n - 1]] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

fn lcp_kasai(s: &[u8], sa: &[usize], isa: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for p in 0..n {
        let r = isa[p];
        if r > 0 {
            let q = sa[r - 1];
            while p + h < n && q + h < n && s[p + h] == s[q + h] {
                h += 1;
            }
            lcp[r] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// Brute-force matching statistics by exhaustive substring search.
///
/// For every pattern position `i` the entry holds the length of the longest
/// prefix of `pattern[i..]` occurring in the text (sentinel excluded) and
/// the smallest occurrence position, or [`MsEntry::ABSENT`] when even the
/// single character is absent.
pub fn oracle_ms(text: &Text, pattern: &Pattern) -> Vec<MsEntry> {
    let s = &text.bytes;
    let n = s.len();
    let p = &pattern.bytes;
    let m = p.len();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut best_len = 0usize;
        let mut best_pos = None;
        for t in 0..n - 1 {
            let mut l = 0usize;
            while i + l < m && t + l < n - 1 && p[i + l] == s[t + l] {
                l += 1;
            }
            if l > best_len {
                best_len = l;
                best_pos = Some(t);
            }
        }
        out.push(match best_pos {
            Some(pos) => MsEntry::new(pos, best_len),
            None => MsEntry::ABSENT,
        });
    }
    out
}

/// Longest common extension of the suffixes at `i` and `j` by direct scan.
///
/// Both arguments must be `< n`; the sentinel participates, so
/// `oracle_lce(i, i) = n - i`.
pub fn oracle_lce(text: &Text, i: usize, j: usize) -> usize {
    let s = &text.bytes;
    let n = s.len();
    assert!(i < n && j < n);
    let mut l = 0usize;
    while i + l < n && j + l < n && s[i + l] == s[j + l] {
        l += 1;
    }
    l
}

/// All occurrence positions of `needle` in the text, ascending.
///
/// The needle must be sentinel-free; matches never cover the sentinel.
pub fn oracle_occurrences(text: &Text, needle: &[u8]) -> Vec<usize> {
    let s = &text.bytes;
    let n = s.len();
    let l = needle.len();
    if l == 0 || l > n - 1 {
        return Vec::new();
    }
    (0..n - l)
        .filter(|&t| &s[t..t + l] == needle)
        .collect()
}
