//! Occurrence listing through the φ and φ⁻¹ maps.
//!
//! φ(p) is the text position of the suffix lexicographically preceding
//! the suffix at `p`; φ⁻¹ is its inverse. Both are piecewise linear
//! between suffix-array samples taken at run boundaries, so a predecessor
//! search over the sampled positions plus an additive offset answers them
//! in sampled space. Permuted LCP values are derived on demand as grammar
//! extensions against the φ neighbor, and occurrence listing walks both
//! maps outward from one known occurrence while the shared extension
//! stays long enough.

use crate::grammar::Slp;
use crate::rlbwt::RlBwt;
use crate::suffix::SuffixStructures;
use crate::text::MsEntry;

/// Suffix-array samples at run boundaries, keyed by text position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocateSamples {
    /// `(SA[q], SA[q-1])` for every run start `q`, sorted by the first
    /// component; the target is `None` for `q = 0`.
    pred_points: Vec<(usize, Option<usize>)>,
    /// `(SA[q], SA[q+1])` for every run end `q`, sorted likewise; the
    /// target is `None` for the last row.
    succ_points: Vec<(usize, Option<usize>)>,
    n: usize,
}

impl LocateSamples {
    /// Collects the boundary samples of `rlbwt`, resolving targets
    /// against the full suffix array (build time only).
    pub fn build(ss: &SuffixStructures, rlbwt: &RlBwt) -> LocateSamples {
        let n = rlbwt.n;
        let mut pred_points = Vec::with_capacity(rlbwt.num_runs());
        let mut succ_points = Vec::with_capacity(rlbwt.num_runs());
        for (k, &start) in rlbwt.run_starts.iter().enumerate() {
            let end = start + rlbwt.runs[k].1 - 1;
            let pred_target = if start > 0 { Some(ss.sa[start - 1]) } else { None };
            pred_points.push((ss.sa[start], pred_target));
            let succ_target = if end + 1 < n { Some(ss.sa[end + 1]) } else { None };
            succ_points.push((ss.sa[end], succ_target));
        }
        pred_points.sort_unstable();
        succ_points.sort_unstable();
        LocateSamples { pred_points, succ_points, n }
    }

    /// Rebuilds from serialized points; both lists must be sorted with
    /// distinct keys below `n`.
    pub fn from_parts(
        pred_points: Vec<(usize, Option<usize>)>,
        succ_points: Vec<(usize, Option<usize>)>,
        n: usize,
    ) -> Result<LocateSamples, String> {
        for (name, points) in [("pred", &pred_points), ("succ", &succ_points)] {
            if points.is_empty() {
                return Err(format!("{name} sample list is empty"));
            }
            if points.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(format!("{name} samples not strictly sorted"));
            }
            if points
                .iter()
                .any(|&(p, t)| p >= n || t.is_some_and(|t| t >= n))
            {
                return Err(format!("{name} sample out of range"));
            }
        }
        Ok(LocateSamples { pred_points, succ_points, n })
    }

    /// Text length `n`.
    pub fn text_len(&self) -> usize {
        self.n
    }

    /// Sample points backing φ, for serialization.
    pub fn pred_points(&self) -> &[(usize, Option<usize>)] {
        &self.pred_points
    }

    /// Sample points backing φ⁻¹, for serialization.
    pub fn succ_points(&self) -> &[(usize, Option<usize>)] {
        &self.succ_points
    }

    fn map(points: &[(usize, Option<usize>)], p: usize, n: usize) -> Option<usize> {
        let idx = points.partition_point(|&(key, _)| key <= p);
        let (key, target) = if idx > 0 {
            points[idx - 1]
        } else {
            // Wrap to the largest sample across the permutation seam.
            // Unreachable in practice: the sentinel row is a singleton
            // run, so position 0 is always sampled on both sides.
            points[points.len() - 1]
        };
        let offset = if key <= p { p - key } else { p + n - key };
        target.map(|t| (t + offset) % n)
    }

    /// φ(p): position of the lexicographically preceding suffix, `None`
    /// for the lexicographically smallest one.
    pub fn phi(&self, p: usize) -> Option<usize> {
        debug_assert!(p < self.n);
        Self::map(&self.pred_points, p, self.n)
    }

    /// φ⁻¹(p): position of the lexicographically following suffix, `None`
    /// for the lexicographically largest one.
    pub fn phi_inv(&self, p: usize) -> Option<usize> {
        debug_assert!(p < self.n);
        Self::map(&self.succ_points, p, self.n)
    }
}

/// Occurrence listing: φ/φ⁻¹ samples combined with grammar extensions.
#[derive(Debug, Clone, Copy)]
pub struct Locator<'a> {
    samples: &'a LocateSamples,
    slp: &'a Slp,
}

impl<'a> Locator<'a> {
    pub fn new(samples: &'a LocateSamples, slp: &'a Slp) -> Locator<'a> {
        debug_assert_eq!(samples.text_len(), slp.text_len());
        Locator { samples, slp }
    }

    /// φ(p); see [`LocateSamples::phi`].
    pub fn phi(&self, p: usize) -> Option<usize> {
        self.samples.phi(p)
    }

    /// φ⁻¹(p); see [`LocateSamples::phi_inv`].
    pub fn phi_inv(&self, p: usize) -> Option<usize> {
        self.samples.phi_inv(p)
    }

    /// Permuted LCP: shared prefix length of the suffixes at `p` and
    /// φ(p), zero for the lexicographically smallest suffix.
    pub fn plcp(&self, p: usize) -> usize {
        match self.samples.phi(p) {
            None => 0,
            Some(prev) => self.slp.lce(p, prev),
        }
    }

    /// All starting positions of the length-`len` window at `start`,
    /// in ascending text order.
    ///
    /// `start` must be one known occurrence (typically a matching
    /// statistics witness).
    pub fn occurrences(&self, start: usize, len: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.iter_occurrences(start, len).collect();
        out.sort_unstable();
        out
    }

    /// Lazily enumerates the occurrences of the window at `start` in
    /// suffix-array order outward from `start` itself.
    pub fn iter_occurrences(&self, start: usize, len: usize) -> OccurrenceIter<'a> {
        OccurrenceIter {
            samples: self.samples,
            slp: self.slp,
            len,
            up: Some(start),
            down: Some(start),
            emit_start: Some(start),
        }
    }

    /// Occurrences of the pattern window `P[i..=j]` given the matching
    /// statistics of `P`; empty when that window does not occur.
    pub fn locate(&self, entries: &[MsEntry], i: usize, j: usize) -> Vec<usize> {
        assert!(i <= j && j < entries.len(), "window out of range");
        let want = j - i + 1;
        if entries[i].len < want {
            return Vec::new();
        }
        let start = entries[i].pos.expect("nonzero length carries a witness");
        self.occurrences(start, want)
    }
}

/// Iterator behind [`Locator::iter_occurrences`].
#[derive(Debug)]
pub struct OccurrenceIter<'a> {
    samples: &'a LocateSamples,
    slp: &'a Slp,
    len: usize,
    /// Last emitted position on the φ walk, `None` once exhausted.
    up: Option<usize>,
    /// Last emitted position on the φ⁻¹ walk.
    down: Option<usize>,
    emit_start: Option<usize>,
}

impl Iterator for OccurrenceIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if let Some(start) = self.emit_start.take() {
            return Some(start);
        }
        // Walk up in suffix-array order first, then down; each neighbor
        // qualifies while its shared extension covers the window.
        if let Some(cur) = self.up {
            match self.samples.phi(cur) {
                Some(prev) if self.slp.lce(cur, prev) >= self.len => {
                    self.up = Some(prev);
                    return Some(prev);
                }
                _ => self.up = None,
            }
        }
        if let Some(cur) = self.down {
            match self.samples.phi_inv(cur) {
                Some(next) if self.slp.lce(cur, next) >= self.len => {
                    self.down = Some(next);
                    return Some(next);
                }
                _ => self.down = None,
            }
        }
        None
    }
}
