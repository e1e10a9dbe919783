//! Run-length encoded BWT with suffix-array samples at run boundaries.
//!
//! The BWT is stored as its run heads plus run lengths; rank, select and LF
//! are answered with binary searches over plain sorted arrays. For every
//! run the suffix-array values at its first and last position are kept, so
//! `SA` can be read at any run boundary without the full array.

use crate::suffix::SuffixStructures;

/// Query failure on the run-length BWT.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RlBwtError {
    #[error("select({ch}, {k}) out of range: character has {total} occurrences")]
    RankOutOfRange { ch: u8, k: usize, total: usize },
    #[error("position {pos} is not a run boundary")]
    NotABoundary { pos: usize },
    #[error("character 0x{ch:02x} does not occur in the BWT")]
    BothNone { ch: u8 },
    #[error("invalid run encoding: {0}")]
    Malformed(String),
}

/// One run of a single character within the BWT of one specific character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharRun {
    /// Index of the run in global run order.
    pub run_id: usize,
    /// BWT position of the run head.
    pub start: usize,
    pub len: usize,
    /// Occurrences of the character in all earlier runs.
    pub cum_before: usize,
}

/// Run-length BWT with boundary SA samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlBwt {
    /// `(character, length)` per run, in BWT order.
    pub runs: Vec<(u8, usize)>,
    /// BWT position of each run head; strictly increasing, starts at 0.
    pub run_starts: Vec<usize>,
    /// Runs of each character with cumulative occurrence counts.
    pub per_char_runs: Vec<Vec<CharRun>>,
    /// `char_totals[c]` counts BWT characters smaller than `c`.
    pub char_totals: Vec<usize>,
    /// `sa_samples_start[k] = SA[run_starts[k]]`.
    pub sa_samples_start: Vec<usize>,
    /// `sa_samples_end[k] = SA[run_starts[k] + runs[k].1 - 1]`.
    pub sa_samples_end: Vec<usize>,
    /// Total BWT length `n`.
    pub n: usize,
}

impl RlBwt {
    /// Encodes the BWT of `ss` and samples SA at every run boundary.
    pub fn from_suffix_structures(ss: &SuffixStructures) -> RlBwt {
        let bwt = &ss.bwt;
        let n = bwt.len();
        let mut runs = Vec::new();
        let mut sa_samples_start = Vec::new();
        let mut sa_samples_end = Vec::new();
        let mut i = 0usize;
        while i < n {
            let c = bwt[i];
            let mut j = i + 1;
            while j < n && bwt[j] == c {
                j += 1;
            }
            runs.push((c, j - i));
            sa_samples_start.push(ss.sa[i]);
            sa_samples_end.push(ss.sa[j - 1]);
            i = j;
        }
        Self::assemble(runs, sa_samples_start, sa_samples_end)
    }

    /// Rebuilds the structure from its serialized pieces.
    ///
    /// Only structural invariants can be checked here: maximal runs,
    /// positive lengths, matching sample counts, samples in range.
    pub fn from_parts(
        runs: Vec<(u8, usize)>,
        sa_samples_start: Vec<usize>,
        sa_samples_end: Vec<usize>,
    ) -> Result<RlBwt, RlBwtError> {
        if runs.is_empty() {
            return Err(RlBwtError::Malformed("no runs".into()));
        }
        if sa_samples_start.len() != runs.len() || sa_samples_end.len() != runs.len() {
            return Err(RlBwtError::Malformed("sample count mismatch".into()));
        }
        if runs.iter().any(|&(_, len)| len == 0) {
            return Err(RlBwtError::Malformed("empty run".into()));
        }
        if runs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(RlBwtError::Malformed("adjacent runs share a character".into()));
        }
        let n: usize = runs.iter().map(|&(_, len)| len).sum();
        if sa_samples_start
            .iter()
            .chain(&sa_samples_end)
            .any(|&s| s >= n)
        {
            return Err(RlBwtError::Malformed("sample out of range".into()));
        }
        Ok(Self::assemble(runs, sa_samples_start, sa_samples_end))
    }

    fn assemble(
        runs: Vec<(u8, usize)>,
        sa_samples_start: Vec<usize>,
        sa_samples_end: Vec<usize>,
    ) -> RlBwt {
        let mut run_starts = Vec::with_capacity(runs.len());
        let mut per_char_runs: Vec<Vec<CharRun>> = vec![Vec::new(); 256];
        let mut occ_so_far = [0usize; 256];
        let mut start = 0usize;
        for (run_id, &(c, len)) in runs.iter().enumerate() {
            run_starts.push(start);
            per_char_runs[c as usize].push(CharRun {
                run_id,
                start,
                len,
                cum_before: occ_so_far[c as usize],
            });
            occ_so_far[c as usize] += len;
            start += len;
        }
        let n = start;

        let mut char_totals = vec![0usize; 257];
        for c in 0..256 {
            char_totals[c + 1] = char_totals[c] + occ_so_far[c];
        }
        char_totals.truncate(256);

        RlBwt {
            runs,
            run_starts,
            per_char_runs,
            char_totals,
            sa_samples_start,
            sa_samples_end,
            n,
        }
    }

    /// Number of runs `r`.
    pub fn num_runs(&self) -> usize {
        self.runs.len()
    }

    /// Total occurrences of `c` in the BWT.
    pub fn total(&self, c: u8) -> usize {
        self.per_char_runs[c as usize]
            .last()
            .map_or(0, |cr| cr.cum_before + cr.len)
    }

    /// Index of the run containing BWT position `pos`.
    pub fn run_of(&self, pos: usize) -> usize {
        debug_assert!(pos < self.n);
        self.run_starts.partition_point(|&s| s <= pos) - 1
    }

    /// The BWT character at `pos`.
    pub fn char_at(&self, pos: usize) -> u8 {
        self.runs[self.run_of(pos)].0
    }

    /// Occurrences of `c` in `BWT[0..=y]` (inclusive of `y`).
    pub fn rank(&self, c: u8, y: usize) -> usize {
        debug_assert!(y < self.n);
        let crs = &self.per_char_runs[c as usize];
        let idx = crs.partition_point(|cr| cr.start <= y);
        if idx == 0 {
            return 0;
        }
        let cr = &crs[idx - 1];
        cr.cum_before + (y - cr.start + 1).min(cr.len)
    }

    /// Position of the k-th occurrence of `c`, 1-based.
    pub fn select(&self, c: u8, k: usize) -> Result<usize, RlBwtError> {
        let total = self.total(c);
        if k == 0 || k > total {
            return Err(RlBwtError::RankOutOfRange { ch: c, k, total });
        }
        let crs = &self.per_char_runs[c as usize];
        let idx = crs.partition_point(|cr| cr.cum_before + cr.len < k);
        let cr = &crs[idx];
        Ok(cr.start + (k - 1 - cr.cum_before))
    }

    /// The LF step: row of the suffix one position earlier in the text.
    pub fn lf(&self, q: usize) -> usize {
        let c = self.char_at(q);
        self.char_totals[c as usize] + self.rank(c, q) - 1
    }

    /// SA value at a run boundary.
    ///
    /// `q` must be the first or last position of its run; interior
    /// positions are not sampled.
    pub fn sa_at_boundary(&self, q: usize) -> Result<usize, RlBwtError> {
        let k = self.run_of(q);
        let start = self.run_starts[k];
        let len = self.runs[k].1;
        if q == start {
            Ok(self.sa_samples_start[k])
        } else if q == start + len - 1 {
            Ok(self.sa_samples_end[k])
        } else {
            Err(RlBwtError::NotABoundary { pos: q })
        }
    }

    /// Nearest occurrences of `c` strictly around `q` when `BWT[q] != c`.
    ///
    /// Returns `(pred, succ)`: the last copy of `c` before `q` (always a
    /// run end when present) and the first copy after `q` (a run start).
    /// Fails with [`RlBwtError::BothNone`] when `c` is absent entirely.
    pub fn pred_succ_occurrence(
        &self,
        c: u8,
        q: usize,
    ) -> Result<(Option<usize>, Option<usize>), RlBwtError> {
        debug_assert_ne!(self.char_at(q), c);
        let total = self.total(c);
        if total == 0 {
            return Err(RlBwtError::BothNone { ch: c });
        }
        let k = self.rank(c, q);
        let pred = if k > 0 { Some(self.select(c, k).unwrap()) } else { None };
        let succ = if k < total { Some(self.select(c, k + 1).unwrap()) } else { None };
        debug_assert!(pred.map_or(true, |p| {
            let r = self.run_of(p);
            p == self.run_starts[r] + self.runs[r].1 - 1
        }));
        debug_assert!(succ.map_or(true, |s| {
            let r = self.run_of(s);
            s == self.run_starts[r]
        }));
        Ok((pred, succ))
    }

    /// Index of the gap between consecutive runs of `c` that contains `q`.
    ///
    /// Gap `g` lies between the g-th and (g+1)-th run of `c` (0-based).
    /// Returns `None` when `q` is not strictly between two runs of `c`,
    /// which includes the case `BWT[q] == c`.
    pub fn run_gap_index(&self, c: u8, q: usize) -> Option<usize> {
        if self.char_at(q) == c {
            return None;
        }
        let crs = &self.per_char_runs[c as usize];
        // No run of `c` contains q, so every run starting at or before q
        // also ends before it.
        let idx = crs.partition_point(|cr| cr.start < q);
        if idx == 0 || idx == crs.len() {
            None
        } else {
            Some(idx - 1)
        }
    }
}
