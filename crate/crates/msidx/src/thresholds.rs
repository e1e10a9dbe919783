//! LCP thresholds between consecutive BWT runs of a character.
//!
//! For a row `q` that lies strictly between two runs of character `c`, the
//! better restart side (the nearest `c` above or below) is decided by
//! comparing longest common extensions. That comparison is precomputable:
//! within the LCP range separating the two runs there is a leftmost
//! minimum position `t`, and rows before `t` extend further with the run
//! above while rows at or past `t` do at least as well with the run below.
//! Storing one `t` per gap replaces both extension queries with a single
//! comparison against `q`.

use crate::rlbwt::RlBwt;
use crate::suffix::SuffixStructures;

/// One threshold row per gap between consecutive runs of each character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdTable {
    /// `per_char[c][g]` is the threshold for gap `g` of character `c`
    /// (between its g-th and (g+1)-th run, 0-based).
    per_char: Vec<Vec<usize>>,
}

impl ThresholdTable {
    /// Wraps precomputed rows; `per_char` must have one entry per byte.
    pub fn from_parts(per_char: Vec<Vec<usize>>) -> Result<ThresholdTable, String> {
        if per_char.len() != 256 {
            return Err(format!(
                "threshold table needs 256 character rows, got {}",
                per_char.len()
            ));
        }
        Ok(ThresholdTable { per_char })
    }

    /// Threshold row for gap `gap` of character `c`.
    pub fn threshold(&self, c: u8, gap: usize) -> usize {
        self.per_char[c as usize][gap]
    }

    /// Number of gaps recorded for `c` (its run count minus one).
    pub fn gaps(&self, c: u8) -> usize {
        self.per_char[c as usize].len()
    }

    /// Raw rows, for serialization.
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.per_char
    }
}

/// Computes thresholds from the full LCP array at build time.
///
/// For each pair of consecutive runs of `c`, ending at row `e` and
/// starting at row `s`, the threshold is the leftmost position of the
/// minimum of `LCP[e+1..=s]`.
pub fn build_thresholds(ss: &SuffixStructures, rlbwt: &RlBwt) -> ThresholdTable {
    let mut per_char = vec![Vec::new(); 256];
    for c in 0..256usize {
        let crs = &rlbwt.per_char_runs[c];
        if crs.len() < 2 {
            continue;
        }
        let mut rows = Vec::with_capacity(crs.len() - 1);
        for pair in crs.windows(2) {
            let e = pair[0].start + pair[0].len - 1;
            let s = pair[1].start;
            let mut best = e + 1;
            for i in e + 2..=s {
                if ss.lcp[i] < ss.lcp[best] {
                    best = i;
                }
            }
            rows.push(best);
        }
        per_char[c] = rows;
    }
    ThresholdTable { per_char }
}
