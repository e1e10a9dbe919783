//! Matching statistics over the run-length BWT with grammar extensions.
//!
//! The main routine walks the pattern right to left while maintaining one
//! BWT row `q` whose suffix starts at the current match position. When the
//! BWT character at `q` equals the next pattern character the match grows
//! by a plain LF step. Otherwise the walk restarts at the nearest copy of
//! that character above or below `q`; both candidates sit on run
//! boundaries, so their suffix-array values are sampled and the better one
//! is picked by comparing longest common extensions on the grammar.
//!
//! Besides the one-pass algorithm with selectable LCE strategies
//! ([`Variant`]), this module contains a two-pass variant that replaces
//! extension queries with precomputed thresholds and recovers lengths by
//! sequential text reads, a push-based [`StreamSession`] over an index of
//! the reversed text, and maximal exact match extraction.

use crate::grammar::{LceStats, Slp};
use crate::rlbwt::RlBwt;
use crate::text::{MsEntry, Pattern, RECORD_SEP, SENTINEL};
use crate::thresholds::ThresholdTable;

/// LCE strategy used on mismatches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Grammar extensions that skip shared subtrees.
    Std,
    /// Grammar extensions decompressed character by character; same calls
    /// as [`Variant::Std`], more comparisons.
    Naive,
    /// Like [`Variant::Std`] but probes the candidate nearer to `q` first
    /// and skips the second extension when the first already reaches the
    /// running match length.
    Heur,
}

/// Work counters for one matching statistics computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MsStats {
    /// Extension attempts: processed characters that had an active match.
    pub steps: u64,
    /// Attempts resolved by a single LF step (the BWT character matched).
    pub lf_hits: u64,
    /// Longest-common-extension queries issued.
    pub lce_calls: u64,
    /// Characters compared inside extension queries.
    pub char_compares: u64,
    /// Whole shared subtrees skipped inside extension queries.
    pub subtree_skips: u64,
    /// Text characters read by the second pass of the two-pass algorithm.
    pub pass2_accesses: u64,
}

impl MsStats {
    /// Fraction of extension attempts resolved by a plain LF step; 1 when
    /// there were none. Exact substring patterns score 1.
    pub fn lf_hit_rate(&self) -> f64 {
        if self.steps == 0 {
            1.0
        } else {
            self.lf_hits as f64 / self.steps as f64
        }
    }
}

/// Failure modes specific to matching statistics queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MsError {
    #[error("streaming requires an index built over the reversed text")]
    ReversedIndexRequired,
    #[error("this index was built without threshold tables")]
    ThresholdsRequired,
    #[error("stream byte 0x{byte:02x} is reserved")]
    ForbiddenStreamByte { byte: u8 },
}

/// Active match state: row `q` satisfies `SA[q] == pos`, and the text at
/// `pos` matches the last `len` processed pattern characters.
#[derive(Debug, Clone, Copy)]
struct Cursor {
    q: usize,
    pos: usize,
    len: usize,
}

fn lce_for_variant(
    slp: &Slp,
    a: usize,
    b: usize,
    variant: Variant,
    stats: &mut MsStats,
) -> usize {
    let mut ls = LceStats::default();
    let ext = match variant {
        Variant::Naive => slp.lce_naive_with_stats(a, b, &mut ls),
        Variant::Std | Variant::Heur => slp.lce_with_stats(a, b, &mut ls),
    };
    stats.lce_calls += 1;
    stats.char_compares += ls.char_compares;
    stats.subtree_skips += ls.subtree_skips;
    ext
}

/// Restart with no active match: any copy of `c` gives a length-1 match,
/// and no longer one exists at this point of the scan.
fn restart(rlbwt: &RlBwt, slp: &Slp, c: u8) -> (Option<Cursor>, MsEntry) {
    match rlbwt.select(c, 1) {
        Err(_) => (None, MsEntry::ABSENT),
        Ok(row) => {
            let sa = rlbwt
                .sa_at_boundary(row)
                .expect("first occurrence heads a run");
            // BWT[row] is never the sentinel here, so sa >= 1.
            let pos = sa - 1;
            debug_assert_eq!(slp.access(pos), Ok(c));
            let q = rlbwt.lf(row);
            (Some(Cursor { q, pos, len: 1 }), MsEntry::new(pos, 1))
        }
    }
}

/// Advances the scan by one pattern character (right to left).
fn ms_step(
    rlbwt: &RlBwt,
    slp: &Slp,
    state: Option<Cursor>,
    c: u8,
    variant: Variant,
    stats: &mut MsStats,
) -> (Option<Cursor>, MsEntry) {
    let Some(cur) = state else {
        return restart(rlbwt, slp, c);
    };
    stats.steps += 1;
    if rlbwt.char_at(cur.q) == c {
        // The suffix one step earlier extends the match directly.
        stats.lf_hits += 1;
        let pos = cur.pos - 1;
        let len = cur.len + 1;
        debug_assert_eq!(slp.access(pos), Ok(c));
        let q = rlbwt.lf(cur.q);
        return (Some(Cursor { q, pos, len }), MsEntry::new(pos, len));
    }
    let (pred, succ) = match rlbwt.pred_succ_occurrence(c, cur.q) {
        Err(_) => return (None, MsEntry::ABSENT),
        Ok(ps) => ps,
    };
    let capped = |ext: usize| ext.min(cur.len);
    let (row, ext) = match (pred, succ) {
        (Some(p), None) => {
            let sa = rlbwt.sa_at_boundary(p).expect("pred is a run end");
            (p, capped(lce_for_variant(slp, sa, cur.pos, variant, stats)))
        }
        (None, Some(s)) => {
            let sa = rlbwt.sa_at_boundary(s).expect("succ is a run start");
            (s, capped(lce_for_variant(slp, sa, cur.pos, variant, stats)))
        }
        (Some(p), Some(s)) => {
            let sa_p = rlbwt.sa_at_boundary(p).expect("pred is a run end");
            let sa_s = rlbwt.sa_at_boundary(s).expect("succ is a run start");
            match variant {
                Variant::Std | Variant::Naive => {
                    let ext_p = capped(lce_for_variant(slp, sa_p, cur.pos, variant, stats));
                    let ext_s = capped(lce_for_variant(slp, sa_s, cur.pos, variant, stats));
                    // Ties go to the predecessor.
                    if ext_p >= ext_s {
                        (p, ext_p)
                    } else {
                        (s, ext_s)
                    }
                }
                Variant::Heur => {
                    let pred_first = cur.q - p <= s - cur.q;
                    let (row_a, sa_a, row_b, sa_b) = if pred_first {
                        (p, sa_p, s, sa_s)
                    } else {
                        (s, sa_s, p, sa_p)
                    };
                    let ext_a = capped(lce_for_variant(slp, sa_a, cur.pos, variant, stats));
                    if ext_a == cur.len {
                        // Already at the cap; the other side cannot win.
                        (row_a, ext_a)
                    } else {
                        let ext_b =
                            capped(lce_for_variant(slp, sa_b, cur.pos, variant, stats));
                        let a_wins = if pred_first { ext_a >= ext_b } else { ext_a > ext_b };
                        if a_wins {
                            (row_a, ext_a)
                        } else {
                            (row_b, ext_b)
                        }
                    }
                }
            }
        }
        (None, None) => unreachable!("absent characters error out above"),
    };
    let sa = rlbwt.sa_at_boundary(row).expect("chosen row is a boundary");
    let pos = sa - 1;
    let len = ext + 1;
    debug_assert_eq!(slp.access(pos), Ok(c));
    let q = rlbwt.lf(row);
    (Some(Cursor { q, pos, len }), MsEntry::new(pos, len))
}

/// Matching statistics of `pattern` in one right-to-left pass.
///
/// `out[i]` holds the length of the longest prefix of `pattern[i..]` that
/// occurs in the text and one of its occurrence positions; absent
/// characters yield [`MsEntry::ABSENT`].
pub fn ms_one_pass(
    rlbwt: &RlBwt,
    slp: &Slp,
    pattern: &Pattern,
    variant: Variant,
    stats: &mut MsStats,
) -> Vec<MsEntry> {
    let m = pattern.bytes.len();
    let mut out = vec![MsEntry::ABSENT; m];
    let mut state = None;
    for i in (0..m).rev() {
        let (next, entry) = ms_step(rlbwt, slp, state, pattern.bytes[i], variant, stats);
        state = next;
        out[i] = entry;
    }
    out
}

/// Matching statistics via the two-pass threshold algorithm.
///
/// Pass one walks right to left like [`ms_one_pass`] but resolves every
/// mismatch with a single threshold comparison, recording only occurrence
/// positions. Pass two recovers the lengths left to right by reading the
/// text at each recorded position, starting every comparison at the
/// previous length minus one; the total number of characters read is
/// linear in the pattern length.
pub fn ms_two_pass(
    rlbwt: &RlBwt,
    slp: &Slp,
    thresholds: &ThresholdTable,
    pattern: &Pattern,
    stats: &mut MsStats,
) -> Vec<MsEntry> {
    let m = pattern.bytes.len();

    let mut witness: Vec<Option<usize>> = vec![None; m];
    let mut state: Option<(usize, usize)> = None; // (q, pos); SA[q] == pos
    for i in (0..m).rev() {
        let c = pattern.bytes[i];
        let next = match state {
            None => match rlbwt.select(c, 1) {
                Err(_) => None,
                Ok(row) => {
                    let sa = rlbwt
                        .sa_at_boundary(row)
                        .expect("first occurrence heads a run");
                    Some((rlbwt.lf(row), sa - 1))
                }
            },
            Some((q, pos)) => {
                if rlbwt.char_at(q) == c {
                    stats.steps += 1;
                    stats.lf_hits += 1;
                    Some((rlbwt.lf(q), pos - 1))
                } else {
                    stats.steps += 1;
                    match rlbwt.pred_succ_occurrence(c, q) {
                        Err(_) => None,
                        Ok((pred, succ)) => {
                            let row = match (pred, succ) {
                                (Some(p), None) => p,
                                (None, Some(s)) => s,
                                (Some(p), Some(s)) => {
                                    let gap = rlbwt
                                        .run_gap_index(c, q)
                                        .expect("q lies between two runs of c");
                                    // Rows before the threshold extend
                                    // further with the run above.
                                    if q < thresholds.threshold(c, gap) {
                                        p
                                    } else {
                                        s
                                    }
                                }
                                (None, None) => unreachable!("handled as error"),
                            };
                            let sa =
                                rlbwt.sa_at_boundary(row).expect("chosen row is a boundary");
                            Some((rlbwt.lf(row), sa - 1))
                        }
                    }
                }
            }
        };
        witness[i] = next.map(|(_, pos)| pos);
        state = next;
    }

    let mut out = vec![MsEntry::ABSENT; m];
    let mut prev_len = 0usize;
    for i in 0..m {
        let Some(p) = witness[i] else {
            prev_len = 0;
            continue;
        };
        // The first start characters are known to match: matching
        // statistics never shrink by more than one per position, and the
        // recorded witness attains the maximum.
        let start = prev_len.saturating_sub(1);
        debug_assert_eq!(
            slp.extract(p, start).as_deref(),
            Ok(&pattern.bytes[i..i + start])
        );
        let mut len = start;
        let mut reader = slp.reader_at(p + start).expect("witness stays inside the text");
        for k in start..m - i {
            let Some(byte) = reader.next_byte() else {
                break;
            };
            stats.pass2_accesses += 1;
            if byte == pattern.bytes[i + k] {
                len += 1;
            } else {
                break;
            }
        }
        debug_assert!(len >= 1);
        out[i] = MsEntry::new(p, len);
        prev_len = len;
    }
    out
}

/// Push-based matching statistics over an index of the reversed text.
///
/// After each [`push`](StreamSession::push) the returned entry describes
/// the longest suffix of the bytes pushed so far that occurs in the
/// original (forward) text, with a forward occurrence position. The
/// session keeps a single cursor and counters between pushes, so memory
/// use is independent of the stream length.
#[derive(Debug)]
pub struct StreamSession<'a> {
    rlbwt: &'a RlBwt,
    slp: &'a Slp,
    variant: Variant,
    state: Option<Cursor>,
    stats: MsStats,
    pushed: u64,
}

impl<'a> StreamSession<'a> {
    /// Opens a session over structures that must index the reversed text;
    /// `MsIndex::stream` checks that flag before delegating here.
    pub fn new(rlbwt: &'a RlBwt, slp: &'a Slp, variant: Variant) -> StreamSession<'a> {
        StreamSession {
            rlbwt,
            slp,
            variant,
            state: None,
            stats: MsStats::default(),
            pushed: 0,
        }
    }

    /// Feeds one byte and returns the entry for the current stream suffix.
    pub fn push(&mut self, c: u8) -> Result<MsEntry, MsError> {
        if c == SENTINEL || c == RECORD_SEP {
            return Err(MsError::ForbiddenStreamByte { byte: c });
        }
        let (next, entry) =
            ms_step(self.rlbwt, self.slp, self.state.take(), c, self.variant, &mut self.stats);
        self.state = next;
        self.pushed += 1;
        Ok(match entry.pos {
            None => entry,
            Some(rev_pos) => {
                // A match at rev_pos in the reversed text reads backwards
                // in the forward text and ends at its mirror image.
                let n = self.rlbwt.n;
                MsEntry::new(n - 1 - rev_pos - entry.len, entry.len)
            }
        })
    }

    /// Number of bytes pushed so far.
    pub fn pushed(&self) -> u64 {
        self.pushed
    }

    /// Work counters accumulated over the whole stream.
    pub fn stats(&self) -> &MsStats {
        &self.stats
    }

    /// Forgets the active match; the next push starts a fresh suffix.
    pub fn reset(&mut self) {
        self.state = None;
    }
}

/// One maximal exact match between pattern and text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mem {
    /// Start within the pattern.
    pub pattern_pos: usize,
    /// Start of one text occurrence.
    pub text_pos: usize,
    pub len: usize,
}

/// Extracts maximal exact matches of length at least `min_len` from
/// matching statistics.
///
/// A match starting at pattern position `i` is maximal when it cannot be
/// extended to the left, i.e. `i == 0` or the entry at `i - 1` does not
/// already cover it.
pub fn extract_mems(entries: &[MsEntry], min_len: usize) -> Vec<Mem> {
    let floor = min_len.max(1);
    let mut out = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        if e.len < floor {
            continue;
        }
        if i > 0 && entries[i - 1].len == e.len + 1 {
            continue;
        }
        out.push(Mem {
            pattern_pos: i,
            text_pos: e.pos.expect("positive length implies a position"),
            len: e.len,
        });
    }
    out
}
