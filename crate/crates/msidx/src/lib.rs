//! Run-length compressed full-text index for repetitive byte texts.
//!
//! The index pairs a run-length encoded Burrows-Wheeler transform (with
//! suffix-array samples at run boundaries) with a grammar-compressed copy of
//! the text used for random access and longest-common-extension queries.
//! On top of those two structures it provides:
//!
//! - matching statistics in a single right-to-left pass over the pattern,
//!   with selectable LCE strategies ([`Variant`]),
//! - a two-pass reference algorithm driven by precomputed LCP thresholds,
//! - streaming matching statistics with constant per-session state,
//! - occurrence listing and maximal-exact-match extraction.
//!
//! [`MsIndex`] bundles everything and serializes to a versioned binary file.

pub mod grammar;
pub mod index;
pub mod locate;
pub mod ms;
pub mod rlbwt;
pub mod suffix;
pub mod text;
pub mod thresholds;

pub use grammar::{build_slp, pfp_parse, PfpOutput, Slp};
pub use index::{BuildParams, IndexError, MsIndex};
pub use locate::{LocateSamples, Locator};
pub use ms::{extract_mems, Mem, MsError, MsStats, StreamSession, Variant};
pub use rlbwt::{RlBwt, RlBwtError};
pub use suffix::{oracle_lce, oracle_ms, oracle_occurrences, SuffixStructures};
pub use text::{validate_text, InputMode, MsEntry, Pattern, Text, TextError};
pub use thresholds::{build_thresholds, ThresholdTable};
