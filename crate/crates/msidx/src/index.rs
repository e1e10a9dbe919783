//! Index assembly, top-level queries, and the on-disk format.
//!
//! [`MsIndex`] bundles the run-length BWT, the grammar, and the optional
//! locate samples and threshold tables behind one build entry point and
//! one serialized representation. The byte format is little-endian
//! throughout: a magic string with embedded version, a flag word, the
//! build parameters and structure sizes, a byte histogram, then one
//! length-prefixed section per component in fixed order. Loading
//! revalidates every structural invariant and rejects both truncated and
//! oversized inputs, so a loaded index behaves exactly like the freshly
//! built one it was saved from.

use std::fs;
use std::path::Path;

use crate::grammar::{build_slp, Slp, SlpRule};
use crate::locate::{LocateSamples, Locator};
use crate::ms::{
    extract_mems, ms_one_pass, ms_two_pass, Mem, MsError, MsStats, StreamSession, Variant,
};
use crate::rlbwt::RlBwt;
use crate::suffix::SuffixStructures;
use crate::text::{validate_text, InputMode, MsEntry, Pattern, Text, TextError, PAD};
use crate::thresholds::{build_thresholds, ThresholdTable};

/// Magic string at the start of every index file; the trailing digits are
/// the format version.
pub const MAGIC: [u8; 8] = *b"MSIDX001";

const FLAG_REVERSED: u64 = 1;
const FLAG_LOCATE: u64 = 1 << 1;
const FLAG_THRESHOLDS: u64 = 1 << 2;
const KNOWN_FLAGS: u64 = FLAG_REVERSED | FLAG_LOCATE | FLAG_THRESHOLDS;

/// Encodes `Option<usize>` targets in sample sections.
const NONE_MARK: u64 = u64::MAX;

/// Build-time options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildParams {
    /// Parsing window width.
    pub window: usize,
    /// Trigger modulus of the rolling hash.
    pub modulus: usize,
    /// Index the reversed text (required for streaming queries).
    pub reversed: bool,
    /// Also build and serialize φ/φ⁻¹ samples for occurrence listing.
    pub with_locate: bool,
    /// Also build and serialize threshold tables for the two-pass
    /// algorithm.
    pub with_thresholds: bool,
}

impl Default for BuildParams {
    fn default() -> BuildParams {
        BuildParams {
            window: 10,
            modulus: 100,
            reversed: false,
            with_locate: false,
            with_thresholds: false,
        }
    }
}

/// Failure modes of building, saving, and loading an index.
#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
    /// The bytes are not an index this version understands.
    #[error("unrecognized index data: {0}")]
    Format(String),
    /// The build input or parameters are unusable.
    #[error("invalid build input: {0}")]
    Validation(String),
    #[error(transparent)]
    Text(#[from] TextError),
}

/// A complete matching statistics index over one text.
#[derive(Debug, Clone)]
pub struct MsIndex {
    rlbwt: RlBwt,
    slp: Slp,
    locate: Option<LocateSamples>,
    thresholds: Option<ThresholdTable>,
    reversed: bool,
    window: usize,
    modulus: usize,
    histogram: [u64; 256],
}

impl MsIndex {
    /// Builds every requested component from a validated text.
    ///
    /// With `reversed` set the body of the text is indexed back to front;
    /// stream sessions require that orientation and report positions in
    /// the forward text.
    pub fn build(text: &Text, params: &BuildParams) -> Result<MsIndex, IndexError> {
        if params.window == 0 {
            return Err(IndexError::Validation("window must be positive".into()));
        }
        if params.modulus == 0 {
            return Err(IndexError::Validation("modulus must be positive".into()));
        }
        if let Some(pos) = text.bytes.iter().position(|&b| b == PAD) {
            return Err(IndexError::Validation(format!(
                "byte 0x02 at position {pos} is reserved for parsing padding"
            )));
        }
        let indexed: Text = if params.reversed {
            let mut body = text.bytes[..text.len() - 1].to_vec();
            body.reverse();
            Text::from_parts(body)?
        } else {
            text.clone()
        };
        let mut histogram = [0u64; 256];
        for &b in &indexed.bytes {
            histogram[b as usize] += 1;
        }
        let ss = SuffixStructures::build(&indexed);
        let rlbwt = RlBwt::from_suffix_structures(&ss);
        let slp = build_slp(&indexed, params.window, params.modulus);
        let locate = params
            .with_locate
            .then(|| LocateSamples::build(&ss, &rlbwt));
        let thresholds = params
            .with_thresholds
            .then(|| build_thresholds(&ss, &rlbwt));
        Ok(MsIndex {
            rlbwt,
            slp,
            locate,
            thresholds,
            reversed: params.reversed,
            window: params.window,
            modulus: params.modulus,
            histogram,
        })
    }

    /// Validates raw input bytes and builds; convenience for callers that
    /// start from file contents rather than a [`Text`].
    pub fn build_from_bytes(
        raw: &[u8],
        mode: InputMode,
        params: &BuildParams,
    ) -> Result<MsIndex, IndexError> {
        let text = validate_text(raw, mode)?;
        MsIndex::build(&text, params)
    }

    /// Indexed text length `n`, sentinel included.
    pub fn text_len(&self) -> usize {
        self.rlbwt.n
    }

    /// Number of BWT runs `r`.
    pub fn num_runs(&self) -> usize {
        self.rlbwt.num_runs()
    }

    /// Number of grammar rules.
    pub fn rule_count(&self) -> usize {
        self.slp.rule_count()
    }

    /// Whether the body was indexed back to front.
    pub fn reversed(&self) -> bool {
        self.reversed
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Byte counts of the indexed text, sentinel included.
    pub fn histogram(&self) -> &[u64; 256] {
        &self.histogram
    }

    pub fn rlbwt(&self) -> &RlBwt {
        &self.rlbwt
    }

    pub fn slp(&self) -> &Slp {
        &self.slp
    }

    pub fn threshold_table(&self) -> Option<&ThresholdTable> {
        self.thresholds.as_ref()
    }

    pub fn locate_samples(&self) -> Option<&LocateSamples> {
        self.locate.as_ref()
    }

    /// Matching statistics of `pattern` with the chosen one-pass variant.
    pub fn matching_statistics(
        &self,
        pattern: &Pattern,
        variant: Variant,
    ) -> (Vec<MsEntry>, MsStats) {
        let mut stats = MsStats::default();
        let entries = ms_one_pass(&self.rlbwt, &self.slp, pattern, variant, &mut stats);
        (entries, stats)
    }

    /// Matching statistics via thresholds; requires `with_thresholds`.
    pub fn matching_statistics_two_pass(
        &self,
        pattern: &Pattern,
    ) -> Result<(Vec<MsEntry>, MsStats), MsError> {
        let table = self.thresholds.as_ref().ok_or(MsError::ThresholdsRequired)?;
        let mut stats = MsStats::default();
        let entries = ms_two_pass(&self.rlbwt, &self.slp, table, pattern, &mut stats);
        Ok((entries, stats))
    }

    /// Opens a push-based session; requires a reversed index.
    pub fn stream(&self, variant: Variant) -> Result<StreamSession<'_>, MsError> {
        if !self.reversed {
            return Err(MsError::ReversedIndexRequired);
        }
        Ok(StreamSession::new(&self.rlbwt, &self.slp, variant))
    }

    /// Occurrence listing handle; `None` without locate samples.
    pub fn locator(&self) -> Option<Locator<'_>> {
        self.locate.as_ref().map(|s| Locator::new(s, &self.slp))
    }

    /// Maximal exact matches of `pattern` with length at least `min_len`.
    pub fn mems(&self, pattern: &Pattern, min_len: usize) -> Vec<Mem> {
        let (entries, _) = self.matching_statistics(pattern, Variant::Std);
        extract_mems(&entries, min_len)
    }

    /// Serializes the index; the result is byte-identical across
    /// save/load/save cycles.
    pub fn save(&self) -> Vec<u8> {
        let mut flags = 0;
        if self.reversed {
            flags |= FLAG_REVERSED;
        }
        if self.locate.is_some() {
            flags |= FLAG_LOCATE;
        }
        if self.thresholds.is_some() {
            flags |= FLAG_THRESHOLDS;
        }
        let mut buf = Vec::new();
        buf.extend_from_slice(&MAGIC);
        push_u64(&mut buf, flags);
        push_usize(&mut buf, self.window);
        push_usize(&mut buf, self.modulus);
        push_usize(&mut buf, self.text_len());
        push_usize(&mut buf, self.num_runs());
        push_usize(&mut buf, self.rule_count());
        for &count in &self.histogram {
            push_u64(&mut buf, count);
        }
        push_section(&mut buf, encode_rlbwt(&self.rlbwt));
        push_section(&mut buf, encode_slp(&self.slp));
        if let Some(samples) = &self.locate {
            push_section(&mut buf, encode_locate(samples));
        }
        if let Some(table) = &self.thresholds {
            push_section(&mut buf, encode_thresholds(table));
        }
        buf
    }

    /// Deserializes an index, revalidating all structural invariants.
    pub fn load(bytes: &[u8]) -> Result<MsIndex, IndexError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        let magic = r.take(MAGIC.len())?;
        if magic != MAGIC {
            return Err(IndexError::Format(
                "magic mismatch: not an index file of this version".into(),
            ));
        }
        let flags = r.u64()?;
        if flags & !KNOWN_FLAGS != 0 {
            return Err(IndexError::Format(format!("unknown flag bits 0x{flags:x}")));
        }
        let window = r.usize()?;
        let modulus = r.usize()?;
        if window == 0 || modulus == 0 {
            return Err(IndexError::Format("zero parsing parameter".into()));
        }
        let n = r.usize()?;
        let num_runs = r.usize()?;
        let rule_count = r.usize()?;
        let mut histogram = [0u64; 256];
        for slot in histogram.iter_mut() {
            *slot = r.u64()?;
        }
        let total: u64 = histogram.iter().sum();
        if total != n as u64 {
            return Err(IndexError::Format(format!(
                "histogram sums to {total}, text length is {n}"
            )));
        }

        let rlbwt = decode_rlbwt(&mut r.section()?)?;
        if rlbwt.n != n || rlbwt.num_runs() != num_runs {
            return Err(IndexError::Format(
                "run-length BWT disagrees with header sizes".into(),
            ));
        }
        let slp = decode_slp(&mut r.section()?)?;
        if slp.text_len() != n || slp.rule_count() != rule_count {
            return Err(IndexError::Format(
                "grammar disagrees with header sizes".into(),
            ));
        }
        let locate = if flags & FLAG_LOCATE != 0 {
            Some(decode_locate(&mut r.section()?, n)?)
        } else {
            None
        };
        let thresholds = if flags & FLAG_THRESHOLDS != 0 {
            let table = decode_thresholds(&mut r.section()?)?;
            for c in 0..=255u8 {
                let runs = rlbwt.per_char_runs[c as usize].len();
                if table.gaps(c) != runs.saturating_sub(1) {
                    return Err(IndexError::Format(format!(
                        "threshold row for byte 0x{c:02x} disagrees with run count"
                    )));
                }
            }
            Some(table)
        } else {
            None
        };
        if r.remaining() != 0 {
            return Err(IndexError::Format(format!(
                "{} trailing bytes after the last section",
                r.remaining()
            )));
        }
        Ok(MsIndex {
            rlbwt,
            slp,
            locate,
            thresholds,
            reversed: flags & FLAG_REVERSED != 0,
            window,
            modulus,
            histogram,
        })
    }

    pub fn save_to_path(&self, path: &Path) -> Result<(), IndexError> {
        fs::write(path, self.save())?;
        Ok(())
    }

    pub fn load_from_path(path: &Path) -> Result<MsIndex, IndexError> {
        let bytes = fs::read(path)?;
        MsIndex::load(&bytes)
    }
}

fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_usize(buf: &mut Vec<u8>, v: usize) {
    push_u64(buf, v as u64);
}

fn push_opt(buf: &mut Vec<u8>, v: Option<usize>) {
    push_u64(buf, v.map_or(NONE_MARK, |x| x as u64));
}

fn push_section(buf: &mut Vec<u8>, payload: Vec<u8>) {
    push_usize(buf, payload.len());
    buf.extend_from_slice(&payload);
}

fn encode_rlbwt(rlbwt: &RlBwt) -> Vec<u8> {
    let mut out = Vec::new();
    push_usize(&mut out, rlbwt.runs.len());
    for &(c, len) in &rlbwt.runs {
        push_u64(&mut out, c as u64);
        push_usize(&mut out, len);
    }
    for samples in [&rlbwt.sa_samples_start, &rlbwt.sa_samples_end] {
        push_usize(&mut out, samples.len());
        for &s in samples {
            push_usize(&mut out, s);
        }
    }
    out
}

fn encode_slp(slp: &Slp) -> Vec<u8> {
    let mut out = Vec::new();
    push_usize(&mut out, slp.rules.len());
    for rule in &slp.rules {
        match *rule {
            SlpRule::Terminal(b) => {
                push_u64(&mut out, 0);
                push_u64(&mut out, b as u64);
            }
            SlpRule::Pair(l, r) => {
                push_u64(&mut out, 1);
                push_u64(&mut out, l as u64);
                push_u64(&mut out, r as u64);
            }
        }
    }
    push_u64(&mut out, slp.root as u64);
    push_usize(&mut out, slp.top_seq().len());
    for &id in slp.top_seq() {
        push_u64(&mut out, id as u64);
    }
    out
}

fn encode_locate(samples: &LocateSamples) -> Vec<u8> {
    let mut out = Vec::new();
    for points in [samples.pred_points(), samples.succ_points()] {
        push_usize(&mut out, points.len());
        for &(key, target) in points {
            push_usize(&mut out, key);
            push_opt(&mut out, target);
        }
    }
    out
}

fn encode_thresholds(table: &ThresholdTable) -> Vec<u8> {
    let mut out = Vec::new();
    push_usize(&mut out, table.rows().len());
    for row in table.rows() {
        push_usize(&mut out, row.len());
        for &t in row {
            push_usize(&mut out, t);
        }
    }
    out
}

/// Bounds-checked little-endian reader over a byte slice.
struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], IndexError> {
        if self.buf.len() - self.pos < len {
            return Err(IndexError::Format("truncated index data".into()));
        }
        let out = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64, IndexError> {
        let bytes = self.take(8)?;
        Ok(u64::from_le_bytes(bytes.try_into().expect("eight bytes")))
    }

    fn usize(&mut self) -> Result<usize, IndexError> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| IndexError::Format(format!("value {v} overflows usize")))
    }

    fn opt(&mut self) -> Result<Option<usize>, IndexError> {
        let v = self.u64()?;
        if v == NONE_MARK {
            return Ok(None);
        }
        usize::try_from(v)
            .map(Some)
            .map_err(|_| IndexError::Format(format!("value {v} overflows usize")))
    }

    fn byte_u8(&mut self) -> Result<u8, IndexError> {
        let v = self.u64()?;
        u8::try_from(v).map_err(|_| IndexError::Format(format!("byte value {v} out of range")))
    }

    /// Splits off one length-prefixed section as its own reader.
    fn section(&mut self) -> Result<Reader<'a>, IndexError> {
        let len = self.usize()?;
        Ok(Reader { buf: self.take(len)?, pos: 0 })
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn finish(&self) -> Result<(), IndexError> {
        if self.remaining() != 0 {
            return Err(IndexError::Format("section length mismatch".into()));
        }
        Ok(())
    }
}

fn decode_rlbwt(r: &mut Reader<'_>) -> Result<RlBwt, IndexError> {
    let num_runs = r.usize()?;
    let mut runs = Vec::with_capacity(num_runs);
    for _ in 0..num_runs {
        let c = r.byte_u8()?;
        let len = r.usize()?;
        runs.push((c, len));
    }
    let mut samples = [Vec::new(), Vec::new()];
    for list in samples.iter_mut() {
        let count = r.usize()?;
        list.reserve(count);
        for _ in 0..count {
            list.push(r.usize()?);
        }
    }
    r.finish()?;
    let [starts, ends] = samples;
    RlBwt::from_parts(runs, starts, ends).map_err(|e| IndexError::Format(e.to_string()))
}

fn decode_slp(r: &mut Reader<'_>) -> Result<Slp, IndexError> {
    let rule_count = r.usize()?;
    let mut rules = Vec::with_capacity(rule_count);
    for _ in 0..rule_count {
        let rule = match r.u64()? {
            0 => SlpRule::Terminal(r.byte_u8()?),
            1 => {
                let l = rule_u32(r)?;
                let rr = rule_u32(r)?;
                SlpRule::Pair(l, rr)
            }
            tag => return Err(IndexError::Format(format!("unknown rule tag {tag}"))),
        };
        rules.push(rule);
    }
    let root = rule_u32(r)?;
    let top_len = r.usize()?;
    let mut top_seq = Vec::with_capacity(top_len);
    for _ in 0..top_len {
        top_seq.push(rule_u32(r)?);
    }
    r.finish()?;
    Slp::from_parts(rules, root, top_seq).map_err(|e| IndexError::Format(e.to_string()))
}

fn rule_u32(r: &mut Reader<'_>) -> Result<u32, IndexError> {
    let v = r.u64()?;
    u32::try_from(v).map_err(|_| IndexError::Format(format!("rule id {v} out of range")))
}

fn decode_locate(r: &mut Reader<'_>, n: usize) -> Result<LocateSamples, IndexError> {
    let mut lists = [Vec::new(), Vec::new()];
    for list in lists.iter_mut() {
        let count = r.usize()?;
        list.reserve(count);
        for _ in 0..count {
            let key = r.usize()?;
            let target = r.opt()?;
            list.push((key, target));
        }
    }
    r.finish()?;
    let [pred, succ] = lists;
    LocateSamples::from_parts(pred, succ, n).map_err(IndexError::Format)
}

fn decode_thresholds(r: &mut Reader<'_>) -> Result<ThresholdTable, IndexError> {
    let row_count = r.usize()?;
    let mut rows = Vec::with_capacity(row_count);
    for _ in 0..row_count {
        let len = r.usize()?;
        let mut row = Vec::with_capacity(len);
        for _ in 0..len {
            row.push(r.usize()?);
        }
        rows.push(row);
    }
    r.finish()?;
    ThresholdTable::from_parts(rows).map_err(IndexError::Format)
}
