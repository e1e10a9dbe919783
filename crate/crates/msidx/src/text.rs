//! Input texts, patterns and matching-statistics entries.
//!
//! A [`Text`] is a byte sequence terminated by a unique sentinel `0x00`,
//! the lexicographically smallest byte. Multi-record FASTA inputs are
//! concatenated with the separator `0x01` between records, which sorts
//! below every sequence character. The byte `0x02` is reserved as parse
//! padding and never appears in public positions.

/// Sentinel byte terminating every text, lexicographically smallest.
pub const SENTINEL: u8 = 0x00;
/// Separator placed between FASTA records.
pub const RECORD_SEP: u8 = 0x01;
/// Padding byte used internally by the parser; excluded from the alphabet.
pub const PAD: u8 = 0x02;

/// How raw input bytes are interpreted by [`validate_text`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    /// Bytes are taken verbatim; `0x00` and `0x01` are forbidden.
    Raw,
    /// FASTA: `>` header lines are dropped, sequence lines of each record
    /// are concatenated, records are joined with [`RECORD_SEP`].
    Fasta,
}

/// Validation failure for a text or pattern.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("forbidden byte 0x{byte:02x} at position {pos}")]
    ForbiddenByte { pos: usize, byte: u8 },
    #[error("empty input")]
    EmptyInput,
    #[error("malformed FASTA: {0}")]
    MalformedFasta(String),
}

/// A sentinel-terminated text over the byte alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    /// Text bytes, last byte is the unique [`SENTINEL`].
    pub bytes: Vec<u8>,
    /// Number of distinct bytes, sentinel and separators included.
    pub alphabet_size: usize,
}

impl Text {
    /// Total length `n`, sentinel included.
    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Builds a text from sentinel-free bytes, appending the sentinel.
    ///
    /// Accepts `RECORD_SEP` so that FASTA concatenations can round-trip;
    /// use [`validate_text`] for untrusted input.
    pub fn from_parts(mut bytes: Vec<u8>) -> Result<Text, TextError> {
        if bytes.is_empty() {
            return Err(TextError::EmptyInput);
        }
        if let Some(pos) = bytes.iter().position(|&b| b == SENTINEL) {
            return Err(TextError::ForbiddenByte { pos, byte: SENTINEL });
        }
        bytes.push(SENTINEL);
        let alphabet_size = distinct_bytes(&bytes);
        Ok(Text { bytes, alphabet_size })
    }
}

/// A query pattern: non-empty, free of sentinel and separator bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub bytes: Vec<u8>,
}

impl Pattern {
    pub fn new(bytes: Vec<u8>) -> Result<Pattern, TextError> {
        if bytes.is_empty() {
            return Err(TextError::EmptyInput);
        }
        if let Some(pos) = bytes.iter().position(|&b| b == SENTINEL || b == RECORD_SEP) {
            return Err(TextError::ForbiddenByte { pos, byte: bytes[pos] });
        }
        Ok(Pattern { bytes })
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

/// One matching-statistics entry: the longest pattern window starting at a
/// position, together with one text occurrence of that window.
///
/// `pos` is `None` exactly when `len == 0` (the window is empty because the
/// pattern character does not occur in the text at all).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MsEntry {
    pub pos: Option<usize>,
    pub len: usize,
}

impl MsEntry {
    pub const ABSENT: MsEntry = MsEntry { pos: None, len: 0 };

    pub fn new(pos: usize, len: usize) -> MsEntry {
        debug_assert!(len > 0);
        MsEntry { pos: Some(pos), len }
    }
}

fn distinct_bytes(bytes: &[u8]) -> usize {
    let mut seen = [false; 256];
    let mut count = 0;
    for &b in bytes {
        if !seen[b as usize] {
            seen[b as usize] = true;
            count += 1;
        }
    }
    count
}

/// Validates raw input bytes and produces a sentinel-terminated [`Text`].
///
/// In [`InputMode::Raw`] the bytes are used verbatim; any `0x00` or `0x01`
/// is rejected with its position. In [`InputMode::Fasta`] the input must
/// start with a `>` header line; sequence lines are stripped of line
/// terminators and concatenated, and records are joined with [`RECORD_SEP`].
/// Every record must contain at least one sequence byte.
pub fn validate_text(raw: &[u8], mode: InputMode) -> Result<Text, TextError> {
    match mode {
        InputMode::Raw => {
            if raw.is_empty() {
                return Err(TextError::EmptyInput);
            }
            if let Some(pos) = raw.iter().position(|&b| b == SENTINEL || b == RECORD_SEP) {
                return Err(TextError::ForbiddenByte { pos, byte: raw[pos] });
            }
            let mut bytes = raw.to_vec();
            bytes.push(SENTINEL);
            let alphabet_size = distinct_bytes(&bytes);
            Ok(Text { bytes, alphabet_size })
        }
        InputMode::Fasta => {
            if raw.is_empty() {
                return Err(TextError::EmptyInput);
            }
            let mut records: Vec<Vec<u8>> = Vec::new();
            let mut in_record = false;
            for line in raw.split(|&b| b == b'\n') {
                let line = line.strip_suffix(b"\r").unwrap_or(line);
                if line.first() == Some(&b'>') {
                    records.push(Vec::new());
                    in_record = true;
                } else if line.is_empty() {
                    continue;
                } else {
                    if !in_record {
                        return Err(TextError::MalformedFasta(
                            "sequence data before first header".into(),
                        ));
                    }
                    if let Some(pos) =
                        line.iter().position(|&b| b == SENTINEL || b == RECORD_SEP)
                    {
                        return Err(TextError::ForbiddenByte { pos, byte: line[pos] });
                    }
                    records.last_mut().unwrap().extend_from_slice(line);
                }
            }
            if records.is_empty() {
                return Err(TextError::MalformedFasta("no records".into()));
            }
            if let Some(idx) = records.iter().position(|r| r.is_empty()) {
                return Err(TextError::MalformedFasta(format!(
                    "record {idx} has no sequence data"
                )));
            }
            let mut bytes = Vec::new();
            for (k, rec) in records.iter().enumerate() {
                if k > 0 {
                    bytes.push(RECORD_SEP);
                }
                bytes.extend_from_slice(rec);
            }
            bytes.push(SENTINEL);
            let alphabet_size = distinct_bytes(&bytes);
            Ok(Text { bytes, alphabet_size })
        }
    }
}
