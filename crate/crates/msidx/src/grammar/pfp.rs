//! Prefix-free parsing of a text into overlapping phrases.
//!
//! The text is padded with `w` copies of the padding byte on both ends and
//! scanned with a width-`w` rolling Karp-Rabin window. A window whose
//! fingerprint is `0 mod p` is a trigger; only windows lying entirely
//! inside the unpadded text may trigger. Phrases run from one trigger to
//! the end of the next, so consecutive phrases overlap by exactly `w`
//! characters and the multiset of phrases reconstructs the padded text.

use crate::text::{Text, PAD};

/// Karp-Rabin modulus, the Mersenne prime `2^61 - 1`.
pub const KR_MODULUS: u64 = (1u64 << 61) - 1;
/// Karp-Rabin base.
pub const KR_BASE: u64 = 256;

/// Result of prefix-free parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfpOutput {
    /// Distinct phrases in lexicographic order.
    pub dictionary: Vec<Vec<u8>>,
    /// Phrase occurrences as indices into `dictionary`.
    pub parse: Vec<usize>,
    /// Window length `w`.
    pub window: usize,
    /// Trigger modulus `p`.
    pub modulus: usize,
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % KR_MODULUS as u128) as u64
}

fn add_mod(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % KR_MODULUS as u128) as u64
}

/// Fingerprint of one window computed from scratch.
pub(crate) fn kr_hash(window: &[u8]) -> u64 {
    let mut h = 0u64;
    for &b in window {
        h = add_mod(mul_mod(h, KR_BASE), b as u64);
    }
    h
}

/// Parses `text` with window `w` and modulus `p`.
///
/// The text must not contain the padding byte. A text shorter than `w`
/// admits no trigger window and parses into a single phrase.
pub fn pfp_parse(text: &Text, w: usize, p: usize) -> PfpOutput {
    assert!(w >= 1, "window must be positive");
    assert!(p >= 1, "modulus must be positive");
    debug_assert!(!text.bytes[..text.len() - 1].contains(&PAD));

    let n = text.len();
    let mut s = Vec::with_capacity(n + 2 * w);
    s.extend(std::iter::repeat(PAD).take(w));
    s.extend_from_slice(&text.bytes);
    s.extend(std::iter::repeat(PAD).take(w));
    let slen = s.len();

    // Trigger positions: the forced start and end windows plus every
    // interior window (fully inside the text) with fingerprint 0 mod p.
    let mut triggers = vec![0usize];
    if w <= n {
        let pw = {
            // KR_BASE^(w-1) mod KR_MODULUS
            let mut acc = 1u64;
            for _ in 1..w {
                acc = mul_mod(acc, KR_BASE);
            }
            acc
        };
        let mut h = kr_hash(&s[w..2 * w]);
        for i in w..=n {
            if h % p as u64 == 0 {
                triggers.push(i);
            }
            if i < n {
                let out = mul_mod(s[i] as u64, pw);
                let h_minus = add_mod(h, KR_MODULUS - out % KR_MODULUS);
                h = add_mod(mul_mod(h_minus, KR_BASE), s[i + w] as u64);
            }
        }
    }
    triggers.push(slen - w);

    let mut phrases: Vec<&[u8]> = Vec::with_capacity(triggers.len() - 1);
    for t in triggers.windows(2) {
        phrases.push(&s[t[0]..t[1] + w]);
    }

    let mut dictionary: Vec<Vec<u8>> = phrases.iter().map(|ph| ph.to_vec()).collect();
    dictionary.sort_unstable();
    dictionary.dedup();
    let parse = phrases
        .iter()
        .map(|ph| dictionary.binary_search_by(|d| d.as_slice().cmp(ph)).unwrap())
        .collect();

    PfpOutput { dictionary, parse, window: w, modulus: p }
}

/// Rebuilds the padded text from a parse: the first phrase in full, every
/// later phrase minus its leading `w`-character overlap.
pub fn reconstruct_padded(pfp: &PfpOutput) -> Vec<u8> {
    let w = pfp.window;
    let mut out = Vec::new();
    for (k, &d) in pfp.parse.iter().enumerate() {
        let ph = &pfp.dictionary[d];
        if k == 0 {
            out.extend_from_slice(ph);
        } else {
            out.extend_from_slice(&ph[w..]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{validate_text, InputMode};

    fn text(s: &[u8]) -> Text {
        validate_text(s, InputMode::Raw).unwrap()
    }

    fn padded(t: &Text, w: usize) -> Vec<u8> {
        let mut s = vec![PAD; w];
        s.extend_from_slice(&t.bytes);
        s.extend(vec![PAD; w]);
        s
    }

    #[test]
    fn cattag_single_phrase() {
        // No interior window of CATTAG with sentinel hashes to 0 mod 11,
        // so the whole padded string is one phrase.
        let t = text(b"CATTAG");
        let pfp = pfp_parse(&t, 4, 11);
        assert_eq!(pfp.parse, vec![0]);
        assert_eq!(pfp.dictionary.len(), 1);
        assert_eq!(pfp.dictionary[0], padded(&t, 4));
    }

    #[test]
    fn banana_wide_window_is_single_phrase() {
        // The interior windows "bana", "anan", "nana", "ana\0" hash to
        // 8, 6, 2, 6 mod 11; none triggers, so one phrase covers it all.
        let t = text(b"banana");
        let pfp = pfp_parse(&t, 4, 11);
        assert_eq!(pfp.parse, vec![0]);
        assert_eq!(pfp.dictionary[0], padded(&t, 4));
    }

    #[test]
    fn banana_splits_on_an_windows() {
        // kr_hash("an") = 97*256 + 110 = 24942 = 6 * 4157, so both "an"
        // windows (padded positions 3 and 5) trigger; the other interior
        // windows "ba", "na", "a\0" do not. Triggers 0, 3, 5 and the final
        // one at 9 yield three phrases overlapping by w = 2.
        let t = text(b"banana");
        let pfp = pfp_parse(&t, 2, 4157);
        assert_eq!(pfp.dictionary.len(), 3);
        assert_eq!(pfp.dictionary[0], b"\x02\x02ban");
        assert_eq!(pfp.dictionary[1], b"ana\x00\x02\x02");
        assert_eq!(pfp.dictionary[2], b"anan");
        assert_eq!(pfp.parse, vec![0, 2, 1]);
    }

    #[test]
    fn text_shorter_than_window_is_single_phrase() {
        let t = text(b"ab");
        let pfp = pfp_parse(&t, 10, 2);
        assert_eq!(pfp.parse.len(), 1);
        assert_eq!(pfp.dictionary[0], padded(&t, 10));
    }

    #[test]
    fn rolling_hash_matches_scratch_hash() {
        let t = text(b"abracadabra_abracadabra_abracadabra");
        let w = 4;
        let s = padded(&t, w);
        let n = t.len();
        // Interior triggers recomputed from scratch per window.
        let p = 5usize;
        let mut expect = vec![0usize];
        for i in w..=n {
            if kr_hash(&s[i..i + w]) % p as u64 == 0 {
                expect.push(i);
            }
        }
        expect.push(s.len() - w);
        let pfp = pfp_parse(&t, w, p);
        assert_eq!(reconstruct_padded(&pfp), s);
        // Recover trigger count from phrase count.
        assert_eq!(pfp.parse.len(), expect.len() - 1);
    }

    #[test]
    fn reconstruction_with_overlaps() {
        for (w, p) in [(4usize, 11usize), (10, 100), (2, 3), (1, 1)] {
            for raw in [
                b"banana".as_slice(),
                b"mississippi",
                b"aaaaaaaaaaaaaaaa",
                b"abcabcabcabcabcabc",
                b"x",
            ] {
                let t = text(raw);
                let pfp = pfp_parse(&t, w, p);
                assert_eq!(
                    reconstruct_padded(&pfp),
                    padded(&t, w),
                    "w={w} p={p} raw={:?}",
                    String::from_utf8_lossy(raw)
                );
                // Consecutive phrases overlap by exactly w characters.
                for pair in pfp.parse.windows(2) {
                    let a = &pfp.dictionary[pair[0]];
                    let b = &pfp.dictionary[pair[1]];
                    assert_eq!(a[a.len() - w..], b[..w]);
                }
            }
        }
    }

    #[test]
    fn doubled_text_reuses_phrases() {
        let base: Vec<u8> = (0..2048u32).map(|i| b'a' + (i * 31 % 4) as u8).collect();
        let single = text(&base);
        let doubled_raw: Vec<u8> = base.iter().chain(base.iter()).copied().collect();
        let doubled = text(&doubled_raw);
        let p1 = pfp_parse(&single, 4, 11);
        let p2 = pfp_parse(&doubled, 4, 11);
        assert!(
            p2.dictionary.len() < 2 * p1.dictionary.len(),
            "doubling should reuse phrases: {} vs {}",
            p2.dictionary.len(),
            p1.dictionary.len()
        );
    }
}
