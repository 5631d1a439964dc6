//! The 64-character alphabet and the fixed 6-bit character code.

use super::bits::{read_bits, BitStream};
use super::CodecError;

pub const ALPHABET_SIZE: usize = 64;
pub const FIXED_CODE_BITS: usize = 6;

const SYMBOLS: &str = ".,!?;:'\"()-_/\\@#$%&*+=<>[]~";

/// Lowercase letters, digits, space and 27 punctuation marks, each with a
/// 6-bit index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharAlphabet {
    chars: Vec<char>,
}

impl Default for CharAlphabet {
    fn default() -> Self {
        let chars: Vec<char> = ('a'..='z').chain('0'..='9').chain([' ']).chain(SYMBOLS.chars()).collect();
        debug_assert_eq!(chars.len(), ALPHABET_SIZE);
        CharAlphabet { chars }
    }
}

impl CharAlphabet {
    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn index_of(&self, c: char) -> Option<u32> {
        match c {
            'a'..='z' => Some(c as u32 - 'a' as u32),
            '0'..='9' => Some(26 + c as u32 - '0' as u32),
            ' ' => Some(36),
            _ => SYMBOLS.chars().position(|s| s == c).map(|p| 37 + p as u32),
        }
    }

    pub fn char_at(&self, index: u32) -> Option<char> {
        self.chars.get(index as usize).copied()
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    /// Replaces characters outside the alphabet by spaces, returning the
    /// cleaned text and the number of replacements.
    pub fn sanitize(&self, text: &str) -> (String, usize) {
        let mut replaced = 0;
        let out = text
            .chars()
            .map(|c| {
                if self.contains(c) {
                    c
                } else {
                    replaced += 1;
                    ' '
                }
            })
            .collect();
        (out, replaced)
    }
}

/// Encodes each character as its 6-bit alphabet index. Returns the bits and
/// the count of characters that were replaced by space.
pub fn fixed6_encode(alphabet: &CharAlphabet, text: &str) -> (BitStream, usize) {
    let (clean, replaced) = alphabet.sanitize(text);
    if replaced > 0 {
        log::warn!("{replaced} characters outside the alphabet mapped to space");
    }
    let mut bits = BitStream::new();
    for c in clean.chars() {
        bits.push_bits(alphabet.index_of(c).expect("sanitized"), FIXED_CODE_BITS);
    }
    (bits, replaced)
}

pub fn fixed6_decode(alphabet: &CharAlphabet, bits: &BitStream) -> Result<String, CodecError> {
    if bits.len() % FIXED_CODE_BITS != 0 {
        return Err(CodecError::BadLength {
            len: bits.len(),
            multiple: FIXED_CODE_BITS,
        });
    }
    Ok(bits
        .bits()
        .chunks_exact(FIXED_CODE_BITS)
        .map(|chunk| alphabet.char_at(read_bits(chunk)).expect("6-bit index is always in range"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alphabet_is_a_bijection_on_64_chars() {
        let a = CharAlphabet::default();
        assert_eq!(a.chars().len(), 64);
        for (i, &c) in a.chars().iter().enumerate() {
            assert_eq!(a.index_of(c), Some(i as u32));
            assert_eq!(a.char_at(i as u32), Some(c));
        }
        let mut sorted = a.chars().to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 64);
    }

    #[test]
    fn fixed_length_and_errors() {
        let a = CharAlphabet::default();
        let (bits, replaced) = fixed6_encode(&a, "hello, world");
        assert_eq!(bits.len(), 6 * 12);
        assert_eq!(replaced, 0);
        assert_eq!(fixed6_decode(&a, &bits).unwrap(), "hello, world");
        let seven = BitStream::from_bits(vec![true; 7]);
        assert!(matches!(fixed6_decode(&a, &seven), Err(CodecError::BadLength { len: 7, .. })));
        let (bits, replaced) = fixed6_encode(&a, "café\tok");
        assert_eq!(replaced, 2);
        assert_eq!(fixed6_decode(&a, &bits).unwrap(), "caf  ok");
    }

    proptest! {
        #[test]
        fn round_trip(idx in prop::collection::vec(0usize..64, 0..80)) {
            let a = CharAlphabet::default();
            let text: String = idx.iter().map(|&i| a.chars()[i]).collect();
            let (bits, _) = fixed6_encode(&a, &text);
            prop_assert_eq!(bits.len(), 6 * idx.len());
            prop_assert_eq!(fixed6_decode(&a, &bits).unwrap(), text);
        }
    }
}
