//! Canonical Huffman character code.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use super::bits::BitStream;
use super::CodecError;

/// Code table: each character maps to its code word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCode {
    table: BTreeMap<char, BitStream>,
    trie: Vec<[Option<Node>; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Inner(usize),
    Leaf(char),
}

#[derive(Debug, PartialEq)]
struct HeapItem {
    weight: f64,
    key: char,
    id: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight.total_cmp(&other.weight).then(self.key.cmp(&other.key))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Character counts over `texts`.
pub fn char_frequencies<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> BTreeMap<char, f64> {
    let mut f = BTreeMap::new();
    for t in texts {
        for c in t.chars() {
            *f.entry(c).or_insert(0.0) += 1.0;
        }
    }
    f
}

/// Shannon entropy in bits of the normalized frequencies.
pub fn entropy_bits(freqs: &BTreeMap<char, f64>) -> f64 {
    let total: f64 = freqs.values().sum();
    freqs
        .values()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

impl HuffmanCode {
    /// Builds the canonical code for the characters with positive weight.
    /// Heap ties are broken by the smallest character in each subtree.
    pub fn build(freqs: &BTreeMap<char, f64>) -> Result<Self, CodecError> {
        let symbols: Vec<(char, f64)> = freqs
            .iter()
            .filter(|(_, &w)| w > 0.0 && w.is_finite())
            .map(|(&c, &w)| (c, w))
            .collect();
        if symbols.is_empty() {
            return Err(CodecError::EmptyAlphabet);
        }
        let lengths = if symbols.len() == 1 {
            vec![(symbols[0].0, 1usize)]
        } else {
            // parent links over leaves 0..n and merged nodes n..
            let n = symbols.len();
            let mut parent = vec![usize::MAX; 2 * n - 1];
            let mut heap: BinaryHeap<Reverse<HeapItem>> = symbols
                .iter()
                .enumerate()
                .map(|(id, &(key, weight))| Reverse(HeapItem { weight, key, id }))
                .collect();
            let mut next = n;
            while heap.len() > 1 {
                let Reverse(a) = heap.pop().expect("len > 1");
                let Reverse(b) = heap.pop().expect("len > 1");
                parent[a.id] = next;
                parent[b.id] = next;
                heap.push(Reverse(HeapItem {
                    weight: a.weight + b.weight,
                    key: a.key.min(b.key),
                    id: next,
                }));
                next += 1;
            }
            symbols
                .iter()
                .enumerate()
                .map(|(i, &(c, _))| {
                    let mut depth = 0;
                    let mut node = i;
                    while parent[node] != usize::MAX {
                        node = parent[node];
                        depth += 1;
                    }
                    (c, depth)
                })
                .collect()
        };
        Self::from_lengths(&lengths)
    }

    /// Assigns canonical code words ordered by (length, character).
    pub fn from_lengths(lengths: &[(char, usize)]) -> Result<Self, CodecError> {
        let mut sorted = lengths.to_vec();
        sorted.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut table = BTreeMap::new();
        let mut code: u64 = 0;
        let mut prev_len = sorted.first().map(|x| x.1).unwrap_or(0);
        for (i, &(c, len)) in sorted.iter().enumerate() {
            if len == 0 || len > 63 {
                return Err(CodecError::InvalidTable(format!("code length {len} for {c:?}")));
            }
            if i > 0 {
                code += 1;
                code <<= len - prev_len;
            }
            prev_len = len;
            if code >> len != 0 {
                return Err(CodecError::InvalidTable("lengths violate the Kraft inequality".into()));
            }
            let mut bits = BitStream::new();
            for b in (0..len).rev() {
                bits.push((code >> b) & 1 == 1);
            }
            table.insert(c, bits);
        }
        Self::from_table(table)
    }

    fn from_table(table: BTreeMap<char, BitStream>) -> Result<Self, CodecError> {
        if table.is_empty() {
            return Err(CodecError::EmptyAlphabet);
        }
        let mut trie: Vec<[Option<Node>; 2]> = vec![[None, None]];
        for (&c, word) in &table {
            if word.is_empty() {
                return Err(CodecError::InvalidTable(format!("empty code word for {c:?}")));
            }
            let mut at = 0;
            let last = word.len() - 1;
            for (i, &bit) in word.bits().iter().enumerate() {
                let slot = usize::from(bit);
                match (trie[at][slot], i == last) {
                    (None, true) => trie[at][slot] = Some(Node::Leaf(c)),
                    (None, false) => {
                        trie.push([None, None]);
                        let id = trie.len() - 1;
                        trie[at][slot] = Some(Node::Inner(id));
                        at = id;
                    }
                    (Some(Node::Inner(next)), false) => at = next,
                    _ => return Err(CodecError::InvalidTable("code is not prefix-free".into())),
                }
            }
        }
        Ok(HuffmanCode { table, trie })
    }

    pub fn table(&self) -> &BTreeMap<char, BitStream> {
        &self.table
    }

    pub fn code_length(&self, c: char) -> Option<usize> {
        self.table.get(&c).map(BitStream::len)
    }

    pub fn contains(&self, c: char) -> bool {
        self.table.contains_key(&c)
    }

    /// Mean code length under the normalized frequencies.
    pub fn expected_length(&self, freqs: &BTreeMap<char, f64>) -> f64 {
        let total: f64 = freqs.values().sum();
        freqs
            .iter()
            .map(|(c, w)| w / total * self.code_length(*c).unwrap_or(0) as f64)
            .sum()
    }

    pub fn encode(&self, text: &str) -> Result<BitStream, CodecError> {
        let mut out = BitStream::new();
        for c in text.chars() {
            out.extend_from(self.table.get(&c).ok_or(CodecError::UnknownSymbol(c))?);
        }
        Ok(out)
    }

    /// Decodes until the stream ends. A path leaving the code tree or a
    /// dangling partial code word yields [`CodecError::CorruptBitstream`]
    /// carrying the text decoded so far.
    pub fn decode(&self, bits: &BitStream) -> Result<String, CodecError> {
        let mut out = String::new();
        let mut at = 0;
        for &bit in bits.bits() {
            match self.trie[at][usize::from(bit)] {
                Some(Node::Leaf(c)) => {
                    out.push(c);
                    at = 0;
                }
                Some(Node::Inner(next)) => at = next,
                None => return Err(CodecError::CorruptBitstream { decoded_prefix: out }),
            }
        }
        if at != 0 {
            return Err(CodecError::CorruptBitstream { decoded_prefix: out });
        }
        Ok(out)
    }

    /// `char<TAB>bitstring` lines in character order.
    pub fn to_text(&self) -> String {
        self.table
            .iter()
            .map(|(c, w)| format!("{c}\t{}\n", w.to_string_bits()))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self, CodecError> {
        let mut table = BTreeMap::new();
        for line in text.split('\n').filter(|l| !l.is_empty()) {
            let (c, bits) = line
                .split_once('\t')
                .ok_or_else(|| CodecError::InvalidTable(format!("line without tab: {line:?}")))?;
            let mut chars = c.chars();
            let ch = match (chars.next(), chars.next()) {
                (Some(ch), None) => ch,
                _ => return Err(CodecError::InvalidTable(format!("expected one character, got {c:?}"))),
            };
            let word = bits
                .chars()
                .map(|b| match b {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(CodecError::InvalidTable(format!("bad bit {b:?}"))),
                })
                .collect::<Result<BitStream, _>>()?;
            if table.insert(ch, word).is_some() {
                return Err(CodecError::InvalidTable(format!("duplicate character {ch:?}")));
            }
        }
        Self::from_table(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn freqs(pairs: &[(char, f64)]) -> BTreeMap<char, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn dyadic_example() {
        let code = HuffmanCode::build(&freqs(&[('a', 0.5), ('b', 0.25), ('c', 0.25)])).unwrap();
        assert_eq!(code.code_length('a'), Some(1));
        assert_eq!(code.code_length('b'), Some(2));
        assert_eq!(code.code_length('c'), Some(2));
        assert_eq!(code.table()[&'a'].to_string_bits(), "0");
        assert_eq!(code.table()[&'b'].to_string_bits(), "10");
        assert_eq!(code.table()[&'c'].to_string_bits(), "11");
    }

    /// Minimum expected length over all length assignments satisfying
    /// Kraft's inequality with equality is attained by some prefix code; search
    /// them exhaustively for tiny alphabets.
    fn brute_force_optimum(weights: &[f64]) -> f64 {
        fn rec(i: usize, lens: &mut Vec<usize>, w: &[f64], best: &mut f64) {
            if i == w.len() {
                let kraft: f64 = lens.iter().map(|&l| 0.5f64.powi(l as i32)).sum();
                if kraft <= 1.0 + 1e-12 {
                    let total: f64 = w.iter().sum();
                    let e: f64 = lens.iter().zip(w).map(|(&l, &x)| l as f64 * x / total).sum();
                    if e < *best {
                        *best = e;
                    }
                }
                return;
            }
            for l in 1..=w.len() {
                lens.push(l);
                rec(i + 1, lens, w, best);
                lens.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(0, &mut Vec::new(), weights, &mut best);
        best
    }

    #[test]
    fn optimal_against_brute_force() {
        let cases: &[&[f64]] = &[&[0.5, 0.25, 0.25], &[3.0, 1.0, 1.0, 1.0, 2.0], &[1.0, 1.0, 1.0, 1.0, 1.0], &[10.0, 1.0, 4.0, 4.0, 2.0, 7.0]];
        for w in cases {
            let f: BTreeMap<char, f64> = w.iter().enumerate().map(|(i, &x)| ((b'a' + i as u8) as char, x)).collect();
            let code = HuffmanCode::build(&f).unwrap();
            let opt = brute_force_optimum(w);
            assert!((code.expected_length(&f) - opt).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn single_symbol_gets_one_bit() {
        let code = HuffmanCode::build(&freqs(&[('x', 3.0)])).unwrap();
        assert_eq!(code.code_length('x'), Some(1));
        let bits = code.encode("xxx").unwrap();
        assert_eq!(bits.len(), 3);
        assert_eq!(code.decode(&bits).unwrap(), "xxx");
        let bad = BitStream::from_bits(vec![false, true]);
        assert_eq!(
            code.decode(&bad),
            Err(CodecError::CorruptBitstream { decoded_prefix: "x".into() })
        );
    }

    #[test]
    fn errors() {
        assert_eq!(HuffmanCode::build(&BTreeMap::new()), Err(CodecError::EmptyAlphabet));
        let code = HuffmanCode::build(&freqs(&[('a', 0.5), ('b', 0.25), ('c', 0.25)])).unwrap();
        assert_eq!(code.encode("abz"), Err(CodecError::UnknownSymbol('z')));
        let dangling = BitStream::from_bits(vec![false, true]);
        assert!(matches!(code.decode(&dangling), Err(CodecError::CorruptBitstream { .. })));
    }

    #[test]
    fn table_text_round_trip() {
        let f = char_frequencies(["the quick brown fox jumps over the lazy dog."]);
        let code = HuffmanCode::build(&f).unwrap();
        let back = HuffmanCode::from_text(&code.to_text()).unwrap();
        assert_eq!(back, code);
        assert!(HuffmanCode::from_text("a\t0\nb\t01\n").is_err());
    }

    proptest! {
        #[test]
        fn prefix_free_and_inverse(text in "[a-h ]{1,60}", probe in "[a-h ]{0,40}") {
            let f = char_frequencies([text.as_str()]);
            let code = HuffmanCode::build(&f).unwrap();
            let words: Vec<&BitStream> = code.table().values().collect();
            for (i, a) in words.iter().enumerate() {
                for (j, b) in words.iter().enumerate() {
                    if i != j {
                        prop_assert!(!b.bits().starts_with(a.bits()));
                    }
                }
            }
            let h = entropy_bits(&f);
            let l = code.expected_length(&f);
            if f.len() > 1 {
                prop_assert!(l >= h - 1e-12 && l < h + 1.0);
            } else {
                prop_assert_eq!(l, 1.0);
            }
            let probe: String = probe.chars().filter(|c| code.contains(*c)).collect();
            prop_assert_eq!(code.decode(&code.encode(&probe).unwrap()).unwrap(), probe);
        }
    }
}
