//! Corpus loading, tokenization, vocabulary and train/validation/test splits.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Characters split off into standalone tokens.
pub const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '\'', '"', '(', ')', '-'];

pub const UNK_TOKEN: &str = "<unk>";
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_ID: u32 = 0;
pub const PAD_ID: u32 = 1;

pub const MIN_SENTENCE_WORDS: usize = 5;
pub const MAX_SENTENCE_WORDS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("corpus too small to split")]
    TooSmall,
    #[error("vocabulary size must be at least 2, got {0}")]
    VocabTooSmall(usize),
    #[error("malformed vocabulary file: {0}")]
    MalformedVocabulary(String),
    #[error("token id {id} out of range for vocabulary of {size}")]
    IdOutOfRange { id: u32, size: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn is_punctuation(token: &str) -> bool {
    let mut chars = token.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if PUNCTUATION.contains(&c))
}

/// Lowercases `text`, splits on whitespace and separates punctuation marks
/// into their own tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for c in chunk.chars().flat_map(char::to_lowercase) {
            if PUNCTUATION.contains(&c) {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            } else {
                word.push(c);
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}

/// A tokenized sentence as word strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence(Vec<String>);

impl Sentence {
    pub fn new(words: Vec<String>) -> Self {
        Sentence(words)
    }

    pub fn parse(text: &str) -> Self {
        Sentence(tokenize(text))
    }

    pub fn words(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of tokens that are not punctuation marks.
    pub fn word_count(&self) -> usize {
        self.0.iter().filter(|t| !is_punctuation(t)).count()
    }

    pub fn text(&self) -> String {
        detokenize(&self.0)
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl From<&str> for Sentence {
    fn from(text: &str) -> Self {
        Sentence::parse(text)
    }
}

/// A sentence as vocabulary indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<u32>);

impl TokenSequence {
    pub fn new(ids: Vec<u32>) -> Self {
        TokenSequence(ids)
    }

    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Word list with `<unk>` at index 0 and `<pad>` at index 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    fn from_tokens(tokens: Vec<String>) -> Result<Self, CorpusError> {
        if tokens.len() < 2 || tokens[0] != UNK_TOKEN || tokens[1] != PAD_TOKEN {
            return Err(CorpusError::MalformedVocabulary(
                "first two tokens must be the unknown and padding markers".into(),
            ));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(CorpusError::MalformedVocabulary(format!("duplicate token {t:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Index of `word`, or the unknown marker.
    pub fn lookup(&self, word: &str) -> u32 {
        self.index.get(word).copied().unwrap_or(UNK_ID)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn encode(&self, sentence: &Sentence) -> TokenSequence {
        TokenSequence(sentence.words().iter().map(|w| self.lookup(w)).collect())
    }

    pub fn decode(&self, seq: &TokenSequence) -> Result<Sentence, CorpusError> {
        seq.ids()
            .iter()
            .map(|&id| {
                self.word(id)
                    .map(str::to_owned)
                    .ok_or(CorpusError::IdOutOfRange { id, size: self.len() })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Sentence)
    }

    /// Writes one token per line; line number is the index.
    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(t);
            out.push('\n');
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path)?;
        Vocabulary::from_tokens(text.lines().map(str::to_owned).collect())
    }
}

/// Keeps the `max_size - 2` most frequent words, ties broken lexicographically.
pub fn build_vocabulary(sentences: &[Sentence], max_size: usize) -> Result<Vocabulary, CorpusError> {
    if max_size < 2 {
        return Err(CorpusError::VocabTooSmall(max_size));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in sentences {
        for w in s.words() {
            *counts.entry(w.as_str()).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut ranked: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|(w, _)| *w != UNK_TOKEN && *w != PAD_TOKEN)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut tokens = vec![UNK_TOKEN.to_owned(), PAD_TOKEN.to_owned()];
    tokens.extend(ranked.into_iter().take(max_size - 2).map(|(w, _)| w.to_owned()));
    Vocabulary::from_tokens(tokens)
}

/// Tokenizes each line of `text` and keeps sentences whose word count
/// (punctuation excluded) lies in `[min_len, max_len]`.
pub fn filter_lines(text: &str, min_len: usize, max_len: usize) -> Vec<Sentence> {
    text.lines()
        .map(Sentence::parse)
        .filter(|s| (min_len..=max_len).contains(&s.word_count()))
        .collect()
}

pub fn load_and_filter(path: &Path, min_len: usize, max_len: usize) -> Result<Vec<Sentence>, CorpusError> {
    let text = fs::read_to_string(path)?;
    Ok(filter_lines(&text, min_len, max_len))
}

/// Train/validation/test partition. `*_indices` refer to positions in the
/// corpus passed to [`split`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
    pub train_indices: Vec<usize>,
    pub validation_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub split_seed: u64,
}

/// Seeded shuffle followed by an 8:1:1 partition.
pub fn split<T: Clone>(corpus: &[T], seed: u64) -> Result<CorpusSplit<T>, CorpusError> {
    let n = corpus.len();
    if n < 10 {
        return Err(CorpusError::TooSmall);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = n / 10;
    let n_test = n / 10;
    let n_train = n - n_val - n_test;
    let train_indices = order[..n_train].to_vec();
    let validation_indices = order[n_train..n_train + n_val].to_vec();
    let test_indices = order[n_train + n_val..].to_vec();
    let pick = |idx: &[usize]| idx.iter().map(|&i| corpus[i].clone()).collect();
    Ok(CorpusSplit {
        train: pick(&train_indices),
        validation: pick(&validation_indices),
        test: pick(&test_indices),
        train_indices,
        validation_indices,
        test_indices,
        split_seed: seed,
    })
}
