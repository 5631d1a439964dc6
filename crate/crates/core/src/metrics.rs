//! Sentence fidelity metrics: BLEU and embedding cosine similarity.

use std::collections::HashMap;
use std::fs;
use std::hash::Hash;
use std::path::Path;
use std::sync::Arc;

use crate::corpus::Sentence;
use crate::hash::{fnv1a64, Fnv1a};

pub const DEFAULT_EMBEDDING_DIM: usize = 256;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("empty sentence")]
    EmptySentence,
    #[error("embedding not found")]
    EmbeddingNotFound(String),
    #[error("invalid BLEU weights: {0}")]
    InvalidWeights(String),
    #[error("embedding dimension must be positive")]
    ZeroDimension,
    #[error("malformed embedding table at line {line}: {reason}")]
    MalformedTable { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Weights over n-gram orders 1..=N. They sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BleuWeights(Vec<f64>);

impl BleuWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self, MetricsError> {
        if weights.is_empty() {
            return Err(MetricsError::InvalidWeights("at least one order required".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(MetricsError::InvalidWeights("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(MetricsError::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(BleuWeights(weights))
    }

    /// Equal weight on orders 1..=n.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        BleuWeights(vec![1.0 / n as f64; n])
    }

    /// All weight on a single order `n` (the usual "BLEU-n" curves).
    pub fn single(n: usize) -> Self {
        assert!(n >= 1);
        let mut w = vec![0.0; n];
        w[n - 1] = 1.0;
        BleuWeights(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn max_order(&self) -> usize {
        self.0.len()
    }
}

/// Length factor of the BLEU score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BrevityFactor {
    /// `min(1, exp(1 - len(candidate)/len(reference)))`.
    #[default]
    AsPrinted,
    /// Conventional BLEU: `min(1, exp(1 - len(reference)/len(candidate)))`.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BleuOptions {
    pub brevity: BrevityFactor,
    /// Add one to matched and total n-gram counts of every order.
    pub add_one_smoothing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgramPrecision {
    pub value: f64,
    /// The candidate has fewer than `n` tokens.
    pub degenerate: bool,
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_default() += 1;
        }
    }
    counts
}

fn clipped_counts<T: Eq + Hash>(reference: &[T], candidate: &[T], n: usize) -> (usize, usize) {
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    let matched = cand
        .iter()
        .map(|(gram, &c)| c.min(refc.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = cand.values().sum();
    (matched, total)
}

/// Clipped n-gram precision of `candidate` against `reference`.
pub fn ngram_precision<T: Eq + Hash>(reference: &[T], candidate: &[T], n: usize) -> NgramPrecision {
    assert!(n >= 1, "n-gram order must be at least 1");
    if candidate.len() < n {
        return NgramPrecision { value: 0.0, degenerate: true };
    }
    let (matched, total) = clipped_counts(reference, candidate, n);
    NgramPrecision {
        value: matched as f64 / total as f64,
        degenerate: false,
    }
}

pub fn bleu<T: Eq + Hash>(reference: &[T], candidate: &[T], weights: &BleuWeights) -> Result<f64, MetricsError> {
    bleu_with(reference, candidate, weights, BleuOptions::default())
}

pub fn bleu_with<T: Eq + Hash>(
    reference: &[T],
    candidate: &[T],
    weights: &BleuWeights,
    options: BleuOptions,
) -> Result<f64, MetricsError> {
    if reference.is_empty() || candidate.is_empty() {
        return Err(MetricsError::EmptySentence);
    }
    let ratio = match options.brevity {
        BrevityFactor::AsPrinted => candidate.len() as f64 / reference.len() as f64,
        BrevityFactor::Standard => reference.len() as f64 / candidate.len() as f64,
    };
    let brevity = (1.0 - ratio).exp().min(1.0);

    let mut log_sum = 0.0;
    for (i, &w) in weights.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let n = i + 1;
        // An order neither sentence is long enough to contain carries no evidence.
        if candidate.len() < n && reference.len() < n {
            continue;
        }
        let (mut matched, mut total) = if candidate.len() < n {
            (0, 0)
        } else {
            clipped_counts(reference, candidate, n)
        };
        if options.add_one_smoothing {
            matched += 1;
            total += 1;
        }
        if matched == 0 {
            return Ok(0.0);
        }
        log_sum += w * (matched as f64 / total as f64).ln();
    }
    Ok((brevity * log_sum.exp()).clamp(0.0, 1.0))
}

/// Fixed-dimension sentence embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(components: Vec<f64>) -> Self {
        EmbeddingVector(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &EmbeddingVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Cosine similarity; zero if either vector has zero norm.
    pub fn cosine(&self, other: &EmbeddingVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            0.0
        } else {
            self.dot(other) / denom
        }
    }
}

/// Cosine clamped into `[0, 1]`.
pub fn similarity_of(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    a.cosine(b).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
enum EmbedderKind {
    /// Bag of word unigrams and character trigrams hashed into `dim` buckets.
    Hashed,
    External(Arc<HashMap<String, Vec<f64>>>),
}

/// Deterministic sentence embedder.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedder {
    kind: EmbedderKind,
    dim: usize,
    fingerprint: u64,
}

impl Default for Embedder {
    fn default() -> Self {
        Embedder::hashed(DEFAULT_EMBEDDING_DIM).expect("default dimension is positive")
    }
}

impl Embedder {
    pub fn hashed(dim: usize) -> Result<Self, MetricsError> {
        if dim == 0 {
            return Err(MetricsError::ZeroDimension);
        }
        let fingerprint = fnv1a64(format!("hashed-ngram/fnv1a64/unigram+char3/dim={dim}").as_bytes());
        Ok(Embedder {
            kind: EmbedderKind::Hashed,
            dim,
            fingerprint,
        })
    }

    /// Embedder backed by a fixed table from sentence text to vector.
    pub fn external(table: HashMap<String, Vec<f64>>) -> Result<Self, MetricsError> {
        let dim = table.values().next().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(MetricsError::ZeroDimension);
        }
        let mut keys: Vec<&String> = table.keys().collect();
        keys.sort();
        let mut h = Fnv1a::new();
        h.update(format!("external/dim={dim}").as_bytes());
        for k in keys {
            let v = &table[k];
            if v.len() != dim {
                return Err(MetricsError::MalformedTable {
                    line: 0,
                    reason: format!("vector for {k:?} has dimension {}, expected {dim}", v.len()),
                });
            }
            h.update(k.as_bytes());
            h.update(&[0]);
            for x in v {
                h.update(&x.to_bits().to_le_bytes());
            }
        }
        Ok(Embedder {
            kind: EmbedderKind::External(Arc::new(table)),
            dim,
            fingerprint: h.finish(),
        })
    }

    /// Loads `sentence<TAB>v1,v2,...,vD` records. Keys are re-tokenized so
    /// they match [`Sentence::text`].
    pub fn load_external(path: &Path) -> Result<Self, MetricsError> {
        let text = fs::read_to_string(path).map_err(|e| MetricsError::Io(e.to_string()))?;
        let mut table = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (sentence, values) = line.split_once('\t').ok_or_else(|| MetricsError::MalformedTable {
                line: i + 1,
                reason: "missing tab separator".into(),
            })?;
            let vector = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| MetricsError::MalformedTable {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(MetricsError::MalformedTable {
                    line: i + 1,
                    reason: "non-finite component".into(),
                });
            }
            table.insert(Sentence::parse(sentence).text(), vector);
        }
        Embedder::external(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn is_external(&self) -> bool {
        matches!(self.kind, EmbedderKind::External(_))
    }

    pub fn embed(&self, sentence: &Sentence) -> Result<EmbeddingVector, MetricsError> {
        if sentence.is_empty() {
            return Err(MetricsError::EmptySentence);
        }
        let text = sentence.text();
        match &self.kind {
            EmbedderKind::External(table) => table
                .get(&text)
                .map(|v| EmbeddingVector(v.clone()))
                .ok_or(MetricsError::EmbeddingNotFound(text)),
            EmbedderKind::Hashed => {
                let mut v = vec![0.0; self.dim];
                let mut bump = |bytes: &[u8]| {
                    v[(fnv1a64(bytes) % self.dim as u64) as usize] += 1.0;
                };
                for w in sentence.words() {
                    bump(w.as_bytes());
                }
                let chars: Vec<char> = text.chars().collect();
                let mut buf = String::new();
                for tri in chars.windows(3) {
                    buf.clear();
                    buf.extend(tri);
                    bump(buf.as_bytes());
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                Ok(EmbeddingVector(v))
            }
        }
    }

    pub fn similarity_score(&self, a: &Sentence, b: &Sentence) -> Result<f64, MetricsError> {
        Ok(similarity_of(&self.embed(a)?, &self.embed(b)?))
    }
}
