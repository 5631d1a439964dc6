//! Shared knowledge base: single-pass threshold clustering of a corpus into
//! mutually dissimilar knowledge sentences, nearest-knowledge lookup and
//! persistence.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::Sentence;
use crate::metrics::{bleu, similarity_of, BleuWeights, Embedder, EmbeddingVector, MetricsError};

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("knowledge base empty")]
    Empty,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("theta must lie in [0, 1], got {0}")]
    InvalidTheta(f64),
    #[error("maximum size must be at least 1")]
    InvalidMaxSize,
    #[error("embedder mismatch: knowledge base built with {expected:016x}, active embedder is {actual:016x}")]
    EmbedderMismatch { expected: u64, actual: u64 },
    #[error("malformed knowledge base: {0}")]
    Malformed(String),
    #[error("knowledge base invariant violated: entries {a} and {b} have similarity {similarity} > theta {theta}")]
    InvariantViolation {
        a: usize,
        b: usize,
        similarity: f64,
        theta: f64,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How the semantic distance `D(s, k)` is measured.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DistanceMetric {
    /// `1 - similarity_score(s, k)` with the knowledge base's embedder.
    #[default]
    Embedding,
    /// `1 - BLEU(k, s)` with knowledge as the reference.
    Bleu(BleuWeights),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeEntry {
    pub index: usize,
    pub sentence: Sentence,
    pub embedding: EmbeddingVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    entries: Vec<KnowledgeEntry>,
    theta: f64,
    max_size: Option<usize>,
    embedder: Embedder,
}

/// Result of a nearest-knowledge query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub index: usize,
    pub distance: f64,
}

impl KnowledgeBase {
    pub fn empty(theta: f64, max_size: Option<usize>, embedder: Embedder) -> Result<Self, KbError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(KbError::InvalidTheta(theta));
        }
        if max_size == Some(0) {
            return Err(KbError::InvalidMaxSize);
        }
        Ok(KnowledgeBase {
            entries: Vec::new(),
            theta,
            max_size,
            embedder,
        })
    }

    /// Builds a knowledge base in one pass over `corpus`: a sentence is
    /// admitted unless its similarity to some existing entry exceeds `theta`.
    pub fn build(corpus: &[Sentence], theta: f64, max_size: Option<usize>, embedder: &Embedder) -> Result<Self, KbError> {
        let mut kb = KnowledgeBase::empty(theta, max_size, embedder.clone())?;
        kb.absorb(corpus)?;
        Ok(kb)
    }

    /// Continues construction from the current entries. Existing indices are
    /// kept and admitted sentences are appended.
    pub fn update(&self, new_corpus: &[Sentence], embedder: &Embedder) -> Result<Self, KbError> {
        self.check_embedder(embedder)?;
        let mut kb = self.clone();
        kb.absorb(new_corpus)?;
        Ok(kb)
    }

    fn absorb(&mut self, corpus: &[Sentence]) -> Result<(), KbError> {
        for sentence in corpus {
            if self.is_full() {
                break;
            }
            let embedding = self.embedder.embed(sentence)?;
            let admit = self
                .entries
                .iter()
                .all(|k| similarity_of(&embedding, &k.embedding) <= self.theta);
            if admit {
                self.entries.push(KnowledgeEntry {
                    index: self.entries.len(),
                    sentence: sentence.clone(),
                    embedding,
                });
            }
        }
        Ok(())
    }

    fn is_full(&self) -> bool {
        self.max_size.is_some_and(|m| self.entries.len() >= m)
    }

    pub fn check_embedder(&self, embedder: &Embedder) -> Result<(), KbError> {
        if embedder.fingerprint() != self.embedder.fingerprint() {
            return Err(KbError::EmbedderMismatch {
                expected: self.embedder.fingerprint(),
                actual: embedder.fingerprint(),
            });
        }
        Ok(())
    }

    pub fn entries(&self) -> &[KnowledgeEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> Option<&KnowledgeEntry> {
        self.entries.get(index)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }

    pub fn embedder(&self) -> &Embedder {
        &self.embedder
    }

    pub fn fingerprint(&self) -> u64 {
        self.embedder.fingerprint()
    }

    /// Bits needed to name one entry on the control plane.
    pub fn index_bits(&self) -> u32 {
        let n = self.entries.len().max(2);
        usize::BITS - (n - 1).leading_zeros()
    }

    /// Entry minimizing `1 - similarity`, lowest index on ties.
    pub fn find_nearest(&self, s: &Sentence) -> Result<Nearest, KbError> {
        let embedding = self.embedder.embed(s)?;
        self.find_nearest_embedding(&embedding)
    }

    pub fn find_nearest_embedding(&self, embedding: &EmbeddingVector) -> Result<Nearest, KbError> {
        let mut best: Option<Nearest> = None;
        for k in &self.entries {
            let distance = 1.0 - similarity_of(embedding, &k.embedding);
            if best.is_none_or(|b| distance < b.distance) {
                best = Some(Nearest { index: k.index, distance });
            }
        }
        best.ok_or(KbError::Empty)
    }

    pub fn find_nearest_with(&self, s: &Sentence, metric: &DistanceMetric) -> Result<Nearest, KbError> {
        match metric {
            DistanceMetric::Embedding => self.find_nearest(s),
            DistanceMetric::Bleu(weights) => {
                let mut best: Option<Nearest> = None;
                for k in &self.entries {
                    let distance = 1.0 - bleu(k.sentence.words(), s.words(), weights)?;
                    if best.is_none_or(|b| distance < b.distance) {
                        best = Some(Nearest { index: k.index, distance });
                    }
                }
                best.ok_or(KbError::Empty)
            }
        }
    }

    /// Mean nearest-knowledge distance over `corpus`.
    pub fn objective(&self, corpus: &[Sentence]) -> Result<f64, KbError> {
        if self.entries.is_empty() {
            return Err(KbError::Empty);
        }
        if corpus.is_empty() {
            return Err(KbError::EmptyCorpus);
        }
        let mut total = 0.0;
        for s in corpus {
            total += self.find_nearest(s)?.distance;
        }
        Ok(total / corpus.len() as f64)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "theta={}", self.theta);
        match self.max_size {
            Some(m) => {
                let _ = writeln!(out, "max_size={m}");
            }
            None => out.push_str("max_size=unlimited\n"),
        }
        let _ = writeln!(out, "embedder={:016x}", self.fingerprint());
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}", e.index, e.sentence.text());
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), KbError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path, embedder: &Embedder) -> Result<Self, KbError> {
        Self::from_text(&fs::read_to_string(path)?, embedder)
    }

    /// Parses the persisted form, recomputing embeddings under `embedder`
    /// and re-checking the pairwise similarity bound.
    pub fn from_text(text: &str, embedder: &Embedder) -> Result<Self, KbError> {
        let mut lines = text.lines();
        let mut header = |key: &str| -> Result<String, KbError> {
            let line = lines
                .next()
                .ok_or_else(|| KbError::Malformed(format!("missing {key} header")))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_owned)
                .ok_or_else(|| KbError::Malformed(format!("expected {key}=..., found {line:?}")))
        };
        let theta: f64 = header("theta")?
            .parse()
            .map_err(|e| KbError::Malformed(format!("theta: {e}")))?;
        let max_size = match header("max_size")?.as_str() {
            "unlimited" => None,
            v => Some(v.parse().map_err(|e| KbError::Malformed(format!("max_size: {e}")))?),
        };
        let fp_text = header("embedder")?;
        let fingerprint =
            u64::from_str_radix(&fp_text, 16).map_err(|e| KbError::Malformed(format!("embedder: {e}")))?;

        let mut kb = KnowledgeBase::empty(theta, max_size, embedder.clone())
            .map_err(|e| KbError::Malformed(e.to_string()))?;
        if fingerprint != embedder.fingerprint() {
            return Err(KbError::EmbedderMismatch {
                expected: fingerprint,
                actual: embedder.fingerprint(),
            });
        }
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let (idx, sentence) = line
                .split_once('\t')
                .ok_or_else(|| KbError::Malformed(format!("entry without tab: {line:?}")))?;
            let index: usize = idx
                .parse()
                .map_err(|e| KbError::Malformed(format!("entry index {idx:?}: {e}")))?;
            if index != kb.entries.len() {
                return Err(KbError::Malformed(format!(
                    "entry index {index} where {} was expected",
                    kb.entries.len()
                )));
            }
            let sentence = Sentence::parse(sentence);
            let embedding = embedder.embed(&sentence)?;
            kb.entries.push(KnowledgeEntry { index, sentence, embedding });
        }
        if kb.max_size.is_some_and(|m| kb.entries.len() > m) {
            return Err(KbError::Malformed("more entries than max_size".into()));
        }
        kb.verify_separation()?;
        Ok(kb)
    }

    /// Exhaustively checks that every pair of entries has similarity at most theta.
    pub fn verify_separation(&self) -> Result<(), KbError> {
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                let similarity = similarity_of(&a.embedding, &b.embedding);
                if similarity > self.theta {
                    return Err(KbError::InvariantViolation {
                        a: a.index,
                        b: b.index,
                        similarity,
                        theta: self.theta,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        Sentence::parse(text)
    }

    fn corpus() -> Vec<Sentence> {
        [
            "the commission adopted the proposal on energy",
            "the commission adopted the proposal on energy policy",
            "fishermen in the north sea need support",
            "we must vote on the budget tomorrow morning",
            "the council rejected the amendment on fisheries",
            "my group supports the report on human rights",
        ]
        .iter()
        .map(|t| s(t))
        .collect()
    }

    #[test]
    fn empty_corpus_gives_empty_kb() {
        let kb = KnowledgeBase::build(&[], 0.3, None, &Embedder::default()).unwrap();
        assert!(kb.is_empty());
        assert!(matches!(kb.find_nearest(&s("a b c")), Err(KbError::Empty)));
        assert!(matches!(kb.objective(&corpus()), Err(KbError::Empty)));
    }

    #[test]
    fn repeated_sentence_admitted_once() {
        let c = vec![s("the same sentence again and again"); 10];
        let kb = KnowledgeBase::build(&c, 0.9, None, &Embedder::default()).unwrap();
        assert_eq!(kb.len(), 1);
    }

    #[test]
    fn invalid_parameters() {
        let e = Embedder::default();
        assert!(matches!(KnowledgeBase::build(&[], 1.5, None, &e), Err(KbError::InvalidTheta(_))));
        assert!(matches!(KnowledgeBase::build(&[], 0.5, Some(0), &e), Err(KbError::InvalidMaxSize)));
    }

    #[test]
    fn max_size_caps_insertion() {
        let kb = KnowledgeBase::build(&corpus(), 1.0, Some(3), &Embedder::default()).unwrap();
        assert_eq!(kb.len(), 3);
        let idx: Vec<usize> = kb.entries().iter().map(|e| e.index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn nearest_examples() {
        let e = Embedder::default();
        let c = corpus();
        let kb = KnowledgeBase::build(&c[..1], 0.3, None, &e).unwrap();
        let n = kb.find_nearest(&c[2]).unwrap();
        assert_eq!(n.index, 0);
        let expected = 1.0 - e.similarity_score(&c[2], &c[0]).unwrap();
        assert!((n.distance - expected).abs() < 1e-12);

        let kb = KnowledgeBase::build(&c, 1.0, None, &e).unwrap();
        for (i, sent) in c.iter().enumerate() {
            let n = kb.find_nearest(sent).unwrap();
            assert_eq!(n.index, i);
            assert!(n.distance.abs() < 1e-9);
        }
    }

    #[test]
    fn ties_resolve_to_lowest_index() {
        let mut table = std::collections::HashMap::new();
        table.insert("a b".to_owned(), vec![1.0, 0.0]);
        table.insert("c d".to_owned(), vec![0.0, 1.0]);
        table.insert("e f".to_owned(), vec![1.0, 1.0]);
        let e = Embedder::external(table).unwrap();
        let kb = KnowledgeBase::build(&[s("a b"), s("c d")], 0.5, None, &e).unwrap();
        assert_eq!(kb.len(), 2);
        let n = kb.find_nearest(&s("e f")).unwrap();
        assert_eq!(n.index, 0);
    }

    #[test]
    fn objective_examples() {
        let e = Embedder::default();
        let c = corpus();
        let kb = KnowledgeBase::build(&c, 1.0, None, &e).unwrap();
        assert!(kb.objective(&c).unwrap().abs() < 1e-9);

        let single = KnowledgeBase::build(&c[..1], 1.0, None, &e).unwrap();
        let mut direct = 0.0;
        for sent in &c {
            direct += 1.0 - e.similarity_score(sent, &c[0]).unwrap();
        }
        direct /= c.len() as f64;
        assert!((single.objective(&c).unwrap() - direct).abs() < 1e-12);
        assert!(matches!(single.objective(&[]), Err(KbError::EmptyCorpus)));

        let bigger = single.update(&c[3..4], &e).unwrap();
        assert!(bigger.len() == 2);
        assert!(bigger.objective(&c).unwrap() <= single.objective(&c).unwrap());
    }

    #[test]
    fn update_semantics() {
        let e = Embedder::default();
        let c = corpus();
        let kb = KnowledgeBase::build(&c[..3], 0.3, None, &e).unwrap();
        let same = kb.update(&kb.entries().iter().map(|k| k.sentence.clone()).collect::<Vec<_>>(), &e).unwrap();
        assert_eq!(same, kb);

        let empty = KnowledgeBase::empty(0.3, None, e.clone()).unwrap();
        assert_eq!(empty.update(&c, &e).unwrap(), KnowledgeBase::build(&c, 0.3, None, &e).unwrap());

        let grown = kb.update(&c[3..], &e).unwrap();
        assert_eq!(&grown.entries()[..kb.len()], kb.entries());
        grown.verify_separation().unwrap();

        let other = Embedder::hashed(128).unwrap();
        assert!(matches!(kb.update(&c, &other), Err(KbError::EmbedderMismatch { .. })));
    }

    #[test]
    fn bleu_distance_metric() {
        let e = Embedder::default();
        let c = corpus();
        let kb = KnowledgeBase::build(&c, 1.0, None, &e).unwrap();
        let n = kb.find_nearest_with(&c[3], &DistanceMetric::Bleu(BleuWeights::single(1))).unwrap();
        assert_eq!(n.index, 3);
        assert_eq!(n.distance, 0.0);
    }

    #[test]
    fn index_bits() {
        let e = Embedder::default();
        let c = corpus();
        let bits = |n: usize| KnowledgeBase::build(&c[..n], 1.0, None, &e).unwrap().index_bits();
        assert_eq!(bits(0), 1);
        assert_eq!(bits(1), 1);
        assert_eq!(bits(2), 1);
        assert_eq!(bits(3), 2);
        assert_eq!(bits(4), 2);
        assert_eq!(bits(5), 3);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let e = Embedder::default();
        let kb = KnowledgeBase::build(&corpus(), 0.6, Some(10), &e).unwrap();
        let text = kb.to_text();
        let back = KnowledgeBase::from_text(&text, &e).unwrap();
        assert_eq!(back, kb);
        assert_eq!(back.to_text(), text);

        let dup = text.replacen("\n1\t", "\n0\t", 1);
        assert!(matches!(KnowledgeBase::from_text(&dup, &e), Err(KbError::Malformed(_))));
        assert!(matches!(
            KnowledgeBase::from_text(&text, &Embedder::hashed(32).unwrap()),
            Err(KbError::EmbedderMismatch { .. })
        ));
        assert!(matches!(KnowledgeBase::from_text("theta=0.3\n", &e), Err(KbError::Malformed(_))));

        let fp = format!("embedder={:016x}", e.fingerprint());
        let violating = format!("theta=0.3\nmax_size=unlimited\n{fp}\n0\tthe same words here\n1\tthe same words here\n");
        assert!(matches!(
            KnowledgeBase::from_text(&violating, &e),
            Err(KbError::InvariantViolation { a: 0, b: 1, .. })
        ));
    }
}
