//! Knowledge self-information, knowledge-base entropy, semantic
//! self-information and source semantic entropy, all in bits.
//!
//! The knowledge distribution is the push-forward of the source distribution
//! through nearest-knowledge assignment, under which
//! `H_s(S) = H(K) + E[-lambda * log2(1 - D)]` holds exactly.

use std::fmt::Write as _;

use crate::corpus::Sentence;
use crate::knowledge_base::{DistanceMetric, KbError, KnowledgeBase, Nearest};

const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum InfoError {
    #[error("knowledge base empty")]
    EmptyKnowledgeBase,
    #[error("empty source")]
    EmptySource,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("knowledge has zero mass")]
    ZeroMass(usize),
    #[error("knowledge index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Message sentences with their occurrence probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    sentences: Vec<Sentence>,
    probabilities: Vec<f64>,
}

impl SourceModel {
    pub fn new(sentences: Vec<Sentence>, probabilities: Vec<f64>) -> Result<Self, InfoError> {
        if sentences.is_empty() {
            return Err(InfoError::EmptySource);
        }
        if sentences.len() != probabilities.len() {
            return Err(InfoError::InvalidDistribution(format!(
                "{} sentences but {} probabilities",
                sentences.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(InfoError::InvalidDistribution("probabilities must be positive".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(InfoError::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(SourceModel { sentences, probabilities })
    }

    /// Every corpus line carries mass `1/n`; repeated lines accumulate.
    pub fn empirical(corpus: &[Sentence]) -> Result<Self, InfoError> {
        if corpus.is_empty() {
            return Err(InfoError::EmptySource);
        }
        let p = 1.0 / corpus.len() as f64;
        Ok(SourceModel {
            sentences: corpus.to_vec(),
            probabilities: vec![p; corpus.len()],
        })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// One probability per knowledge-base entry.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeDistribution(Vec<f64>);

impl KnowledgeDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, InfoError> {
        if probabilities.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(InfoError::InvalidDistribution("probabilities must be non-negative".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(InfoError::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(KnowledgeDistribution(probabilities))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticInfoConfig {
    pub lambda: f64,
    /// Distances are clamped to this value before `log2(1 - D)`.
    pub d_max: f64,
    pub metric: DistanceMetric,
}

impl Default for SemanticInfoConfig {
    fn default() -> Self {
        SemanticInfoConfig {
            lambda: 1.0,
            d_max: 1.0 - 1e-9,
            metric: DistanceMetric::Embedding,
        }
    }
}

impl SemanticInfoConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        SemanticInfoConfig {
            lambda,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), InfoError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(InfoError::InvalidConfig(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.d_max > 0.0 && self.d_max < 1.0) {
            return Err(InfoError::InvalidConfig(format!("d_max must lie in (0, 1), got {}", self.d_max)));
        }
        Ok(())
    }

    /// `-lambda * log2(1 - min(D, d_max))`.
    pub fn distance_penalty(&self, distance: f64) -> f64 {
        -self.lambda * (1.0 - distance.min(self.d_max)).log2()
    }
}

fn nearest_all(source: &SourceModel, kb: &KnowledgeBase, metric: &DistanceMetric) -> Result<Vec<Nearest>, InfoError> {
    if kb.is_empty() {
        return Err(InfoError::EmptyKnowledgeBase);
    }
    source
        .sentences()
        .iter()
        .map(|s| kb.find_nearest_with(s, metric).map_err(InfoError::from))
        .collect()
}

fn push_forward(source: &SourceModel, kb_len: usize, nearest: &[Nearest]) -> KnowledgeDistribution {
    let mut p = vec![0.0; kb_len];
    for (n, ps) in nearest.iter().zip(source.probabilities()) {
        p[n.index] += ps;
    }
    KnowledgeDistribution(p)
}

/// `p(k)`: total source mass of sentences whose nearest knowledge is `k`.
pub fn induced_distribution(source: &SourceModel, kb: &KnowledgeBase) -> Result<KnowledgeDistribution, InfoError> {
    induced_distribution_with(source, kb, &DistanceMetric::Embedding)
}

pub fn induced_distribution_with(
    source: &SourceModel,
    kb: &KnowledgeBase,
    metric: &DistanceMetric,
) -> Result<KnowledgeDistribution, InfoError> {
    let nearest = nearest_all(source, kb, metric)?;
    Ok(push_forward(source, kb.len(), &nearest))
}

/// `-log2 p(k)`.
pub fn knowledge_self_information(dist: &KnowledgeDistribution, index: usize) -> Result<f64, InfoError> {
    let p = *dist.0.get(index).ok_or(InfoError::IndexOutOfRange(index))?;
    if p <= 0.0 {
        return Err(InfoError::ZeroMass(index));
    }
    Ok(-p.log2())
}

/// Shannon entropy in bits; zero-mass entries contribute nothing.
pub fn kb_entropy(dist: &KnowledgeDistribution) -> f64 {
    dist.0.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `I(k*) - lambda * log2(1 - D(s, k*))`.
pub fn semantic_self_information(
    s: &Sentence,
    kb: &KnowledgeBase,
    dist: &KnowledgeDistribution,
    cfg: &SemanticInfoConfig,
) -> Result<f64, InfoError> {
    cfg.validate()?;
    if kb.is_empty() {
        return Err(InfoError::EmptyKnowledgeBase);
    }
    let nearest = kb.find_nearest_with(s, &cfg.metric)?;
    Ok(knowledge_self_information(dist, nearest.index)? + cfg.distance_penalty(nearest.distance))
}

pub fn source_semantic_entropy(source: &SourceModel, kb: &KnowledgeBase, cfg: &SemanticInfoConfig) -> Result<f64, InfoError> {
    Ok(analyze(source, kb, cfg)?.source_entropy)
}

/// Per-sentence terms of the semantic entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceTerm {
    pub sentence_index: usize,
    pub nearest_index: usize,
    pub distance: f64,
    pub self_information: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub terms: Vec<SentenceTerm>,
    pub distribution: KnowledgeDistribution,
    /// `H(K)`.
    pub kb_entropy: f64,
    /// `H_s(S)`.
    pub source_entropy: f64,
    /// `sum p(s) * -lambda * log2(1 - D(s, k*))`.
    pub residual: f64,
    /// `|H_s(S) - H(K) - residual|`.
    pub defect: f64,
}

impl EntropyReport {
    /// CSV body plus four footer rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sentence_index,nearest_knowledge_index,distance,self_information_bits\n");
        for t in &self.terms {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                t.sentence_index, t.nearest_index, t.distance, t.self_information
            );
        }
        let _ = writeln!(out, "H_K_bits,,,{}", self.kb_entropy);
        let _ = writeln!(out, "H_s_S_bits,,,{}", self.source_entropy);
        let _ = writeln!(out, "residual_bits,,,{}", self.residual);
        let _ = writeln!(out, "defect,,,{}", self.defect);
        out
    }
}

/// Computes every quantity of the decomposition in one pass.
pub fn analyze(source: &SourceModel, kb: &KnowledgeBase, cfg: &SemanticInfoConfig) -> Result<EntropyReport, InfoError> {
    cfg.validate()?;
    let nearest = nearest_all(source, kb, &cfg.metric)?;
    let distribution = push_forward(source, kb.len(), &nearest);
    let mut terms = Vec::with_capacity(nearest.len());
    let mut source_entropy = 0.0;
    let mut residual = 0.0;
    for (i, (n, &p)) in nearest.iter().zip(source.probabilities()).enumerate() {
        let penalty = cfg.distance_penalty(n.distance);
        let info = knowledge_self_information(&distribution, n.index)? + penalty;
        source_entropy += p * info;
        residual += p * penalty;
        terms.push(SentenceTerm {
            sentence_index: i,
            nearest_index: n.index,
            distance: n.distance,
            self_information: info,
        });
    }
    let kb_entropy = kb_entropy(&distribution);
    Ok(EntropyReport {
        terms,
        distribution,
        kb_entropy,
        source_entropy,
        residual,
        defect: (source_entropy - kb_entropy - residual).abs(),
    })
}

/// Returns `(H_s(S), H(K), residual, defect)`.
pub fn verify_decomposition(
    source: &SourceModel,
    kb: &KnowledgeBase,
    cfg: &SemanticInfoConfig,
) -> Result<(f64, f64, f64, f64), InfoError> {
    let r = analyze(source, kb, cfg)?;
    Ok((r.source_entropy, r.kb_entropy, r.residual, r.defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Embedder;
    use std::collections::HashMap;

    fn s(t: &str) -> Sentence {
        Sentence::parse(t)
    }

    fn four() -> Vec<Sentence> {
        vec![
            s("the commission adopted the proposal"),
            s("fishermen in the north sea need support"),
            s("we must vote on the budget tomorrow"),
            s("my group supports human rights everywhere"),
        ]
    }

    /// Table embedder with unit vectors at controlled angles.
    fn table_embedder() -> (Embedder, Vec<Sentence>) {
        let mut t = HashMap::new();
        t.insert("k zero".to_owned(), vec![1.0, 0.0, 0.0]);
        t.insert("k one".to_owned(), vec![0.0, 1.0, 0.0]);
        t.insert("k two".to_owned(), vec![0.0, 0.0, 1.0]);
        t.insert("k three".to_owned(), vec![-1.0, 0.0, 0.0]);
        // cosine 0.5 with "k zero", 0 with the others
        t.insert("half zero".to_owned(), vec![0.5, 0.0, -(0.75f64.sqrt())]);
        let e = Embedder::external(t).unwrap();
        let kb_sents = vec![s("k zero"), s("k one"), s("k two"), s("k three")];
        (e, kb_sents)
    }

    #[test]
    fn induced_distribution_examples() {
        let e = Embedder::default();
        let c = four();
        let kb = KnowledgeBase::build(&c, 1.0, None, &e).unwrap();
        let d = induced_distribution(&SourceModel::empirical(&c).unwrap(), &kb).unwrap();
        assert_eq!(d.probabilities(), &[0.25; 4]);

        let single = KnowledgeBase::build(&c[..1], 0.3, None, &e).unwrap();
        let d = induced_distribution(&SourceModel::empirical(&c).unwrap(), &single).unwrap();
        assert_eq!(d.probabilities(), &[1.0]);

        let two = KnowledgeBase::build(&[c[0].clone(), c[1].clone()], 1.0, None, &e).unwrap();
        let d = induced_distribution(&SourceModel::empirical(&[c[0].clone()]).unwrap(), &two).unwrap();
        assert_eq!(d.probabilities(), &[1.0, 0.0]);
        let empty = KnowledgeBase::empty(0.3, None, e).unwrap();
        assert!(matches!(
            induced_distribution(&SourceModel::empirical(&c).unwrap(), &empty),
            Err(InfoError::EmptyKnowledgeBase)
        ));
    }

    #[test]
    fn self_information_examples() {
        let d = KnowledgeDistribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(knowledge_self_information(&d, 0).unwrap(), 0.0);
        assert!(matches!(knowledge_self_information(&d, 1), Err(InfoError::ZeroMass(1))));
        let d = KnowledgeDistribution::new(vec![0.125; 8]).unwrap();
        assert_eq!(knowledge_self_information(&d, 3).unwrap(), 3.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(kb_entropy(&KnowledgeDistribution::new(vec![0.125; 8]).unwrap()), 3.0);
        assert_eq!(kb_entropy(&KnowledgeDistribution::new(vec![0.0, 1.0, 0.0]).unwrap()), 0.0);
        assert_eq!(kb_entropy(&KnowledgeDistribution::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap()), 1.0);
        assert!(KnowledgeDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(KnowledgeDistribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn semantic_self_information_examples() {
        let (e, kb_sents) = table_embedder();
        let kb = KnowledgeBase::build(&kb_sents, 1.0, None, &e).unwrap();
        assert_eq!(kb.len(), 4);
        let d = KnowledgeDistribution::new(vec![0.25; 4]).unwrap();
        let cfg = SemanticInfoConfig::default();
        assert!((semantic_self_information(&kb_sents[2], &kb, &d, &cfg).unwrap() - 2.0).abs() < 1e-12);
        // D = 0.5 to "k zero"
        let v = semantic_self_information(&s("half zero"), &kb, &d, &cfg).unwrap();
        assert!((v - 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn distance_clamp_keeps_result_finite() {
        let cfg = SemanticInfoConfig::default();
        let p = cfg.distance_penalty(1.0);
        assert!(p.is_finite());
        assert!((p - 1e-9f64.log2().abs()).abs() < 1e-5);
        assert_eq!(cfg.distance_penalty(0.0), 0.0);
    }

    #[test]
    fn config_validation() {
        let (e, kb_sents) = table_embedder();
        let kb = KnowledgeBase::build(&kb_sents, 1.0, None, &e).unwrap();
        let src = SourceModel::empirical(&kb_sents).unwrap();
        assert!(analyze(&src, &kb, &SemanticInfoConfig::with_lambda(0.0)).is_err());
        let bad = SemanticInfoConfig {
            d_max: 1.0,
            ..Default::default()
        };
        assert!(analyze(&src, &kb, &bad).is_err());
    }

    #[test]
    fn source_entropy_examples() {
        let e = Embedder::default();
        let c = four();
        let kb = KnowledgeBase::build(&c, 1.0, None, &e).unwrap();
        let cfg = SemanticInfoConfig::default();
        let h = source_semantic_entropy(&SourceModel::empirical(&c).unwrap(), &kb, &cfg).unwrap();
        assert!((h - 2.0).abs() < 1e-9);

        let one = KnowledgeBase::build(&c[..1], 1.0, None, &e).unwrap();
        let h = source_semantic_entropy(&SourceModel::empirical(&c[..1]).unwrap(), &one, &cfg).unwrap();
        assert!(h.abs() < 1e-9);
    }

    #[test]
    fn source_model_validation() {
        assert!(SourceModel::new(vec![], vec![]).is_err());
        assert!(SourceModel::new(four(), vec![0.5, 0.5, 0.0, 0.0]).is_err());
        assert!(SourceModel::new(four(), vec![0.3; 4]).is_err());
        assert!(SourceModel::new(four(), vec![0.1, 0.2, 0.3, 0.4]).is_ok());
    }

    #[test]
    fn corpus_inside_kb_has_no_residual() {
        let e = Embedder::default();
        let c = four();
        let kb = KnowledgeBase::build(&c, 1.0, None, &e).unwrap();
        let (hs, hk, res, defect) =
            verify_decomposition(&SourceModel::empirical(&c).unwrap(), &kb, &SemanticInfoConfig::default()).unwrap();
        assert!(res.abs() < 1e-9);
        assert!((hs - hk).abs() < 1e-9);
        assert!(defect <= 1e-9);
    }

    #[test]
    fn csv_layout() {
        let e = Embedder::default();
        let c = four();
        let kb = KnowledgeBase::build(&c[..2], 0.9, None, &e).unwrap();
        let r = analyze(&SourceModel::empirical(&c).unwrap(), &kb, &SemanticInfoConfig::default()).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + c.len() + 4);
        assert_eq!(lines[0], "sentence_index,nearest_knowledge_index,distance,self_information_bits");
        assert!(lines.last().unwrap().starts_with("defect,,,"));
    }
}
