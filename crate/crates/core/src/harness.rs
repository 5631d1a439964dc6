//! Experiment driver: configuration, data preparation, training, SNR
//! sweeps for the neural and classical systems, entropy reports and
//! threshold sweeps. Every output is CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelConfig, ChannelKind, Fading};
use crate::classical::{ChannelCode, ClassicalPipeline, CodecError, LdpcCode, ParityCheck, SourceCode};
use crate::corpus::{self, build_vocabulary, CorpusError, CorpusSplit, Sentence, Vocabulary};
use crate::hash::Fnv1a;
use crate::knowledge_base::{DistanceMetric, KbError, KnowledgeBase};
use crate::metrics::{bleu, BleuWeights, Embedder, MetricsError};
use crate::neural::model::{ModelConfig, Profile, TransceiverParams};
use crate::neural::train::{self, end_to_end_transmit, prepare_examples, LossTrace, TrainConfig};
use crate::neural::NeuralError;
use crate::semantic_info::{analyze, EntropyReport, InfoError, SemanticInfoConfig, SourceModel};

pub const PAPER_VOCAB: usize = 30527;
pub const DESK_VOCAB: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("knowledge base: {0}")]
    Kb(#[from] KbError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("semantic info: {0}")]
    Info(#[from] InfoError),
    #[error("neural: {0}")]
    Neural(#[from] NeuralError),
    #[error("codec: {0}")]
    Codec(#[from] CodecError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Missing(_) => "missing",
            HarnessError::Corpus(_) => "corpus",
            HarnessError::Kb(_) => "knowledge_base",
            HarnessError::Metrics(_) => "metrics",
            HarnessError::Info(_) => "semantic_info",
            HarnessError::Neural(_) => "neural",
            HarnessError::Codec(_) => "codec",
            HarnessError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HuffmanSource {
    /// Character frequencies of the training split.
    Train,
    /// Character frequencies of the whole filtered corpus.
    Corpus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub model: Option<PathBuf>,
    /// Model trained with the null knowledge sentence, evaluated as `no-kb`.
    pub ablation_model: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub ldpc: Option<PathBuf>,
    pub channel: ChannelKind,
    pub rician_k_db: f64,
    pub fading: Fading,
    pub snr_grid: Vec<f64>,
    pub theta: f64,
    pub theta_list: Vec<f64>,
    pub metric: DistanceMetric,
    pub lambda: f64,
    pub seeds: Vec<u64>,
    pub split_seed: u64,
    pub profile: Profile,
    pub out: Option<PathBuf>,
    pub include_index_cost: bool,
    pub no_kb: bool,
    pub epochs: Option<usize>,
    pub embedding_dim: usize,
    pub vocab_size: Option<usize>,
    pub max_sentences: Option<usize>,
    pub sweep_snr_db: f64,
    pub huffman_source: HuffmanSource,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus: None,
            kb: None,
            model: None,
            ablation_model: None,
            embeddings: None,
            ldpc: None,
            channel: ChannelKind::Awgn,
            rician_k_db: 10.0,
            fading: Fading::Block,
            snr_grid: vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0],
            theta: 0.3,
            theta_list: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            metric: DistanceMetric::Embedding,
            lambda: 1.0,
            seeds: vec![1],
            split_seed: 2023,
            profile: Profile::Desk,
            out: None,
            include_index_cost: false,
            no_kb: false,
            epochs: None,
            embedding_dim: 256,
            vocab_size: None,
            max_sentences: None,
            sweep_snr_db: 6.0,
            huffman_source: HuffmanSource::Train,
        }
    }
}

fn parse_list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>, HarnessError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| HarnessError::Config(format!("bad entry {s:?} in {key}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(value: &str, key: &str) -> Result<T, HarnessError> {
    value
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad value {value:?} for {key}")))
}

fn parse_bool(value: &str, key: &str) -> Result<bool, HarnessError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(HarnessError::Config(format!("bad boolean {value:?} for {key}"))),
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "corpus" => self.corpus = Some(v.into()),
            "kb" => self.kb = Some(v.into()),
            "model" => self.model = Some(v.into()),
            "ablation_model" => self.ablation_model = Some(v.into()),
            "embeddings" => self.embeddings = Some(v.into()),
            "ldpc" => self.ldpc = Some(v.into()),
            "out" => self.out = Some(v.into()),
            "channel" => {
                self.channel = v
                    .parse()
                    .map_err(|e: crate::channel::ChannelError| HarnessError::Config(e.to_string()))?
            }
            "rician_k_db" => self.rician_k_db = parse_one(v, &key)?,
            "fading" => {
                self.fading = match v.to_ascii_lowercase().as_str() {
                    "block" => Fading::Block,
                    "per_symbol" | "per-symbol" => Fading::PerSymbol,
                    _ => return Err(HarnessError::Config(format!("unknown fading {v:?}"))),
                }
            }
            "snr_grid" => self.snr_grid = parse_list(v, &key)?,
            "theta" => self.theta = parse_one(v, &key)?,
            "theta_list" => self.theta_list = parse_list(v, &key)?,
            "metric" => {
                self.metric = match v.to_ascii_lowercase().as_str() {
                    "embedding" | "similarity" => DistanceMetric::Embedding,
                    "bleu" => DistanceMetric::Bleu(BleuWeights::uniform(4)),
                    _ => return Err(HarnessError::Config(format!("unknown metric {v:?}"))),
                }
            }
            "lambda" => self.lambda = parse_one(v, &key)?,
            "seed" | "seeds" => self.seeds = parse_list(v, &key)?,
            "split_seed" => self.split_seed = parse_one(v, &key)?,
            "profile" => self.profile = v.parse().map_err(|e: NeuralError| HarnessError::Config(e.to_string()))?,
            "include_index_cost" => self.include_index_cost = parse_bool(v, &key)?,
            "no_kb" => self.no_kb = parse_bool(v, &key)?,
            "epochs" => self.epochs = Some(parse_one(v, &key)?),
            "embedding_dim" => self.embedding_dim = parse_one(v, &key)?,
            "vocab_size" => self.vocab_size = Some(parse_one(v, &key)?),
            "max_sentences" => self.max_sentences = Some(parse_one(v, &key)?),
            "sweep_snr_db" => self.sweep_snr_db = parse_one(v, &key)?,
            "huffman_source" => {
                self.huffman_source = match v.to_ascii_lowercase().as_str() {
                    "train" => HuffmanSource::Train,
                    "corpus" => HuffmanSource::Corpus,
                    _ => return Err(HarnessError::Config(format!("unknown huffman source {v:?}"))),
                }
            }
            _ => return Err(HarnessError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.snr_grid.is_empty() {
            return Err(HarnessError::Config("SNR grid is empty".into()));
        }
        if self.snr_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HarnessError::Config("SNR grid must be strictly increasing".into()));
        }
        for &t in std::iter::once(&self.theta).chain(&self.theta_list) {
            if !(0.0..=1.0).contains(&t) {
                return Err(HarnessError::Config(format!("theta {t} outside [0, 1]")));
            }
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("no seeds".into()));
        }
        Ok(())
    }

    pub fn channel_config(&self, snr_db: f64) -> ChannelConfig {
        ChannelConfig {
            rician_k_db: self.rician_k_db,
            fading: self.fading,
            ..ChannelConfig::new(self.channel, snr_db)
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        let base = TrainConfig::for_profile(self.profile);
        TrainConfig {
            epochs: self.epochs.unwrap_or(base.epochs),
            channel: self.channel,
            seed,
            ..base
        }
    }

    pub fn vocab_limit(&self) -> usize {
        self.vocab_size.unwrap_or(match self.profile {
            Profile::Desk => DESK_VOCAB,
            Profile::Paper => PAPER_VOCAB,
        })
    }

    pub fn embedder(&self) -> Result<Embedder, HarnessError> {
        Ok(match &self.embeddings {
            Some(p) => Embedder::load_external(p)?,
            None => Embedder::hashed(self.embedding_dim)?,
        })
    }
}

/// Filtered corpus, its split and the training vocabulary.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub sentences: Vec<Sentence>,
    pub split: CorpusSplit<Sentence>,
    pub vocab: Vocabulary,
}

impl Dataset {
    pub fn from_sentences(sentences: Vec<Sentence>, split_seed: u64, vocab_limit: usize) -> Result<Self, HarnessError> {
        let split = corpus::split(&sentences, split_seed)?;
        let vocab = build_vocabulary(&split.train, vocab_limit)?;
        Ok(Dataset { sentences, split, vocab })
    }

    pub fn load(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let path = cfg.corpus.as_ref().ok_or(HarnessError::Missing("corpus path"))?;
        let sentences = corpus::load_and_filter(path, corpus::MIN_SENTENCE_WORDS, corpus::MAX_SENTENCE_WORDS)?;
        Self::from_sentences(sentences, cfg.split_seed, cfg.vocab_limit())
    }

    /// Test sentences, truncated to `max_sentences` when set.
    pub fn test_set(&self, cfg: &ExperimentConfig) -> &[Sentence] {
        let n = cfg.max_sentences.unwrap_or(usize::MAX).min(self.split.test.len());
        &self.split.test[..n]
    }
}

pub fn build_kb(cfg: &ExperimentConfig, data: &Dataset, theta: f64) -> Result<KnowledgeBase, HarnessError> {
    Ok(KnowledgeBase::build(&data.split.train, theta, None, &cfg.embedder()?)?)
}

/// Loads the configured KB if the file exists, otherwise builds one at `cfg.theta`.
pub fn load_or_build_kb(cfg: &ExperimentConfig, data: &Dataset) -> Result<KnowledgeBase, HarnessError> {
    match &cfg.kb {
        Some(p) if p.exists() => Ok(KnowledgeBase::load(p, &cfg.embedder()?)?),
        _ => build_kb(cfg, data, cfg.theta),
    }
}

pub fn kb_summary_csv(kb: &KnowledgeBase, data: &Dataset) -> Result<String, HarnessError> {
    Ok(format!(
        "theta,kb_size,index_bits,objective\n{},{},{},{}\n",
        kb.theta(),
        kb.len(),
        kb.index_bits(),
        kb.objective(&data.split.train)?
    ))
}

/// Trains a fresh model under `cfg.profile`; `kb = None` trains the
/// no-knowledge ablation.
pub fn train_model(
    cfg: &ExperimentConfig,
    data: &Dataset,
    kb: Option<&KnowledgeBase>,
    seed: u64,
) -> Result<(TransceiverParams<f32>, LossTrace), HarnessError> {
    let train_set = prepare_examples(&data.split.train, &data.vocab, kb)?;
    let val_set = prepare_examples(&data.split.validation, &data.vocab, kb)?;
    let mut params = TransceiverParams::new(ModelConfig::for_profile(cfg.profile, data.vocab.len()), seed)?;
    let trace = train::train(&mut params, &train_set, &val_set, &cfg.train_config(seed), |_| {})?;
    Ok((params, trace))
}

pub fn vocab_path(model: &Path) -> PathBuf {
    let mut p = model.as_os_str().to_owned();
    p.push(".vocab");
    PathBuf::from(p)
}

pub fn save_model(model: &TransceiverParams<f32>, vocab: &Vocabulary, path: &Path) -> Result<(), HarnessError> {
    model.save(path)?;
    vocab.save(&vocab_path(path))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(TransceiverParams<f32>, Vocabulary), HarnessError> {
    let model = TransceiverParams::load(path)?;
    let vocab = Vocabulary::load(&vocab_path(path))?;
    if vocab.len() != model.config.vocab_size {
        return Err(HarnessError::Config(format!(
            "vocabulary file has {} entries, model expects {}",
            vocab.len(),
            model.config.vocab_size
        )));
    }
    Ok((model, vocab))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub channel: String,
    pub snr_db: f64,
    /// Cumulative BLEU with uniform weights over orders `1..=n`.
    pub bleu: [f64; 4],
    pub similarity: f64,
    pub symbols_per_sentence: f64,
    pub index_bits_per_sentence: f64,
    pub seed: u64,
}

pub const RESULT_HEADER: &str =
    "method,channel,snr_db,bleu_1,bleu_2,bleu_3,bleu_4,similarity,symbols_per_sentence,index_bits_per_sentence,seed";

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{RESULT_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.channel,
            r.snr_db,
            r.bleu[0],
            r.bleu[1],
            r.bleu[2],
            r.bleu[3],
            r.similarity,
            r.symbols_per_sentence,
            r.index_bits_per_sentence,
            r.seed
        );
    }
    out
}

/// BLEU-1..4 and similarity of `decoded` against `reference`; an empty
/// decode scores zero everywhere.
pub fn score(reference: &Sentence, decoded: &Sentence, embedder: &Embedder) -> Result<([f64; 4], f64), HarnessError> {
    if decoded.is_empty() || reference.is_empty() {
        return Ok(([0.0; 4], 0.0));
    }
    let mut b = [0.0; 4];
    for (n, slot) in b.iter_mut().enumerate() {
        *slot = bleu(reference.words(), decoded.words(), &BleuWeights::uniform(n + 1))?;
    }
    Ok((b, embedder.similarity_score(reference, decoded)?))
}

fn cell_rng(method: &str, snr_db: f64, seed: u64) -> ChaCha8Rng {
    let mut h = Fnv1a::new();
    h.update(method.as_bytes());
    h.update(&snr_db.to_bits().to_le_bytes());
    h.update(&seed.to_le_bytes());
    ChaCha8Rng::seed_from_u64(h.finish())
}

#[derive(Default)]
struct Accumulator {
    bleu: [f64; 4],
    similarity: f64,
    symbols: f64,
    count: usize,
}

impl Accumulator {
    fn add(&mut self, bleu: [f64; 4], similarity: f64, symbols: usize) {
        for (a, b) in self.bleu.iter_mut().zip(bleu) {
            *a += b;
        }
        self.similarity += similarity;
        self.symbols += symbols as f64;
        self.count += 1;
    }

    #[allow(clippy::too_many_arguments)]
    fn row(&self, method: &str, cfg: &ExperimentConfig, snr_db: f64, index_bits: f64, seed: u64) -> ResultRow {
        let n = self.count.max(1) as f64;
        let mut symbols = self.symbols / n;
        if cfg.include_index_cost {
            symbols += index_bits / 6.0;
        }
        ResultRow {
            method: method.to_string(),
            channel: cfg.channel.name().to_string(),
            snr_db,
            bleu: self.bleu.map(|b| b / n),
            similarity: self.similarity / n,
            symbols_per_sentence: symbols,
            index_bits_per_sentence: index_bits,
            seed,
        }
    }
}

/// One row per (SNR, seed) for a trained transceiver on `sentences`.
pub fn evaluate_neural(
    cfg: &ExperimentConfig,
    method: &str,
    model: &TransceiverParams<f32>,
    vocab: &Vocabulary,
    kb: Option<&KnowledgeBase>,
    sentences: &[Sentence],
    embedder: &Embedder,
) -> Result<Vec<ResultRow>, HarnessError> {
    if let Some(kb) = kb {
        if kb.is_empty() {
            return Err(HarnessError::Kb(KbError::Empty));
        }
    }
    let index_bits = kb.map_or(0.0, |k| f64::from(k.index_bits()));
    let mut rows = Vec::new();
    for &snr in &cfg.snr_grid {
        for &seed in &cfg.seeds {
            let mut rng = cell_rng(method, snr, seed);
            let channel = cfg.channel_config(snr);
            let mut acc = Accumulator::default();
            for s in sentences {
                let t = end_to_end_transmit(model, vocab, kb, s, &channel, &mut rng)?;
                let (b, sim) = score(s, &t.decoded, embedder)?;
                acc.add(b, sim, t.symbol_count);
            }
            rows.push(acc.row(method, cfg, snr, index_bits, seed));
        }
    }
    Ok(rows)
}

pub fn ldpc_code(cfg: &ExperimentConfig) -> Result<LdpcCode, HarnessError> {
    let h = match &cfg.ldpc {
        Some(p) => ParityCheck::from_alist(&fs::read_to_string(p)?)?,
        // regular (3, 9) Gallager code, rate at least 2/3
        None => ParityCheck::gallager(108, 3, 9, 1)?,
    };
    Ok(LdpcCode::new(h)?)
}

/// Huffman+RS, fixed6+RS, Huffman+LDPC and fixed6+LDPC.
pub fn classical_pipelines(cfg: &ExperimentConfig, data: &Dataset) -> Result<Vec<ClassicalPipeline>, HarnessError> {
    let source_texts: Vec<String> = match cfg.huffman_source {
        HuffmanSource::Train => data.split.train.iter().map(Sentence::text).collect(),
        HuffmanSource::Corpus => data.sentences.iter().map(Sentence::text).collect(),
    };
    let huffman = SourceCode::huffman_from_texts(source_texts.iter().map(String::as_str))?;
    let ldpc = ldpc_code(cfg)?;
    let mut out = Vec::new();
    for cc in [ChannelCode::Rs, ChannelCode::Ldpc(ldpc)] {
        for source in [huffman.clone(), SourceCode::Fixed6] {
            out.push(ClassicalPipeline::new(source, cc.clone()));
        }
    }
    Ok(out)
}

/// One row per (pipeline, SNR, seed).
pub fn evaluate_classical(
    cfg: &ExperimentConfig,
    pipelines: &[ClassicalPipeline],
    sentences: &[Sentence],
    embedder: &Embedder,
) -> Result<Vec<ResultRow>, HarnessError> {
    let mut rows = Vec::new();
    for p in pipelines {
        let method = p.name();
        for &snr in &cfg.snr_grid {
            for &seed in &cfg.seeds {
                let mut rng = cell_rng(&method, snr, seed);
                let channel = cfg.channel_config(snr);
                let mut acc = Accumulator::default();
                for s in sentences {
                    let out = p.run(&s.text(), &channel, &mut rng)?;
                    let decoded = Sentence::parse(&out.decoded);
                    let (b, sim) = score(s, &decoded, embedder)?;
                    acc.add(b, sim, out.symbol_count);
                }
                rows.push(acc.row(&method, cfg, snr, 0.0, seed));
            }
        }
    }
    Ok(rows)
}

/// Semantic-information report of the whole filtered corpus against `kb`.
pub fn entropy_report(cfg: &ExperimentConfig, data: &Dataset, kb: &KnowledgeBase) -> Result<EntropyReport, HarnessError> {
    let source = SourceModel::empirical(&data.sentences)?;
    let info = SemanticInfoConfig {
        metric: cfg.metric.clone(),
        ..SemanticInfoConfig::with_lambda(cfg.lambda)
    };
    Ok(analyze(&source, kb, &info)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub kb_size: usize,
    /// Medians over seeds.
    pub bleu_1: f64,
    pub similarity: f64,
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("theta,kb_size,bleu_1,similarity\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.theta, r.kb_size, r.bleu_1, r.similarity);
    }
    out
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// For each theta: build the KB, train one model per seed and evaluate at
/// `cfg.sweep_snr_db`. `on_model` sees each trained model.
pub fn threshold_sweep(
    cfg: &ExperimentConfig,
    data: &Dataset,
    mut on_model: impl FnMut(f64, u64, &TransceiverParams<f32>, &LossTrace),
) -> Result<Vec<SweepRow>, HarnessError> {
    let embedder = cfg.embedder()?;
    let eval_cfg = ExperimentConfig {
        snr_grid: vec![cfg.sweep_snr_db],
        ..cfg.clone()
    };
    let mut rows = Vec::new();
    for &theta in &cfg.theta_list {
        let kb = build_kb(cfg, data, theta)?;
        let mut bleu_1 = Vec::new();
        let mut sim = Vec::new();
        for &seed in &cfg.seeds {
            let (model, trace) = train_model(cfg, data, Some(&kb), seed)?;
            on_model(theta, seed, &model, &trace);
            let seed_cfg = ExperimentConfig {
                seeds: vec![seed],
                ..eval_cfg.clone()
            };
            let r = evaluate_neural(&seed_cfg, "kb", &model, &data.vocab, Some(&kb), data.test_set(cfg), &embedder)?;
            bleu_1.push(r[0].bleu[0]);
            sim.push(r[0].similarity);
        }
        rows.push(SweepRow {
            theta,
            kb_size: kb.len(),
            bleu_1: median(&mut bleu_1),
            similarity: median(&mut sim),
        });
    }
    Ok(rows)
}

/// Writes `csv` to `path`, or to stdout when `None`.
pub fn emit(csv: &str, path: Option<&Path>) -> Result<(), HarnessError> {
    match path {
        Some(p) => fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
