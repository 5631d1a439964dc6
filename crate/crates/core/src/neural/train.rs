//! Training (per-batch random SNR, cross-entropy, cosine-annealed
//! optimizer) and end-to-end transmission of sentences.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::Graph;
use super::model::{forward, null_knowledge, Architecture, ModelConfig, Profile, TransceiverParams};
use super::optim::{CosineSchedule, Optimizer, OptimizerKind};
use super::params::Gradients;
use super::scalar::Scalar;
use super::NeuralError;
use crate::channel::{ChannelConfig, ChannelKind};
use crate::corpus::{Sentence, TokenSequence, Vocabulary};
use crate::knowledge_base::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Per-batch SNR is drawn uniformly from this range.
    pub snr_range_db: (f64, f64),
    pub channel: ChannelKind,
    /// Trains without channel noise or fading when false.
    pub noisy: bool,
    pub val_snr_db: f64,
    pub clip_norm: Option<f64>,
    pub seed: u64,
}

impl TrainConfig {
    pub fn paper() -> Self {
        TrainConfig {
            optimizer: OptimizerKind::adadelta(),
            learning_rate: 1e-2,
            batch_size: 256,
            epochs: 100,
            snr_range_db: (0.0, 10.0),
            channel: ChannelKind::Awgn,
            noisy: true,
            val_snr_db: 3.0,
            clip_norm: None,
            seed: 0,
        }
    }

    pub fn desk() -> Self {
        TrainConfig {
            learning_rate: 1.0,
            batch_size: 32,
            epochs: 20,
            clip_norm: Some(1.0),
            ..Self::paper()
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Desk => Self::desk(),
            Profile::Paper => Self::paper(),
        }
    }

    pub fn validate(&self) -> Result<(), NeuralError> {
        let (lo, hi) = self.snr_range_db;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(NeuralError::Config(format!("SNR range [{lo}, {hi}] is empty")));
        }
        if self.batch_size == 0 {
            return Err(NeuralError::Config("batch size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(NeuralError::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Token ids of a message and of the knowledge paired with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub message: Vec<u32>,
    pub knowledge: Vec<u32>,
    pub knowledge_index: Option<usize>,
}

/// Pairs every sentence with its nearest knowledge, or with the null
/// sentence when `kb` is `None`.
pub fn prepare_examples(
    sentences: &[Sentence],
    vocab: &Vocabulary,
    kb: Option<&KnowledgeBase>,
) -> Result<Vec<Example>, NeuralError> {
    let encoded_kb: Option<Vec<Vec<u32>>> =
        kb.map(|kb| kb.entries().iter().map(|e| vocab.encode(&e.sentence).ids().to_vec()).collect());
    sentences
        .iter()
        .map(|s| {
            let message = vocab.encode(s).ids().to_vec();
            match (kb, &encoded_kb) {
                (Some(kb), Some(enc)) => {
                    let n = kb.find_nearest(s)?;
                    Ok(Example {
                        message,
                        knowledge: enc[n.index].clone(),
                        knowledge_index: Some(n.index),
                    })
                }
                _ => Ok(Example {
                    message,
                    knowledge: null_knowledge(),
                    knowledge_index: None,
                }),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossTrace(pub Vec<EpochStats>);

impl LossTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for e in &self.0 {
            let _ = writeln!(out, "{},{},{}", e.epoch, e.train_loss, e.val_loss);
        }
        out
    }

    pub fn train_losses(&self) -> Vec<f64> {
        self.0.iter().map(|e| e.train_loss).collect()
    }
}

fn targets(ids: &[u32]) -> Vec<Option<usize>> {
    ids.iter().map(|&i| Some(i as usize)).collect()
}

/// Loss and gradient of one example, added into `grads`.
fn example_step<F: Scalar, R: Rng + ?Sized>(
    params: &TransceiverParams<F>,
    arch: &Architecture,
    ex: &Example,
    channel: Option<&ChannelConfig>,
    grads: &mut Gradients<F>,
    rng: &mut R,
) -> Result<f64, NeuralError> {
    let mut g = Graph::new(&params.store);
    let f = forward(&mut g, arch, &ex.message, &ex.knowledge, channel, rng)?;
    let loss = g.cross_entropy(f.logits, &targets(&ex.message));
    g.backward(loss, grads);
    Ok(g.value(loss).data()[0].f64())
}

/// Mean cross-entropy over `examples` at a fixed channel, without updates.
pub fn evaluate_loss<F: Scalar>(
    params: &TransceiverParams<F>,
    examples: &[Example],
    channel: Option<&ChannelConfig>,
    seed: u64,
) -> Result<f64, NeuralError> {
    if examples.is_empty() {
        return Ok(f64::NAN);
    }
    let arch = params.arch();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for ex in examples {
        let mut g = Graph::new(&params.store);
        let f = forward(&mut g, &arch, &ex.message, &ex.knowledge, channel, &mut rng)?;
        let loss = g.cross_entropy(f.logits, &targets(&ex.message));
        total += g.value(loss).data()[0].f64();
    }
    Ok(total / examples.len() as f64)
}

fn divergence<F: Scalar>(params: &TransceiverParams<F>, grads: &Gradients<F>, epoch: usize, step: u64, loss: f64) -> NeuralError {
    let mut worst = String::new();
    for (name, t) in params.store.names().iter().zip(params.store.values()) {
        if !t.is_finite() {
            worst = format!(", first non-finite parameter {name}");
            break;
        }
    }
    NeuralError::Diverged(format!(
        "loss {loss} at epoch {epoch}, step {step}; gradient norm {:.3e}{worst}",
        grads.norm()
    ))
}

/// Runs `steps` optimizer updates on `examples` (cycling through shuffled
/// batches); returns the loss of each update. Used for short fits.
pub fn fit_steps<F: Scalar>(
    params: &mut TransceiverParams<F>,
    examples: &[Example],
    config: &TrainConfig,
    steps: u64,
) -> Result<Vec<f64>, NeuralError> {
    config.validate()?;
    if examples.is_empty() {
        return Err(NeuralError::Config("no training examples".into()));
    }
    let arch = params.arch();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut opt = Optimizer::new(config.optimizer, &params.store);
    let schedule = CosineSchedule::new(config.learning_rate, steps);
    let mut grads = Gradients::zeros_like(&params.store);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut at = order.len();
    let mut losses = Vec::with_capacity(steps as usize);
    for step in 0..steps {
        grads.zero();
        let channel = draw_channel(config, &mut rng);
        let mut total = 0.0;
        for _ in 0..config.batch_size.min(examples.len()) {
            if at == order.len() {
                order.shuffle(&mut rng);
                at = 0;
            }
            total += example_step(params, &arch, &examples[order[at]], channel.as_ref(), &mut grads, &mut rng)?;
            at += 1;
        }
        let n = config.batch_size.min(examples.len());
        let loss = total / n as f64;
        apply_update(params, &mut opt, &mut grads, n, config, schedule.rate(step), 0, step, loss)?;
        losses.push(loss);
    }
    Ok(losses)
}

fn draw_channel<R: Rng + ?Sized>(config: &TrainConfig, rng: &mut R) -> Option<ChannelConfig> {
    config.noisy.then(|| {
        let (lo, hi) = config.snr_range_db;
        let snr = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        ChannelConfig::new(config.channel, snr)
    })
}

/// One channel per batch with stratified SNRs: batch `i` of a shuffled
/// order draws from the `i`-th of `batches` equal slices of the range.
fn epoch_channels<R: Rng + ?Sized>(config: &TrainConfig, batches: usize, rng: &mut R) -> Vec<Option<ChannelConfig>> {
    if !config.noisy {
        return vec![None; batches];
    }
    let (lo, hi) = config.snr_range_db;
    let width = (hi - lo) / batches as f64;
    let mut out: Vec<_> = (0..batches)
        .map(|i| {
            let snr = lo + width * (i as f64 + rng.random::<f64>());
            Some(ChannelConfig::new(config.channel, snr))
        })
        .collect();
    out.shuffle(rng);
    out
}

#[allow(clippy::too_many_arguments)]
fn apply_update<F: Scalar>(
    params: &mut TransceiverParams<F>,
    opt: &mut Optimizer,
    grads: &mut Gradients<F>,
    batch: usize,
    config: &TrainConfig,
    lr: f64,
    epoch: usize,
    step: u64,
    loss: f64,
) -> Result<(), NeuralError> {
    grads.scale(F::of(1.0 / batch as f64));
    if !loss.is_finite() || !grads.is_finite() {
        return Err(divergence(params, grads, epoch, step, loss));
    }
    if let Some(max) = config.clip_norm {
        let norm = grads.norm();
        if norm > max {
            grads.scale(F::of(max / norm));
        }
    }
    opt.step(&mut params.store, grads, lr);
    Ok(())
}

/// Full training run. `on_epoch` sees each epoch's statistics as they are
/// produced. Validation uses the training channel kind at `val_snr_db`.
pub fn train<F: Scalar>(
    params: &mut TransceiverParams<F>,
    train_set: &[Example],
    val_set: &[Example],
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<LossTrace, NeuralError> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(NeuralError::Config("no training examples".into()));
    }
    let arch = params.arch();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut opt = Optimizer::new(config.optimizer, &params.store);
    let batches = train_set.len().div_ceil(config.batch_size);
    let schedule = CosineSchedule::new(config.learning_rate, (batches * config.epochs) as u64);
    let mut grads = Gradients::zeros_like(&params.store);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut trace = LossTrace::default();
    let mut step = 0u64;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let channels = epoch_channels(config, batches, &mut rng);
        let mut epoch_total = 0.0;
        for (batch, channel) in order.chunks(config.batch_size).zip(channels) {
            grads.zero();
            let mut total = 0.0;
            for &i in batch {
                total += example_step(params, &arch, &train_set[i], channel.as_ref(), &mut grads, &mut rng)?;
            }
            let loss = total / batch.len() as f64;
            apply_update(params, &mut opt, &mut grads, batch.len(), config, schedule.rate(step), epoch, step, loss)?;
            epoch_total += total;
            step += 1;
        }
        let val_channel = config.noisy.then(|| ChannelConfig::new(config.channel, config.val_snr_db));
        let val_loss = evaluate_loss(params, val_set, val_channel.as_ref(), config.seed ^ epoch as u64)?;
        let stats = EpochStats {
            epoch,
            train_loss: epoch_total / train_set.len() as f64,
            val_loss,
        };
        log::info!("epoch {epoch}: train {:.4}, val {:.4}", stats.train_loss, stats.val_loss);
        on_epoch(&stats);
        trace.0.push(stats);
    }
    Ok(trace)
}

/// Result of sending one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub decoded: Sentence,
    pub tokens: TokenSequence,
    pub symbol_count: usize,
    /// Knowledge used, sent error-free on the side; `None` without a KB.
    pub knowledge_index: Option<usize>,
}

/// Selects the nearest knowledge, runs the transceiver over `channel` and
/// decodes each position greedily. Without a KB the null sentence is used.
pub fn end_to_end_transmit<F: Scalar, R: Rng + ?Sized>(
    params: &TransceiverParams<F>,
    vocab: &Vocabulary,
    kb: Option<&KnowledgeBase>,
    sentence: &Sentence,
    channel: &ChannelConfig,
    rng: &mut R,
) -> Result<Transmission, NeuralError> {
    if vocab.len() != params.config.vocab_size {
        return Err(NeuralError::Config(format!(
            "vocabulary has {} entries but the model expects {}",
            vocab.len(),
            params.config.vocab_size
        )));
    }
    let message = vocab.encode(sentence).ids().to_vec();
    let (knowledge, knowledge_index) = match kb {
        Some(kb) => {
            let n = kb.find_nearest(sentence)?;
            let entry = &kb.entries()[n.index];
            (vocab.encode(&entry.sentence).ids().to_vec(), Some(n.index))
        }
        None => (null_knowledge(), None),
    };
    let arch = params.arch();
    let mut g = Graph::new(&params.store);
    let f = forward(&mut g, &arch, &message, &knowledge, Some(channel), rng)?;
    let logits = g.value(f.logits);
    let ids: Vec<u32> = (0..logits.rows()).map(|i| logits.argmax_row(i) as u32).collect();
    let tokens = TokenSequence::new(ids);
    Ok(Transmission {
        decoded: vocab.decode(&tokens)?,
        tokens,
        symbol_count: arch.symbol_count(message.len()),
        knowledge_index,
    })
}

/// Model sized for `vocab` under `profile`.
pub fn model_for<F: Scalar>(profile: Profile, vocab: &Vocabulary, seed: u64) -> Result<TransceiverParams<F>, NeuralError> {
    TransceiverParams::new(ModelConfig::for_profile(profile, vocab.len()), seed)
}
