//! The knowledge-assisted transceiver: shared semantic extraction,
//! transmit-side integration, channel encoder/decoder, receive-side
//! integration and semantic recovery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{Graph, Var};
use super::params::{ParamId, ParamStore};
use super::scalar::Scalar;
use super::tensor::Tensor;
use super::NeuralError;
use crate::channel::{equalize, transmit, ChannelConfig, ComplexSymbolBlock};
use crate::corpus::PAD_ID;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl std::str::FromStr for Profile {
    type Err = NeuralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            _ => Err(NeuralError::Config(format!("unknown profile {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub embed_dim: usize,
    /// Per-head attention width.
    pub attn_dim: usize,
    pub n_heads: usize,
    /// Complex channel symbols per word.
    pub symbols_per_word: usize,
    pub vocab_size: usize,
    pub max_len: usize,
    /// Adds a feed-forward sub-block after each integration block.
    pub integration_dense: bool,
}

impl ModelConfig {
    pub fn paper(vocab_size: usize) -> Self {
        ModelConfig {
            embed_dim: 128,
            attn_dim: 128,
            n_heads: 8,
            symbols_per_word: 6,
            vocab_size,
            max_len: 64,
            integration_dense: false,
        }
    }

    pub fn desk(vocab_size: usize) -> Self {
        ModelConfig {
            embed_dim: 32,
            attn_dim: 32,
            n_heads: 4,
            symbols_per_word: 4,
            vocab_size,
            max_len: 64,
            integration_dense: false,
        }
    }

    pub fn for_profile(profile: Profile, vocab_size: usize) -> Self {
        match profile {
            Profile::Desk => Self::desk(vocab_size),
            Profile::Paper => Self::paper(vocab_size),
        }
    }

    pub fn validate(&self) -> Result<(), NeuralError> {
        let fail = |m: &str| Err(NeuralError::Config(m.to_string()));
        if self.embed_dim == 0 || self.attn_dim == 0 || self.n_heads == 0 {
            return fail("embedding dimension, attention dimension and head count must be positive");
        }
        if self.symbols_per_word == 0 {
            return fail("symbols per word must be at least 1");
        }
        if self.vocab_size < 3 {
            return fail("vocabulary needs at least one word besides the markers");
        }
        if self.max_len == 0 {
            return fail("maximum length must be positive");
        }
        Ok(())
    }

    pub fn to_metadata(&self) -> Vec<(String, String)> {
        [
            ("embed_dim", self.embed_dim),
            ("attn_dim", self.attn_dim),
            ("n_heads", self.n_heads),
            ("symbols_per_word", self.symbols_per_word),
            ("vocab_size", self.vocab_size),
            ("max_len", self.max_len),
            ("integration_dense", usize::from(self.integration_dense)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
    }

    pub fn from_metadata(meta: &[(String, String)]) -> Result<Self, NeuralError> {
        let get = |key: &str| -> Result<usize, NeuralError> {
            meta.iter()
                .find(|(k, _)| k == key)
                .and_then(|(_, v)| v.parse().ok())
                .ok_or_else(|| NeuralError::Checkpoint(format!("missing or bad model field {key}")))
        };
        let config = ModelConfig {
            embed_dim: get("embed_dim")?,
            attn_dim: get("attn_dim")?,
            n_heads: get("n_heads")?,
            symbols_per_word: get("symbols_per_word")?,
            vocab_size: get("vocab_size")?,
            max_len: get("max_len")?,
            integration_dense: get("integration_dense")? != 0,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttentionParams {
    pub wq: ParamId,
    pub wk: ParamId,
    pub wv: ParamId,
    pub wo: ParamId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormParams {
    pub gain: ParamId,
    pub bias: ParamId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedForwardParams {
    pub w1: ParamId,
    pub b1: ParamId,
    pub w2: ParamId,
    pub b2: ParamId,
}

/// Self-attention, add & norm, feed-forward, add & norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderBlock {
    pub attn: AttentionParams,
    pub norm1: NormParams,
    pub ff: FeedForwardParams,
    pub norm2: NormParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegrationBlock {
    pub attn: AttentionParams,
    pub norm: NormParams,
    pub dense: Option<(FeedForwardParams, NormParams)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dense {
    pub w: ParamId,
    pub b: ParamId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub token_embed: ParamId,
    pub pos_embed: ParamId,
    /// Shared by the message and knowledge paths.
    pub extract: EncoderBlock,
    pub integrate_tx: IntegrationBlock,
    pub channel_enc: Dense,
    pub channel_dec: Dense,
    pub integrate_rx: IntegrationBlock,
    pub recover: EncoderBlock,
    pub output: Dense,
}

struct Builder<'a, F, R> {
    store: &'a mut ParamStore<F>,
    rng: &'a mut R,
    config: ModelConfig,
}

impl<F: Scalar, R: Rng> Builder<'_, F, R> {
    fn attention(&mut self, prefix: &str) -> AttentionParams {
        let (e, dh) = (self.config.embed_dim, self.config.attn_dim * self.config.n_heads);
        AttentionParams {
            wq: self.store.add_xavier(&format!("{prefix}.attn.wq"), e, dh, self.rng),
            wk: self.store.add_xavier(&format!("{prefix}.attn.wk"), e, dh, self.rng),
            wv: self.store.add_xavier(&format!("{prefix}.attn.wv"), e, dh, self.rng),
            wo: self.store.add_xavier(&format!("{prefix}.attn.wo"), dh, e, self.rng),
        }
    }

    fn norm(&mut self, name: &str) -> NormParams {
        let e = self.config.embed_dim;
        NormParams {
            gain: self.store.add_constant(&format!("{name}.gain"), 1, e, 1.0),
            bias: self.store.add_constant(&format!("{name}.bias"), 1, e, 0.0),
        }
    }

    fn dense(&mut self, name: &str, rows: usize, cols: usize) -> Dense {
        Dense {
            w: self.store.add_xavier(&format!("{name}.w"), rows, cols, self.rng),
            b: self.store.add_constant(&format!("{name}.b"), 1, cols, 0.0),
        }
    }

    fn feed_forward(&mut self, prefix: &str) -> FeedForwardParams {
        let e = self.config.embed_dim;
        let a = self.dense(&format!("{prefix}.ff1"), e, 4 * e);
        let b = self.dense(&format!("{prefix}.ff2"), 4 * e, e);
        FeedForwardParams {
            w1: a.w,
            b1: a.b,
            w2: b.w,
            b2: b.b,
        }
    }

    fn encoder(&mut self, prefix: &str) -> EncoderBlock {
        EncoderBlock {
            attn: self.attention(prefix),
            norm1: self.norm(&format!("{prefix}.norm1")),
            ff: self.feed_forward(prefix),
            norm2: self.norm(&format!("{prefix}.norm2")),
        }
    }

    fn integration(&mut self, prefix: &str) -> IntegrationBlock {
        let attn = self.attention(prefix);
        let norm = self.norm(&format!("{prefix}.norm"));
        let dense = self
            .config
            .integration_dense
            .then(|| (self.feed_forward(prefix), self.norm(&format!("{prefix}.norm2"))));
        IntegrationBlock { attn, norm, dense }
    }
}

fn build_layout<F: Scalar, R: Rng>(config: ModelConfig, store: &mut ParamStore<F>, rng: &mut R) -> Layout {
    let mut b = Builder { store, rng, config };
    let e = config.embed_dim;
    let std = 1.0 / (e as f64).sqrt();
    let token_embed = b.store.add_normal("embed.token", config.vocab_size, e, std, b.rng);
    let pos_embed = b.store.add_normal("embed.position", config.max_len, e, std, b.rng);
    let extract = b.encoder("extract");
    let integrate_tx = b.integration("integrate_tx");
    let channel_enc = b.dense("channel_enc", e, 2 * config.symbols_per_word);
    let channel_dec = b.dense("channel_dec", 2 * config.symbols_per_word, e);
    let integrate_rx = b.integration("integrate_rx");
    let recover = b.encoder("recover");
    let output = b.dense("output", e, config.vocab_size);
    Layout {
        token_embed,
        pos_embed,
        extract,
        integrate_tx,
        channel_enc,
        channel_dec,
        integrate_rx,
        recover,
        output,
    }
}

/// Model configuration, parameter layout and parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct TransceiverParams<F> {
    pub config: ModelConfig,
    pub layout: Layout,
    pub store: ParamStore<F>,
}

impl<F: Scalar> TransceiverParams<F> {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, NeuralError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = ParamStore::new();
        let layout = build_layout(config, &mut store, &mut rng);
        Ok(TransceiverParams { config, layout, store })
    }

    /// Rebuilds a model from stored values, checking names and shapes.
    pub fn from_store(config: ModelConfig, store: ParamStore<F>) -> Result<Self, NeuralError> {
        let mut fresh = Self::new(config, 0)?;
        fresh.store.check_layout(&store)?;
        fresh.store = store;
        Ok(fresh)
    }

    pub fn cast<G: Scalar>(&self) -> TransceiverParams<G> {
        TransceiverParams {
            config: self.config,
            layout: self.layout,
            store: self.store.cast(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.store.to_bytes(&self.config.to_metadata())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NeuralError> {
        let (store, meta) = ParamStore::from_bytes(bytes)?;
        Self::from_store(ModelConfig::from_metadata(&meta)?, store)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), NeuralError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, NeuralError> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn arch(&self) -> Architecture {
        Architecture {
            config: self.config,
            layout: self.layout,
        }
    }
}

/// Configuration and parameter layout; everything a graph needs besides
/// the values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Architecture {
    pub config: ModelConfig,
    pub layout: Layout,
}

impl Architecture {
    /// Checks that a token sequence can be fed to the model.
    pub fn check_ids(&self, ids: &[u32]) -> Result<(), NeuralError> {
        if ids.is_empty() {
            return Err(NeuralError::EmptySequence);
        }
        if ids.len() > self.config.max_len {
            return Err(NeuralError::TooLong {
                len: ids.len(),
                max: self.config.max_len,
            });
        }
        if let Some(&id) = ids.iter().find(|&&id| id as usize >= self.config.vocab_size) {
            return Err(NeuralError::TokenOutOfRange {
                id,
                vocab: self.config.vocab_size,
            });
        }
        Ok(())
    }

    pub fn symbol_count(&self, len: usize) -> usize {
        len * self.config.symbols_per_word
    }
}

/// The knowledge input used when no knowledge base is available.
pub fn null_knowledge() -> Vec<u32> {
    vec![PAD_ID]
}

fn dense<F: Scalar>(g: &mut Graph<F>, d: Dense, x: Var) -> Var {
    let w = g.param(d.w);
    let b = g.param(d.b);
    let y = g.matmul(x, w);
    g.add_row(y, b)
}

fn norm<F: Scalar>(g: &mut Graph<F>, n: NormParams, x: Var) -> Var {
    let y = g.layer_norm(x);
    let gain = g.param(n.gain);
    let bias = g.param(n.bias);
    let y = g.mul_row(y, gain);
    g.add_row(y, bias)
}

fn feed_forward<F: Scalar>(g: &mut Graph<F>, p: FeedForwardParams, x: Var) -> Var {
    let h = dense(g, Dense { w: p.w1, b: p.b1 }, x);
    let h = g.gelu(h);
    dense(g, Dense { w: p.w2, b: p.b2 }, h)
}

/// Projected queries, keys and values split into heads, plus the scaled
/// score matrix of each head (`L_q x L_k`).
struct Heads {
    scores: Vec<Var>,
    values: Vec<Var>,
}

fn attention_heads<F: Scalar>(
    g: &mut Graph<F>,
    p: AttentionParams,
    config: &ModelConfig,
    q_in: Var,
    k_in: Var,
    v_in: Var,
) -> Heads {
    let (wq, wk, wv) = (g.param(p.wq), g.param(p.wk), g.param(p.wv));
    let q = g.matmul(q_in, wq);
    let k = g.matmul(k_in, wk);
    let v = g.matmul(v_in, wv);
    let d = config.attn_dim;
    let inv = F::of(1.0 / (d as f64).sqrt());
    let mut scores = Vec::with_capacity(config.n_heads);
    let mut values = Vec::with_capacity(config.n_heads);
    for h in 0..config.n_heads {
        let qh = g.col_slice(q, h * d, d);
        let kh = g.col_slice(k, h * d, d);
        let s = g.matmul_bt(qh, kh);
        scores.push(g.scale(s, inv));
        values.push(g.col_slice(v, h * d, d));
    }
    Heads { scores, values }
}

fn combine_heads<F: Scalar>(g: &mut Graph<F>, p: AttentionParams, heads: &Heads, key_mask: Option<&[bool]>) -> Var {
    let mut z = Vec::with_capacity(heads.scores.len());
    for (&s, &v) in heads.scores.iter().zip(&heads.values) {
        let a = match key_mask {
            Some(m) => g.softmax_masked(s, m),
            None => g.softmax(s),
        };
        z.push(g.matmul(a, v));
    }
    let cat = g.concat_cols(&z);
    let wo = g.param(p.wo);
    g.matmul(cat, wo)
}

/// `Concat(head_1..head_h) W_o` with `head_i = softmax(Q W_Q (K W_K)^T / sqrt(d)) V W_V`.
/// `key_mask` marks the key rows that may be attended to.
pub fn multi_head_attention<F: Scalar>(
    g: &mut Graph<F>,
    p: AttentionParams,
    config: &ModelConfig,
    q_in: Var,
    k_in: Var,
    v_in: Var,
    key_mask: Option<&[bool]>,
) -> Result<Var, NeuralError> {
    let e = config.embed_dim;
    let (lk, ek) = g.shape(k_in);
    if g.shape(q_in).1 != e || ek != e || g.shape(v_in) != (lk, e) {
        return Err(NeuralError::Shape(format!(
            "attention inputs {:?}, {:?}, {:?} with embedding {e}",
            g.shape(q_in),
            g.shape(k_in),
            g.shape(v_in)
        )));
    }
    if key_mask.is_some_and(|m| m.len() != lk || !m.iter().any(|&k| k)) {
        return Err(NeuralError::Shape("key mask must cover every key and keep at least one".into()));
    }
    let heads = attention_heads(g, p, config, q_in, k_in, v_in);
    Ok(combine_heads(g, p, &heads, key_mask))
}

fn encoder_block<F: Scalar>(g: &mut Graph<F>, b: &EncoderBlock, config: &ModelConfig, x: Var) -> Result<Var, NeuralError> {
    let a = multi_head_attention(g, b.attn, config, x, x, x, None)?;
    let h = g.add(x, a);
    let h = norm(g, b.norm1, h);
    let f = feed_forward(g, b.ff, h);
    let o = g.add(h, f);
    Ok(norm(g, b.norm2, o))
}

/// Token and position embeddings through the shared extraction block.
pub fn semantic_extract<F: Scalar>(g: &mut Graph<F>, arch: &Architecture, ids: &[u32]) -> Result<Var, NeuralError> {
    arch.check_ids(ids)?;
    let l = &arch.layout;
    let tok: Vec<usize> = ids.iter().map(|&i| i as usize).collect();
    let pos: Vec<usize> = (0..ids.len()).collect();
    let t = g.gather(l.token_embed, &tok);
    let p = g.gather(l.pos_embed, &pos);
    let x = g.add(t, p);
    encoder_block(g, &l.extract, &arch.config, x)
}

/// Knowledge `k` (`L_k x E`) queries the message `s` (`L_s x E`):
/// `Z = MultiHead(k, s, s)` is `L_k x E`. Each message row gathers
/// knowledge rows with the transposed attention `B` (`L_s x L_k`, averaged
/// over heads), giving `LN(s + B (k + Z))` with `L_s` rows.
fn integrate<F: Scalar>(
    g: &mut Graph<F>,
    b: &IntegrationBlock,
    config: &ModelConfig,
    k: Var,
    s: Var,
) -> Result<Var, NeuralError> {
    let e = config.embed_dim;
    if g.shape(k).1 != e || g.shape(s).1 != e {
        return Err(NeuralError::Shape(format!(
            "integration inputs {:?} and {:?} with embedding {e}",
            g.shape(k),
            g.shape(s)
        )));
    }
    let heads = attention_heads(g, b.attn, config, k, s, s);
    let z = combine_heads(g, b.attn, &heads, None);
    let mut gather = Vec::with_capacity(heads.scores.len());
    for &sc in &heads.scores {
        let t = g.transpose(sc);
        gather.push(g.softmax(t));
    }
    let mut bsum = gather[0];
    for &x in &gather[1..] {
        bsum = g.add(bsum, x);
    }
    let bmean = g.scale(bsum, F::of(1.0 / heads.scores.len() as f64));
    let kz = g.add(k, z);
    let mixed = g.matmul(bmean, kz);
    let r = g.add(s, mixed);
    let mut r = norm(g, b.norm, r);
    if let Some((ff, n2)) = b.dense {
        let f = feed_forward(g, ff, r);
        let o = g.add(r, f);
        r = norm(g, n2, o);
    }
    Ok(r)
}

/// Residual information `r` (`L_s x E`) from knowledge `k'` and message `s'`.
pub fn integrate_tx<F: Scalar>(g: &mut Graph<F>, arch: &Architecture, k: Var, s: Var) -> Result<Var, NeuralError> {
    integrate(g, &arch.layout.integrate_tx, &arch.config, k, s)
}

/// Recovered semantics (`L_s x E`) from knowledge `k'` and received `r_hat`.
pub fn integrate_rx<F: Scalar>(g: &mut Graph<F>, arch: &Architecture, k: Var, r_hat: Var) -> Result<Var, NeuralError> {
    integrate(g, &arch.layout.integrate_rx, &arch.config, k, r_hat)
}

/// Dense `E -> 2M` per word, then power normalisation over the block. Row
/// `i` holds the interleaved real and imaginary parts of word `i`'s symbols.
pub fn channel_encode<F: Scalar>(g: &mut Graph<F>, arch: &Architecture, r: Var) -> Result<Var, NeuralError> {
    if !g.value(r).is_finite() {
        return Err(NeuralError::NonFinite("channel encoder input".into()));
    }
    let x = dense(g, arch.layout.channel_enc, r);
    g.power_norm(x).ok_or(NeuralError::ZeroPower)
}

/// The encoder output as complex symbols.
pub fn symbols_of<F: Scalar>(g: &Graph<F>, x: Var) -> ComplexSymbolBlock {
    ComplexSymbolBlock::from_interleaved(&g.value(x).to_f64())
}

/// Sends the encoder output through `channel` and zero-forcing
/// equalisation. With perfect channel knowledge the equalised block is
/// `x + n / h`, so it enters the graph as `x` plus a constant.
pub fn pass_channel<F: Scalar, R: Rng + ?Sized>(
    g: &mut Graph<F>,
    x: Var,
    channel: &ChannelConfig,
    rng: &mut R,
) -> Result<Var, NeuralError> {
    let block = symbols_of(g, x);
    let (received, realization) = transmit(&block, channel, rng);
    let eq = equalize(&received, &realization)?.to_interleaved();
    let (rows, cols) = g.shape(x);
    let offset: Vec<F> = eq
        .iter()
        .zip(g.value(x).data())
        .map(|(&y, &x)| F::of(y) - x)
        .collect();
    let n = g.input(Tensor::from_vec(rows, cols, offset));
    Ok(g.add(x, n))
}

/// Dense `2M -> E` per word on the equalised symbols.
pub fn channel_decode<F: Scalar>(g: &mut Graph<F>, arch: &Architecture, y: Var) -> Result<Var, NeuralError> {
    let width = 2 * arch.config.symbols_per_word;
    if g.shape(y).1 != width {
        return Err(NeuralError::Shape(format!(
            "channel decoder expects {width} reals per word, got {}",
            g.shape(y).1
        )));
    }
    Ok(dense(g, arch.layout.channel_dec, y))
}

/// Channel-decoder input from a received block: `M` symbols per word.
pub fn received_input<F: Scalar>(
    g: &mut Graph<F>,
    arch: &Architecture,
    y: &ComplexSymbolBlock,
) -> Result<Var, NeuralError> {
    let m = arch.config.symbols_per_word;
    if y.is_empty() || y.len() % m != 0 {
        return Err(NeuralError::Shape(format!("{} symbols is not a positive multiple of {m}", y.len())));
    }
    let data: Vec<F> = y.to_interleaved().into_iter().map(F::of).collect();
    Ok(g.input(Tensor::from_vec(y.len() / m, 2 * m, data)))
}

/// Recovery block and output projection: `L_s x N_vocab` logits.
pub fn recover_logits<F: Scalar>(g: &mut Graph<F>, arch: &Architecture, s_hat: Var) -> Result<Var, NeuralError> {
    let h = encoder_block(g, &arch.layout.recover, &arch.config, s_hat)?;
    Ok(dense(g, arch.layout.output, h))
}

/// Row-wise softmax of logits.
pub fn probabilities<F: Scalar>(logits: &Tensor<F>) -> Tensor<F> {
    let mut p = logits.clone();
    for i in 0..p.rows() {
        super::graph::softmax_in_place(p.row_mut(i));
    }
    p
}

/// Mean of `-ln p(target)` over unmasked positions, with `p` floored at `1e-12`.
pub fn cross_entropy_loss<F: Scalar>(probs: &Tensor<F>, targets: &[Option<usize>]) -> Result<f64, NeuralError> {
    if probs.rows() != targets.len() {
        return Err(NeuralError::Shape(format!("{} rows for {} targets", probs.rows(), targets.len())));
    }
    let mut total = 0.0;
    let mut count = 0;
    for (i, t) in targets.iter().enumerate() {
        if let Some(t) = *t {
            if t >= probs.cols() {
                return Err(NeuralError::Shape(format!("target {t} outside {} classes", probs.cols())));
            }
            total -= probs.get(i, t).f64().max(super::graph::MIN_PROB).ln();
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { total / count as f64 })
}

/// Nodes of one full forward pass.
#[derive(Debug, Clone, Copy)]
pub struct ForwardPass {
    pub message: Var,
    pub knowledge: Var,
    pub residual: Var,
    pub symbols: Var,
    pub received: Var,
    pub recovered: Var,
    pub logits: Var,
}

/// Message and knowledge ids through transmitter, `channel` (identity when
/// `None`) and receiver.
pub fn forward<F: Scalar, R: Rng + ?Sized>(
    g: &mut Graph<F>,
    arch: &Architecture,
    message: &[u32],
    knowledge: &[u32],
    channel: Option<&ChannelConfig>,
    rng: &mut R,
) -> Result<ForwardPass, NeuralError> {
    let s = semantic_extract(g, arch, message)?;
    let k = semantic_extract(g, arch, knowledge)?;
    let r = integrate_tx(g, arch, k, s)?;
    let x = channel_encode(g, arch, r)?;
    let y = match channel {
        Some(c) => pass_channel(g, x, c, rng)?,
        None => x,
    };
    let r_hat = channel_decode(g, arch, y)?;
    let s_hat = integrate_rx(g, arch, k, r_hat)?;
    let logits = recover_logits(g, arch, s_hat)?;
    Ok(ForwardPass {
        message: s,
        knowledge: k,
        residual: r,
        symbols: x,
        received: y,
        recovered: s_hat,
        logits,
    })
}
