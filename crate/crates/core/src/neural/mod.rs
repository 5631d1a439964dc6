//! Differentiable tensor core and the knowledge-assisted transceiver.

pub mod graph;
pub mod model;
pub mod optim;
pub mod params;
pub mod scalar;
pub mod tensor;
pub mod train;

pub use graph::{Graph, Var};
pub use model::{Architecture, ModelConfig, Profile, TransceiverParams};
pub use params::{Gradients, ParamId, ParamStore};
pub use scalar::Scalar;
pub use tensor::Tensor;
pub use train::{end_to_end_transmit, train, Example, TrainConfig, Transmission};

use crate::channel::ChannelError;
use crate::corpus::CorpusError;
use crate::knowledge_base::KbError;

#[derive(Debug, thiserror::Error)]
pub enum NeuralError {
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("empty token sequence")]
    EmptySequence,
    #[error("sequence of {len} tokens exceeds the maximum {max}")]
    TooLong { len: usize, max: usize },
    #[error("token id {id} outside vocabulary of {vocab}")]
    TokenOutOfRange { id: u32, vocab: usize },
    #[error("zero-power block")]
    ZeroPower,
    #[error("non-finite values in {0}")]
    NonFinite(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("training diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Knowledge(#[from] KbError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
