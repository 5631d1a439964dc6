//! Classical baselines: character source codes, Reed-Solomon and LDPC
//! channel codes, and 64-QAM.

pub mod alphabet;
pub mod bits;
pub mod huffman;
pub mod ldpc;
pub mod pipeline;
pub mod qam;
pub mod rs;

pub use alphabet::{fixed6_decode, fixed6_encode, CharAlphabet};
pub use bits::BitStream;
pub use huffman::HuffmanCode;
pub use ldpc::{LdpcCode, ParityCheck};
pub use pipeline::{ChannelCode, ClassicalPipeline, PipelineOutput, SourceCode};
pub use qam::Qam64;

use crate::channel::ChannelError;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CodecError {
    #[error("bit length {len} is not a multiple of {multiple}")]
    BadLength { len: usize, multiple: usize },
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("invalid code table: {0}")]
    InvalidTable(String),
    #[error("symbol {0:?} has no code word")]
    UnknownSymbol(char),
    #[error("corrupt bitstream")]
    CorruptBitstream { decoded_prefix: String },
    #[error("symbol {0} outside GF(8)")]
    SymbolOutOfRange(u8),
    #[error("invalid parity-check matrix: {0}")]
    InvalidMatrix(String),
    #[error("non-finite LLR")]
    NonFiniteLlr,
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
