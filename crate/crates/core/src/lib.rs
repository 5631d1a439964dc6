//! Knowledge-base assisted semantic communication over noisy channels.

pub mod channel;
pub mod classical;
pub mod corpus;
pub mod harness;
pub mod hash;
pub mod knowledge_base;
pub mod metrics;
pub mod neural;
pub mod semantic_info;
