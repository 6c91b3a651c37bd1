//! Cyclone codes: rateless erasure codes over the ring `R_p` built from XOR
//! and cyclic shifts only.

pub mod baselines;
pub mod decode;
pub mod encode;
pub mod error;
pub mod net;
pub mod ring;
pub mod rng;
pub mod simlab;
pub mod soliton;
pub mod stream;
pub mod wordlen;

pub use decode::{DecodeStats, DecoderOptions, DecoderSession, Progress};
pub use encode::{derive_clause_spec, encode_stream, encode_symbol, ClauseSpec, CodeConfig, Encoder, Term};
pub use error::{Error, Result};
pub use ring::{pad, unpad, DataSymbol, GhostVector, RingParams};
pub use soliton::{DegreeDistribution, DistributionKind};
pub use wordlen::{is_native, split, SplitDecoder, SplitEncoder, WordPlan};
