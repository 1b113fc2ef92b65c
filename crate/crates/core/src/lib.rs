//! Successive-refinement pruning (SuRP) for neural-network weights.
//!
//! The crate compresses a set of weight tensors by normalizing each tensor
//! by its entrywise ℓ1 norm, treating the concatenation as an i.i.d.
//! Laplacian (or, for magnitudes, exponential) source, and transmitting a
//! sequence of indices that successively refine a sparse reconstruction.
//!
//! Module map:
//!
//! - [`tensor_store`]: manifest + blob I/O, normalization and its inverse.
//! - [`rd_theory`]: closed-form rate-distortion quantities and samplers.
//! - [`codec`]: encoder/decoder state machines and the `SURP` container.
//! - [`entropy`]: bit I/O, unary and Golomb coders, permuted-rank indexing.
//! - [`nn_eval`]: dense ReLU inference and output-perturbation bounds.
//! - [`analysis`]: parameter estimation, fit diagnostics, traces, budgets.
//! - [`cli`]: the `surp` command-line front end.

pub mod analysis;
pub mod cli;
pub mod codec;
pub mod entropy;
mod error;
pub mod nn_eval;
pub mod rd_theory;
pub mod rng;
pub mod tensor_store;

pub use codec::{
    decode, encode, replay, Decoded, Encoded, IndexCodec, MessageRecord, StopRule, SurpConfig, Variant,
};
pub use error::{Error, Result};
pub use tensor_store::{NormalizedVector, Segment, WeightSet};
