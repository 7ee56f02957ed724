//! Minimal dense-tensor engine with reverse-mode automatic differentiation.
//!
//! The engine records a computation graph on a [`Tape`]: every operation
//! appends a node holding its result and provenance, and [`Tape::backward`]
//! replays the nodes in reverse to accumulate gradients. Creation order is a
//! topological order by construction, so the backward pass visits each node
//! exactly once and gradient accumulation is deterministic (bit-identical
//! across repeated runs on the same graph).
//!
//! The primitive set is fixed: matmul, elementwise add/mul (with scalar
//! broadcast), column-broadcast add, concat, slice, tanh, sigmoid, softmax,
//! clamped log, and a negative-log-likelihood gather. Everything else is
//! composed from these. Storage is generic over [`Real`] — `f32` for
//! training, `f64` for gradient-verification runs.

mod error;
mod kernels;
mod real;
mod tape;

pub use error::{AdError, Result};
pub use real::Real;
pub use tape::{NodeId, Tape, Var};

/// Probabilities are clamped to this floor before `ln` so that exact zeros
/// (possible in mixture distributions) never produce `-inf`.
pub const LOG_CLAMP: f64 = 1e-12;
