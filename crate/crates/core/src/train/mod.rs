//! Joint-loss training: Adagrad with global-norm clipping, checkpointing,
//! and the epoch loop.

mod checkpoint;
mod optimizer;
mod trainer;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use optimizer::{clip_gradients, global_grad_norm, Adagrad};
pub use trainer::{evaluate_loss, train, StepLog, StopReason, TrainOptions, TrainOutcome};
