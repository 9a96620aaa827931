//! Minimal feed-forward network engine: batched forward/backward with
//! input gradients, Adam, Xavier initialization and Polyak averaging.

mod adam;
mod gemm;
pub mod gradcheck;
mod mlp;

pub use adam::{polyak_update, Adam, Direction};
pub use mlp::{xavier_init, GradientBundle, Mlp, OutputActivation, Trace};
