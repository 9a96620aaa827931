//! Complex linear algebra and seeded sampling.

mod complex;
mod rng;

pub use complex::{diag_times, matmul, row_vec_mat, sq_norm, trace_gram, CMatrix, CVector, C64};
pub use rng::{sample_cn, SeededRng};
