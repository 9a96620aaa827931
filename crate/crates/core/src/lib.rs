//! Simulation and learning core for joint transmit beamforming and RIS
//! configuration in a multiuser MISO downlink.
//!
//! The crate is `no_std` + `alloc` when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod environment;
pub mod error;
pub mod explorer;
pub mod neural;
pub mod numerics;
pub mod oracle;
pub mod sac;

pub use error::{Error, Result};
