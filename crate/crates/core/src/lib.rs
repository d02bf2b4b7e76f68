//! Exact state-vector simulation of a two-party quantum key agreement
//! protocol built on teleportation, together with the two checks that show
//! the protocol cannot be realized physically:
//!
//! - [`discrim`]: the four states Alice might hold cannot be told apart with
//!   probability above 1/2, so an inner-product device that separates them
//!   cannot exist.
//! - [`nosignal`]: Bob's choice of measurement basis on a shared singlet leaves
//!   Alice's reduced state at `I/2` either way, so such a device would signal.
//!
//! The crate is `no_std` and only needs `alloc`. IO, the CLI and report
//! formats live in the `qka` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;

pub mod discrim;
pub mod nosignal;
pub mod qka;
pub mod qmath;
pub mod qsim;

pub use error::{Error, Result};
