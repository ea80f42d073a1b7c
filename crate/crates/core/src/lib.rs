//! Reversible arithmetic circuits for Shor-style modular exponentiation,
//! built from X, CNOT and Toffoli gates with exact CNOT accounting.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs: builders emit flat gate lists, the simulator runs
//! them on computational basis states, and the cost model evaluates the
//! closed-form CNOT counts the builders are measured against.
//!
//! Bit order is little-endian everywhere: qubit `i` of a register carries
//! weight `2^i`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
mod builder;
pub mod circuit;
pub mod cost;
mod error;
pub mod modexp;
pub mod modmul;
pub mod numtheory;
pub mod shor;
pub mod sim;

pub use circuit::{Block, Circuit, Gate, Register, RegisterLayout, Role};
pub use error::Error;
pub use sim::BasisState;

pub type Result<T, E = Error> = core::result::Result<T, E>;
