//! Exact combinatorics of Lipschitz maps and isometries on Baire space `ω^ω`
//! and Cantor space `2^ω`.
//!
//! Points are eventually constant sequences, distances are kept on a log
//! scale, and every map is either a finite partial map between points or a
//! tree homomorphism on finite words.
//!
//! Run `cargo run --example <name>` for a tour of each part; the `lipbaire`
//! binary exposes the same operations over JSON files.

pub mod backforth;
pub mod cli;
pub mod error;
pub mod forcing;
pub mod gen;
pub mod lipschitz;
pub mod parity;
pub mod prefix;
pub mod selftest;
pub mod slalom;

pub use error::{Error, OracleError, Result};
