//! Simulation of Grover-based minimum search over a QRAM-encoded dataset.
//!
//! The crate drives a dense statevector simulator through the full pipeline:
//! [`qram`] writes a classical dataset into a data register entangled with an
//! address register, [`qms`] runs the iterative prefix-oracle descent that
//! finds the dataset minimum, [`baselines`] provides instrumented classical
//! comparators and the query-complexity benchmark sweep, and [`qkmeans`]
//! applies the search as the argmin subroutine of Lloyd's K-means.
//!
//! With the default `parallel` feature the amplitude kernels, benchmark
//! trials, and per-point searches fan out over rayon; disabling it yields a
//! dependency-light sequential build with identical results.

pub mod baselines;
pub mod error;
pub mod qkmeans;
pub mod qms;
pub mod qram;
pub mod statevector;

pub use error::{Error, Result};

/// Derive a child seed for a named stream, so every source of randomness in
/// a run flows from one root seed without the streams colliding.
pub fn derive_seed(base: u64, stream: &str, index: u64) -> u64 {
    // FNV-1a over the stream tag, then a splitmix64 finalizer.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in stream.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base ^ h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
