//! Portable, constant-time implementation of the BIKE QC-MDPC key
//! encapsulation mechanism, plus a profiling harness that breaks the
//! execution time of each KEM primitive down into its suboperations.
//!
//! The crate is organized around the three KEM primitives:
//!
//! - [`kem::keygen`] expands a 32-byte seed into a sparse private key
//!   `(h0, h1, sigma)` and the dense public key `h = h1 * h0^-1`.
//! - [`kem::encaps`] samples a fixed-weight error vector from a message,
//!   computes the syndrome `s = e0 + e1 * h`, and derives a shared secret.
//! - [`kem::decaps`] recovers the error vector with the Black-Gray-Flip
//!   decoder and applies implicit rejection on any failure.
//!
//! All arithmetic on secret data avoids value-dependent branches and
//! value-dependent memory indexing; see the `ring` module for the word-level
//! primitives this rests on.
//!
//! This implementation is self-consistent (regression vectors are pinned in
//! the test suite) but does not claim byte-for-byte interoperability with the
//! official BIKE submission's KAT files.

pub mod bench;
mod ct;
pub mod decoder;
mod error;
pub mod kem;
pub mod oracles;
pub mod params;
pub mod ring;
pub mod sampling;
pub mod selftest;

pub use error::Error;
pub use params::{parameter_set, Level, ParameterSet};

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
