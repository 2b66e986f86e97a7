//! The three random oracles of the KEM.
//!
//! `H` expands a message into the weight-`t` error vector, `L` masks the
//! message inside the ciphertext, `K` derives the shared secret. `H` must be
//! a deterministic fixed-weight sampler because decapsulation re-runs it and
//! compares error vectors; `L` and `K` are SHA3-384 truncated to 256 bits.

use sha3::{Digest, Sha3_384};

use crate::kem::Ciphertext;
use crate::params::ParameterSet;
use crate::ring::{RingElement, SparseVector};
use crate::sampling::{sample_fixed_weight, xof_init, Seed, DOMAIN_MSG};
use crate::Result;

/// KEM message: `ell = 256` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    bytes: [u8; 32],
}

impl Message {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self { bytes }
    }

    /// Deterministic message expansion from a seed; the CLI pairs this with
    /// a fresh seed so the core API stays a pure function.
    pub fn from_seed(seed: &Seed) -> Self {
        let mut bytes = [0u8; 32];
        xof_init(seed, DOMAIN_MSG).fill(&mut bytes);
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }
}

/// Error vector `e = (e0, e1)`, kept dense; `weight(e0) + weight(e1) = t`
/// when produced by [`hash_h`]. The split between halves is secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorVector {
    pub e0: RingElement,
    pub e1: RingElement,
}

impl ErrorVector {
    pub fn zero(r: u32) -> Self {
        Self {
            e0: RingElement::zero(r),
            e1: RingElement::zero(r),
        }
    }

    pub fn total_weight(&self) -> usize {
        self.e0.weight() + self.e1.weight()
    }
}

/// `H`: message to fixed-weight error vector.
///
/// Samples `t` distinct positions over `[0, 2r)` from
/// `SHAKE256(m || 0x04)`; positions below `r` land in `e0`, the rest in
/// `e1` shifted down by `r`. The split of the indices is handled with the
/// same masked scan as every other secret densification.
pub fn hash_h(m: &Message, p: &ParameterSet) -> Result<ErrorVector> {
    let seed = Seed::from_bytes(*m.as_bytes());
    let mut stream = xof_init(&seed, DOMAIN_MSG);
    let support = sample_fixed_weight(&mut stream, 2 * p.r, p.t)?;
    Ok(split_error(&support, p.r))
}

/// Splits a weight-`t` support over `[0, 2r)` into the two dense halves.
fn split_error(support: &SparseVector, r: u32) -> ErrorVector {
    debug_assert_eq!(support.n(), 2 * r);
    // Splitting the sorted index list at r would expose the half weights
    // through the slice lengths, so densify over 2r first and cut the bit
    // vector instead. from_words masks everything at and above bit r, which
    // removes the e1 bits sharing the boundary word.
    let dense = support.densify();
    let n1 = crate::ring::n_words(r);
    let e0 = RingElement::from_words(r, dense.words()[..n1].to_vec());
    // Bits [r, 2r) slide down via a (public) rotation of the 2r-bit vector.
    let hi = dense.rotate(r);
    let e1 = RingElement::from_words(r, hi.words()[..n1].to_vec());
    ErrorVector { e0, e1 }
}

/// `L`: 32-byte digest of the error vector,
/// `SHA3-384(bytes(e0) || bytes(e1))` truncated to 256 bits.
pub fn hash_l(e: &ErrorVector) -> [u8; 32] {
    let mut hasher = Sha3_384::new();
    hasher.update(e.e0.to_bytes());
    hasher.update(e.e1.to_bytes());
    truncate_digest(hasher)
}

/// `K`: shared-secret derivation,
/// `SHA3-384(prefix || bytes(s) || m')` truncated to 256 bits. The prefix is
/// `m` on encapsulation and either `m''` or `sigma` on decapsulation.
pub fn hash_k(prefix: &[u8; 32], c: &Ciphertext) -> [u8; 32] {
    let mut hasher = Sha3_384::new();
    hasher.update(prefix);
    hasher.update(c.s.to_bytes());
    hasher.update(c.m_masked);
    truncate_digest(hasher)
}

fn truncate_digest(hasher: Sha3_384) -> [u8; 32] {
    let digest = hasher.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest[..32]);
    out
}
