//! The three KEM primitives with implicit rejection, plus fixed-layout
//! object serialization.
//!
//! Decapsulation never reports failure: when decoding fails or the
//! re-encryption check `e' == H(m'')` mismatches, the shared secret is
//! derived from the hidden value `sigma` through the same code path, so all
//! rejection causes are observationally identical.

use std::time::Instant;

use crate::bench::{Operation, Primitive, ProfileSink};
use crate::ct;
use crate::decoder::{bgf_decode, compute_syndrome};
use crate::error::Error;
use crate::oracles::{hash_h, hash_k, hash_l, Message};
use crate::params::{parameter_set, Level, ParameterSet};
use crate::ring::{RingElement, SparseVector};
use crate::sampling::{derive_key_material, Seed};
use crate::Result;

/// Sparse private key `(h0, h1)` plus the implicit-rejection value `sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    h0: SparseVector,
    h1: SparseVector,
    sigma: [u8; 32],
    level: Level,
}

impl PrivateKey {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn h0(&self) -> &SparseVector {
        &self.h0
    }

    pub fn h1(&self) -> &SparseVector {
        &self.h1
    }

    /// The implicit-rejection value; hashed in place of `m''` when
    /// decapsulation rejects.
    pub fn sigma(&self) -> &[u8; 32] {
        &self.sigma
    }

    /// Layout: level tag, then the `w/2` indices of `h0` and of `h1` as
    /// 4-byte little-endian integers, then `sigma`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 8 * self.h0.weight() + 32);
        out.push(self.level.tag());
        for sv in [&self.h0, &self.h1] {
            for &idx in sv.indices() {
                out.extend_from_slice(&idx.to_le_bytes());
            }
        }
        out.extend_from_slice(&self.sigma);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::format("empty private key"));
        }
        let level = Level::from_tag(bytes[0])?;
        let p = parameter_set(level);
        let d = p.d() as usize;
        let expect = 1 + 8 * d + 32;
        if bytes.len() != expect {
            return Err(Error::format(format!(
                "private key for {level} needs {expect} bytes, got {}",
                bytes.len()
            )));
        }
        let read_block = |offset: usize| -> Result<SparseVector> {
            let mut indices = Vec::with_capacity(d);
            for i in 0..d {
                let at = offset + 4 * i;
                let idx = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
                indices.push(idx);
            }
            SparseVector::from_indices(p.r, indices)
        };
        let h0 = read_block(1)?;
        let h1 = read_block(1 + 4 * d)?;
        let mut sigma = [0u8; 32];
        sigma.copy_from_slice(&bytes[1 + 8 * d..]);
        Ok(Self {
            h0,
            h1,
            sigma,
            level,
        })
    }
}

/// Dense public key `h = h1 * h0^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    h: RingElement,
    level: Level,
}

impl PublicKey {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn h(&self) -> &RingElement {
        &self.h
    }

    /// Layout: level tag, then the ring element bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + self.h.to_bytes().len());
        out.push(self.level.tag());
        out.extend_from_slice(&self.h.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::format("empty public key"));
        }
        let level = Level::from_tag(bytes[0])?;
        let p = parameter_set(level);
        if bytes.len() != 1 + p.r_bytes() {
            return Err(Error::format(format!(
                "public key for {level} needs {} bytes, got {}",
                1 + p.r_bytes(),
                bytes.len()
            )));
        }
        let h = RingElement::from_bytes(&bytes[1..], p.r)?;
        Ok(Self { h, level })
    }
}

/// Ciphertext `(s, m')`: syndrome-like ring element plus the masked message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub s: RingElement,
    pub m_masked: [u8; 32],
    pub level: Level,
}

impl Ciphertext {
    /// Layout: level tag, ring element bytes, masked message.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + self.s.to_bytes().len() + 32);
        out.push(self.level.tag());
        out.extend_from_slice(&self.s.to_bytes());
        out.extend_from_slice(&self.m_masked);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::format("empty ciphertext"));
        }
        let level = Level::from_tag(bytes[0])?;
        let p = parameter_set(level);
        if bytes.len() != 1 + p.ciphertext_bytes() {
            return Err(Error::format(format!(
                "ciphertext for {level} needs {} bytes, got {}",
                1 + p.ciphertext_bytes(),
                bytes.len()
            )));
        }
        let s = RingElement::from_bytes(&bytes[1..1 + p.r_bytes()], p.r)?;
        let mut m_masked = [0u8; 32];
        m_masked.copy_from_slice(&bytes[1 + p.r_bytes()..]);
        Ok(Self {
            s,
            m_masked,
            level,
        })
    }
}

/// 32-byte shared secret. Equality is provided for tests; production
/// consumers should compare derived keys, not secrets.
#[derive(Clone, PartialEq, Eq)]
pub struct SharedSecret {
    bytes: [u8; 32],
}

impl SharedSecret {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }
}

impl core::fmt::Debug for SharedSecret {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("SharedSecret(..)")
    }
}

/// Deterministic key generation from a 32-byte seed.
///
/// `(h0, h1, sigma)` come from the seed expander; the public key is
/// `h = h1 * h0^-1`. `h0` has odd weight `w/2` for every shipped parameter
/// set, so the inversion cannot fail on honestly derived material.
pub fn keygen(seed: &Seed, p: &ParameterSet) -> Result<(PrivateKey, PublicKey)> {
    keygen_instrumented(seed, p, &mut ())
}

pub(crate) fn keygen_instrumented<S: ProfileSink>(
    seed: &Seed,
    p: &ParameterSet,
    sink: &mut S,
) -> Result<(PrivateKey, PublicKey)> {
    let t = Instant::now();
    let (h0, h1, sigma) = derive_key_material(seed, p)?;
    sink.record(Primitive::KeyGen, Operation::Prng, elapsed_nanos(t));

    let h0_dense = h0.densify();
    let t = Instant::now();
    let h0_inv = h0_dense.invert()?;
    sink.record(Primitive::KeyGen, Operation::Inversion, elapsed_nanos(t));

    let t = Instant::now();
    let h = h0_inv.mul_sparse(&h1)?;
    sink.record(Primitive::KeyGen, Operation::Multiplication, elapsed_nanos(t));

    // Defining identity of the key pair; cheap relative to the inversion.
    debug_assert_eq!(h.mul_sparse(&h0).unwrap(), h1.densify());

    let level = p.level;
    Ok((
        PrivateKey {
            h0,
            h1,
            sigma,
            level,
        },
        PublicKey { h, level },
    ))
}

/// Encapsulation: expands `m` into the error vector, computes
/// `s = e0 + e1 * h` and `m' = m xor L(e)`, and derives
/// `K = K(m, (s, m'))`. Deterministic in `(pk, m)`; pair with
/// [`Message::from_seed`] and a fresh seed for randomized use.
pub fn encaps(pk: &PublicKey, m: &Message) -> Result<(SharedSecret, Ciphertext)> {
    encaps_instrumented(pk, m, &mut ())
}

pub(crate) fn encaps_instrumented<S: ProfileSink>(
    pk: &PublicKey,
    m: &Message,
    sink: &mut S,
) -> Result<(SharedSecret, Ciphertext)> {
    let p = parameter_set(pk.level);
    debug_assert_eq!(pk.h.r(), p.r);

    let t = Instant::now();
    let e = hash_h(m, p)?;
    sink.record(Primitive::Encaps, Operation::H, elapsed_nanos(t));

    let t = Instant::now();
    let s = e.e1.mul_dense(&pk.h)?.add(&e.e0)?;
    sink.record(Primitive::Encaps, Operation::Multiplication, elapsed_nanos(t));

    let t = Instant::now();
    let mask = hash_l(&e);
    sink.record(Primitive::Encaps, Operation::L, elapsed_nanos(t));

    let mut m_masked = [0u8; 32];
    for i in 0..32 {
        m_masked[i] = m.as_bytes()[i] ^ mask[i];
    }
    let ct = Ciphertext {
        s,
        m_masked,
        level: pk.level,
    };

    let t = Instant::now();
    let secret = hash_k(m.as_bytes(), &ct);
    sink.record(Primitive::Encaps, Operation::K, elapsed_nanos(t));

    Ok((SharedSecret { bytes: secret }, ct))
}

/// Decapsulation with implicit rejection.
///
/// Decodes the syndrome `c.s * h0`, unmasks `m''`, and re-expands it through
/// `H`. The prefix hashed into the shared secret is selected branch-free
/// between `m''` and `sigma` on the AND of the decoder success flag and the
/// constant-time equality `e' == H(m'')`, so a decoding failure and a
/// re-encryption mismatch are indistinguishable. Hostile ciphertexts only
/// ever change which secret comes out, never raise an error.
pub fn decaps(sk: &PrivateKey, c: &Ciphertext) -> Result<SharedSecret> {
    decaps_instrumented(sk, c, &mut ())
}

pub(crate) fn decaps_instrumented<S: ProfileSink>(
    sk: &PrivateKey,
    c: &Ciphertext,
    sink: &mut S,
) -> Result<SharedSecret> {
    if sk.level != c.level {
        return Err(Error::parameter(format!(
            "level mismatch: key is {}, ciphertext is {}",
            sk.level, c.level
        )));
    }
    let p = parameter_set(sk.level);

    let t = Instant::now();
    let syndrome = compute_syndrome(&c.s, &sk.h0)?;
    let outcome = bgf_decode(&syndrome, &sk.h0, &sk.h1, p)?;
    sink.record(Primitive::Decaps, Operation::Decoding, elapsed_nanos(t));

    let t = Instant::now();
    let mask = hash_l(&outcome.e_prime);
    sink.record(Primitive::Decaps, Operation::L, elapsed_nanos(t));

    let mut m_candidate = [0u8; 32];
    for i in 0..32 {
        m_candidate[i] = c.m_masked[i] ^ mask[i];
    }

    let t = Instant::now();
    let e_expected = hash_h(&Message::from_bytes(m_candidate), p)?;
    sink.record(Primitive::Decaps, Operation::H, elapsed_nanos(t));

    let success = ct::mask_u8(outcome.success as u8);
    let e0_eq = ct::eq_mask_words(outcome.e_prime.e0.words(), e_expected.e0.words());
    let e1_eq = ct::eq_mask_words(outcome.e_prime.e1.words(), e_expected.e1.words());
    let accept = success & (e0_eq & e1_eq) as u8;

    let mut prefix = [0u8; 32];
    ct::select_bytes(accept, &m_candidate, &sk.sigma, &mut prefix);

    let t = Instant::now();
    let secret = hash_k(&prefix, c);
    sink.record(Primitive::Decaps, Operation::K, elapsed_nanos(t));

    Ok(SharedSecret { bytes: secret })
}

#[inline]
fn elapsed_nanos(t: Instant) -> u64 {
    t.elapsed().as_nanos() as u64
}
