//! Arithmetic in the polynomial ring `R = F2[x]/(x^r - 1)`.
//!
//! [`RingElement`] is a dense bit vector of the `r` coefficients, packed into
//! 64-bit words; [`SparseVector`] is a sorted index list for the low-weight
//! vectors (private keys, error vectors). The ring sizes used by BIKE make
//! `x^r - 1` split as `(x - 1)` times one irreducible factor, so every
//! odd-weight element except the all-ones vector is invertible.
//!
//! Constant-time contract: operations that may touch secret coefficients
//! (multiplication, rotation, inversion, densification) use fixed loop
//! structures with no value-dependent branches or value-dependent memory
//! indexing. Rotation amounts (secret key indices) are consumed through a
//! masked barrel shifter; variable-distance word shifts are assumed
//! constant-time, which holds on the mainstream 64-bit targets this crate
//! supports. Functions documented as oracle/test helpers (`bit`, the byte
//! codecs' error paths) are exempt.

pub mod clmul;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::ct;
use crate::error::Error;
use crate::Result;
use clmul::{ActiveClmul, ClmulProvider};

/// Words needed for `r` bits.
pub(crate) fn n_words(r: u32) -> usize {
    (r as usize).div_ceil(64)
}

fn mask_last_word(words: &mut [u64], r: u32) {
    let used = r % 64;
    if used != 0 {
        let last = words.len() - 1;
        words[last] &= (1u64 << used) - 1;
    }
}

/// Dense element of `F2[x]/(x^r - 1)`: coefficient `i` of `x^i` lives at bit
/// `i % 64` of word `i / 64`. Padding bits above `r` are kept at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    r: u32,
    words: Vec<u64>,
}

impl RingElement {
    /// The zero polynomial.
    pub fn zero(r: u32) -> Self {
        assert!(r >= 2, "ring size must be at least 2");
        Self {
            r,
            words: vec![0u64; n_words(r)],
        }
    }

    /// The multiplicative identity.
    pub fn one(r: u32) -> Self {
        Self::monomial(r, 0)
    }

    /// The monomial `x^i`.
    pub fn monomial(r: u32, i: u32) -> Self {
        assert!(i < r, "exponent out of range");
        let mut e = Self::zero(r);
        e.words[(i / 64) as usize] |= 1u64 << (i % 64);
        e
    }

    /// Builds an element from a set of coefficient indices (any order,
    /// duplicates rejected). Test and I/O convenience; keys and errors go
    /// through [`SparseVector`].
    pub fn from_support(r: u32, indices: &[u32]) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        Ok(SparseVector::from_indices(r, sorted)?.densify())
    }

    /// Uniformly random element; used by tests and the hostile-syndrome
    /// checks.
    pub fn random<R: rand::RngCore>(r: u32, rng: &mut R) -> Self {
        let mut e = Self::zero(r);
        for w in e.words.iter_mut() {
            *w = rng.next_u64();
        }
        mask_last_word(&mut e.words, r);
        e
    }

    /// Ring size `r`.
    pub fn r(&self) -> u32 {
        self.r
    }

    /// Coefficient of `x^i`. Not constant-time; oracle/test use only.
    pub fn bit(&self, i: u32) -> bool {
        assert!(i < self.r);
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight: population count over all `r` bits, word by word.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(r: u32, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), n_words(r));
        mask_last_word(&mut words, r);
        Self { r, words }
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.r == other.r {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.r,
                got: other.r,
            })
        }
    }

    /// Coefficient-wise XOR (ring addition).
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let mut out = self.clone();
        out.xor_in_place(other);
        Ok(out)
    }

    pub(crate) fn xor_in_place(&mut self, other: &Self) {
        debug_assert_eq!(self.r, other.r);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Carry-less product reduced mod `x^r - 1`.
    ///
    /// Word-level schoolbook multiplication under one layer of Karatsuba;
    /// every word pair is always processed, so the running time does not
    /// depend on the coefficients.
    pub fn mul_dense(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let prod = clmul_poly(&self.words, &other.words);
        Ok(Self::from_product(prod, self.r))
    }

    /// Product with a sparse operand: XOR of `weight(other)` cyclic shifts
    /// of `self`. The shift count is the (public) weight; each shift amount
    /// is consumed in constant time.
    pub fn mul_sparse(&self, other: &SparseVector) -> Result<Self> {
        if self.r != other.n {
            return Err(Error::Dimension {
                expected: self.r,
                got: other.n,
            });
        }
        let doubled = Doubled::new(self);
        let mut acc = Self::zero(self.r);
        for &k in other.indices() {
            // x^k * a rotates coefficients up by k, i.e. extraction at
            // offset r - k (folded to 0 for k = 0 without branching on k).
            let amount = self.r - k;
            let wrap = ct::eq_mask_u32(amount, self.r);
            let rot = doubled.extract(amount - (self.r & wrap));
            acc.xor_in_place(&rot);
        }
        Ok(acc)
    }

    /// Frobenius map: coefficient `i` moves to `2i mod r`. A permutation of
    /// the support, so the weight is preserved.
    pub fn square(&self) -> Self {
        self.multi_square(1)
    }

    /// `k`-fold squaring, applied as the single index permutation
    /// `i -> 2^k * i mod r`. The permutation table depends only on the
    /// public pair `(r, k)` and is cached after first use.
    pub fn multi_square(&self, k: u32) -> Self {
        let k = k % (self.r - 1); // 2^(r-1) = 1 mod r, so exponents wrap
        if k == 0 {
            return self.clone();
        }
        let table = squaring_table(self.r, k);
        let mut words = vec![0u64; self.words.len()];
        for (j, &src) in table.iter().enumerate() {
            let bit = (self.words[(src >> 6) as usize] >> (src & 63)) & 1;
            words[j >> 6] |= bit << (j & 63);
        }
        Self { r: self.r, words }
    }

    /// Multiplicative inverse by Fermat exponentiation:
    /// `a^-1 = a^(2^(r-1) - 2)`, evaluated with an Itoh-Tsujii addition
    /// chain on `r - 2` (multi-squarings plus
    /// `floor(log2(r-2)) + hw(r-2) - 1` multiplications, then one final
    /// squaring). Branch-free: the chain is a function of the public `r`.
    ///
    /// Requires odd weight; the all-ones element is the one odd-weight
    /// non-unit and is rejected up front.
    pub fn invert(&self) -> Result<Self> {
        let w = self.weight();
        if w.is_multiple_of(2) || w == self.r as usize {
            return Err(Error::NonInvertible);
        }
        let chain = self.r - 2;
        let top = 31 - chain.leading_zeros();
        let mut f = self.clone(); // a^(2^1 - 1)
        let mut ones: u32 = 1;
        for i in (0..top).rev() {
            let shifted = f.multi_square(ones);
            f = shifted.mul_dense(&f).expect("same ring");
            ones *= 2;
            if (chain >> i) & 1 == 1 {
                f = f.square().mul_dense(self).expect("same ring");
                ones += 1;
            }
        }
        debug_assert_eq!(ones, chain);
        // f = a^(2^(r-2) - 1); squaring doubles the exponent.
        Ok(f.square())
    }

    /// Little-endian byte serialization: coefficient `i` is bit `i % 8` of
    /// byte `i / 8`; `ceil(r/8)` bytes total.
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = (self.r as usize).div_ceil(8);
        let mut out = vec![0u8; len];
        for (i, w) in self.words.iter().enumerate() {
            let bytes = w.to_le_bytes();
            let start = i * 8;
            let stop = (start + 8).min(len);
            out[start..stop].copy_from_slice(&bytes[..stop - start]);
        }
        out
    }

    /// Inverse of [`RingElement::to_bytes`]. Rejects wrong lengths and any
    /// set padding bit above `r`.
    pub fn from_bytes(bytes: &[u8], r: u32) -> Result<Self> {
        let expect = (r as usize).div_ceil(8);
        if bytes.len() != expect {
            return Err(Error::format(format!(
                "ring element needs {expect} bytes, got {}",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; n_words(r)];
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        let mut masked = words.clone();
        mask_last_word(&mut masked, r);
        if masked != words {
            return Err(Error::format("nonzero padding bits beyond r"));
        }
        Ok(Self { r, words })
    }

    /// `out[j] = self[(j + k) mod r]`, constant-time in `k`.
    pub(crate) fn rotate(&self, k: u32) -> Self {
        debug_assert!(k < self.r);
        Doubled::new(self).extract(k)
    }

    fn from_product(prod: Vec<u64>, r: u32) -> Self {
        // Reduce mod x^r - 1 by folding the bits at and above r back onto
        // the low part: result bit j = prod[j] ^ prod[j + r]. The product of
        // two degree < r polynomials stays below bit 2r, so one fold is
        // exact.
        let n = n_words(r);
        debug_assert_eq!(prod.len(), 2 * n);
        let q = (r / 64) as usize;
        let s = r % 64;
        debug_assert!(s != 0, "r is odd for every supported parameter set");
        let mut words = vec![0u64; n];
        for i in 0..n {
            let lo = prod[q + i] >> s;
            let hi = if q + i + 1 < 2 * n {
                (prod[q + i + 1] << 1) << (63 - s)
            } else {
                0
            };
            words[i] = prod[i] ^ lo ^ hi;
        }
        mask_last_word(&mut words, r);
        Self { r, words }
    }
}

/// Word-polynomial carry-less multiply, one Karatsuba layer over the
/// word-level schoolbook provided by the active clmul backend.
fn clmul_poly(a: &[u64], b: &[u64]) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut out = vec![0u64; 2 * n];
    if n < 8 {
        ActiveClmul::mul_acc(a, b, &mut out);
        return out;
    }
    let m = n / 2;
    let h = n - m;
    let (a0, a1) = a.split_at(m);
    let (b0, b1) = b.split_at(m);

    let mut z0 = vec![0u64; 2 * m];
    ActiveClmul::mul_acc(a0, b0, &mut z0);
    let mut z2 = vec![0u64; 2 * h];
    ActiveClmul::mul_acc(a1, b1, &mut z2);

    let mut sa = a1.to_vec();
    let mut sb = b1.to_vec();
    for i in 0..m {
        sa[i] ^= a0[i];
        sb[i] ^= b0[i];
    }
    let mut z1 = vec![0u64; 2 * h];
    ActiveClmul::mul_acc(&sa, &sb, &mut z1);
    for i in 0..2 * m {
        z1[i] ^= z0[i];
    }
    for i in 0..2 * h {
        z1[i] ^= z2[i];
    }

    out[..2 * m].copy_from_slice(&z0);
    for i in 0..2 * h {
        out[m + i] ^= z1[i];
    }
    for i in 0..2 * h {
        out[2 * m + i] ^= z2[i];
    }
    out
}

/// Low-weight binary vector of ambient length `n` (either `r` or `2r`),
/// stored as strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector {
    n: u32,
    indices: Vec<u32>,
}

impl SparseVector {
    /// Validates that `indices` is strictly increasing with every entry
    /// below `n`.
    pub fn from_indices(n: u32, indices: Vec<u32>) -> Result<Self> {
        for pair in indices.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::format("indices must be strictly increasing"));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::format(format!("index {last} out of range [0, {n})")));
            }
        }
        Ok(Self { n, indices })
    }

    /// Ambient length.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of set positions.
    pub fn weight(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Dense form. Every word is assembled by scanning all indices with
    /// masked compares, so secret indices do not steer memory accesses.
    pub fn densify(&self) -> RingElement {
        let mut words = vec![0u64; n_words(self.n)];
        for (w_idx, word) in words.iter_mut().enumerate() {
            for &idx in &self.indices {
                let in_word = ct::eq_mask_u32(idx >> 6, w_idx as u32);
                let bit = 1u64 << (idx & 63);
                *word |= bit & ct::mask_u64(in_word as u64);
            }
        }
        let mut e = RingElement { r: self.n, words };
        mask_last_word(&mut e.words, self.n);
        e
    }
}

/// `a` concatenated with itself (2r bits plus spare words): any cyclic
/// rotation of `a` is a contiguous r-bit window of this buffer, which the
/// masked barrel shifter in [`Doubled::extract`] slides over without
/// secret-dependent addressing.
pub(crate) struct Doubled {
    r: u32,
    words: Vec<u64>,
}

impl Doubled {
    pub(crate) fn new(a: &RingElement) -> Self {
        let n = a.words.len();
        let q = (a.r / 64) as usize;
        let s = a.r % 64;
        let mut words = vec![0u64; 2 * n + 2];
        words[..n].copy_from_slice(&a.words);
        for i in 0..n {
            words[q + i] ^= a.words[i] << s;
            words[q + i + 1] ^= (a.words[i] >> 1) >> (63 - s);
        }
        Self { r: a.r, words }
    }

    /// Returns `out` with `out[j] = a[(j + off) mod r]`; constant-time with
    /// respect to `off`.
    ///
    /// Stage one shifts whole words: one masked-select pass per bit of the
    /// word offset, each scanning the full buffer. Stage two shifts the
    /// remaining 0..63 bits with variable-distance word shifts.
    pub(crate) fn extract(&self, off: u32) -> RingElement {
        debug_assert!(off < self.r);
        let n = n_words(self.r);
        let len = self.words.len();
        let mut buf = self.words.clone();
        let q = (off >> 6) as usize;
        let s = off & 63;

        let mut stride = 1usize;
        let mut level = 0u32;
        while stride < n {
            let mask = ct::mask_u64(((q >> level) & 1) as u64);
            for i in 0..len {
                let src = if i + stride < len { buf[i + stride] } else { 0 };
                buf[i] = (src & mask) | (buf[i] & !mask);
            }
            stride <<= 1;
            level += 1;
        }

        let mut words = vec![0u64; n];
        for i in 0..n {
            words[i] = (buf[i] >> s) | ((buf[i + 1] << 1) << (63 - s));
        }
        mask_last_word(&mut words, self.r);
        RingElement { r: self.r, words }
    }
}

type TableCache = Mutex<HashMap<(u32, u32), Arc<Vec<u32>>>>;

static SQUARING_TABLES: OnceLock<TableCache> = OnceLock::new();

/// Gather table for the `k`-fold squaring permutation: entry `j` holds the
/// source coefficient index `j * 2^-k mod r`. Keyed by the public pair
/// `(r, k)`; the fill is idempotent so concurrent first use is safe.
fn squaring_table(r: u32, k: u32) -> Arc<Vec<u32>> {
    let cache = SQUARING_TABLES.get_or_init(Default::default);
    let mut guard = cache.lock().expect("squaring table cache poisoned");
    guard
        .entry((r, k))
        .or_insert_with(|| Arc::new(build_squaring_table(r, k)))
        .clone()
}

fn build_squaring_table(r: u32, k: u32) -> Vec<u32> {
    // inverse of 2^k modulo r is 2^(r-1-k) because ord_2(r) = r - 1
    debug_assert!(k >= 1 && k < r - 1);
    let mut inv = 1u64;
    let r64 = u64::from(r);
    for _ in 0..(r - 1 - k) {
        inv = (inv * 2) % r64;
    }
    let mut table = Vec::with_capacity(r as usize);
    let mut src = 0u64;
    for _ in 0..r {
        table.push(src as u32);
        src += inv;
        if src >= r64 {
            src -= r64;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{RngCore, SeedableRng};

    /// O(r^2) schoolbook oracle over coefficient pairs; the independent
    /// check for every multiplication path.
    pub(crate) fn oracle_mul(a: &RingElement, b: &RingElement) -> RingElement {
        assert_eq!(a.r(), b.r());
        let r = a.r();
        let mut acc = vec![false; r as usize];
        for i in 0..r {
            if !a.bit(i) {
                continue;
            }
            for j in 0..r {
                if b.bit(j) {
                    let t = ((i + j) % r) as usize;
                    acc[t] = !acc[t];
                }
            }
        }
        let support: Vec<u32> = (0..r).filter(|&i| acc[i as usize]).collect();
        RingElement::from_support(r, &support).unwrap()
    }

    /// Naive rotation: out[j] = a[(j + k) mod r].
    fn oracle_rotate(a: &RingElement, k: u32) -> RingElement {
        let r = a.r();
        let support: Vec<u32> = (0..r)
            .filter(|&j| a.bit((j + k) % r))
            .collect();
        RingElement::from_support(r, &support).unwrap()
    }

    fn rng(seed: u64) -> StdRng {
        StdRng::seed_from_u64(seed)
    }

    #[test]
    fn add_is_xor() {
        let a = RingElement::from_support(13, &[0, 1]).unwrap(); // 1 + x
        let b = RingElement::from_support(13, &[1, 2]).unwrap(); // x + x^2
        let c = a.add(&b).unwrap();
        assert_eq!(c, RingElement::from_support(13, &[0, 2]).unwrap());

        let mut rng = rng(1);
        let x = RingElement::random(13, &mut rng);
        assert!(x.add(&x).unwrap().is_zero());
        assert_eq!(x.add(&RingElement::zero(13)).unwrap(), x);
    }

    #[test]
    fn add_weight_parity() {
        let mut rng = rng(2);
        for _ in 0..50 {
            let a = RingElement::random(13, &mut rng);
            let b = RingElement::random(13, &mut rng);
            let c = a.add(&b).unwrap();
            assert_eq!(c.weight() % 2, (a.weight() + b.weight()) % 2);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = RingElement::zero(13);
        let b = RingElement::zero(17);
        assert!(matches!(
            a.add(&b),
            Err(Error::Dimension {
                expected: 13,
                got: 17
            })
        ));
        assert!(a.mul_dense(&b).is_err());
        let s = SparseVector::from_indices(17, vec![0]).unwrap();
        assert!(a.mul_sparse(&s).is_err());
    }

    #[test]
    fn mul_identity_and_monomials() {
        let mut rng = rng(3);
        for r in [13u32, 12_323] {
            let a = RingElement::random(r, &mut rng);
            assert_eq!(a.mul_dense(&RingElement::one(r)).unwrap(), a);
        }
        for (i, j) in [(0u32, 5u32), (7, 9), (12, 12), (1, 11)] {
            let x = RingElement::monomial(13, i);
            let y = RingElement::monomial(13, j);
            assert_eq!(
                x.mul_dense(&y).unwrap(),
                RingElement::monomial(13, (i + j) % 13)
            );
        }
    }

    #[test]
    fn mul_worked_example() {
        // (1 + x)(1 + x + x^3) = 1 + x^2 + x^3 + x^4 over r = 13
        let a = RingElement::from_support(13, &[0, 1]).unwrap();
        let b = RingElement::from_support(13, &[0, 1, 3]).unwrap();
        let expect = RingElement::from_support(13, &[0, 2, 3, 4]).unwrap();
        assert_eq!(a.mul_dense(&b).unwrap(), expect);
        assert_eq!(oracle_mul(&a, &b), expect);
    }

    #[test]
    fn mul_matches_schoolbook_oracle() {
        let mut rng = rng(4);
        for _ in 0..200 {
            let a = RingElement::random(13, &mut rng);
            let b = RingElement::random(13, &mut rng);
            assert_eq!(a.mul_dense(&b).unwrap(), oracle_mul(&a, &b));
        }
        // A couple of production-size cross-checks against the oracle.
        for _ in 0..2 {
            let a = RingElement::random(12_323, &mut rng);
            let b = RingElement::random(12_323, &mut rng);
            assert_eq!(a.mul_dense(&b).unwrap(), oracle_mul(&a, &b));
        }
    }

    #[test]
    fn mul_exhaustive_low_degree() {
        // Every pair of polynomials of degree at most 3 over r = 13.
        let low: Vec<RingElement> = (0u32..16)
            .map(|bits| {
                let support: Vec<u32> = (0..4).filter(|&i| (bits >> i) & 1 == 1).collect();
                RingElement::from_support(13, &support).unwrap()
            })
            .collect();
        for a in &low {
            for b in &low {
                assert_eq!(a.mul_dense(b).unwrap(), oracle_mul(a, b));
            }
        }
    }

    #[test]
    fn mul_sparse_matches_dense_route() {
        let mut rng = rng(5);
        for _ in 0..100 {
            let a = RingElement::random(13, &mut rng);
            let mut idx = vec![
                (rng.next_u32() % 13),
                (rng.next_u32() % 13),
                (rng.next_u32() % 13),
            ];
            idx.sort_unstable();
            idx.dedup();
            let b = SparseVector::from_indices(13, idx).unwrap();
            assert_eq!(
                a.mul_sparse(&b).unwrap(),
                a.mul_dense(&b.densify()).unwrap()
            );
        }
    }

    #[test]
    fn mul_sparse_identity_and_annihilator() {
        let mut rng = rng(6);
        let a = RingElement::random(12_323, &mut rng);
        let one = SparseVector::from_indices(12_323, vec![0]).unwrap();
        assert_eq!(a.mul_sparse(&one).unwrap(), a);
        let empty = SparseVector::from_indices(12_323, vec![]).unwrap();
        assert!(a.mul_sparse(&empty).unwrap().is_zero());
    }

    #[test]
    fn square_is_frobenius() {
        for i in 0..13 {
            let x = RingElement::monomial(13, i);
            assert_eq!(x.square(), RingElement::monomial(13, (2 * i) % 13));
        }
        let mut rng = rng(7);
        for r in [13u32, 12_323] {
            for _ in 0..10 {
                let a = RingElement::random(r, &mut rng);
                assert_eq!(a.square(), a.mul_dense(&a).unwrap());
                assert_eq!(a.square().weight(), a.weight());
            }
        }
    }

    #[test]
    fn multi_square_is_iterated_squaring() {
        let mut rng = rng(8);
        for r in [13u32, 12_323] {
            let a = RingElement::random(r, &mut rng);
            for k in [1u32, 2, 3, 7, 12] {
                let mut iterated = a.clone();
                for _ in 0..k {
                    iterated = iterated.square();
                }
                assert_eq!(a.multi_square(k), iterated, "r={r} k={k}");
            }
            // Full Frobenius orbit returns to the start.
            assert_eq!(a.multi_square(r - 1), a);
        }
    }

    #[test]
    fn invert_units() {
        assert_eq!(
            RingElement::one(13).invert().unwrap(),
            RingElement::one(13)
        );
        for i in 1..13 {
            let x = RingElement::monomial(13, i);
            assert_eq!(x.invert().unwrap(), RingElement::monomial(13, 13 - i));
        }
        let mut rng = rng(9);
        for _ in 0..20 {
            let mut a = RingElement::random(13, &mut rng);
            if a.weight().is_multiple_of(2) {
                let flip = RingElement::monomial(13, rng.next_u32() % 13);
                a = a.add(&flip).unwrap();
            }
            if a.weight() == 13 {
                continue;
            }
            let inv = a.invert().unwrap();
            assert_eq!(a.mul_dense(&inv).unwrap(), RingElement::one(13));
        }
    }

    #[test]
    fn invert_rejects_non_units() {
        assert_eq!(
            RingElement::zero(13).invert().unwrap_err(),
            Error::NonInvertible
        );
        let even = RingElement::from_support(13, &[1, 5]).unwrap();
        assert_eq!(even.invert().unwrap_err(), Error::NonInvertible);
        let all_ones: Vec<u32> = (0..13).collect();
        let ones = RingElement::from_support(13, &all_ones).unwrap();
        assert_eq!(ones.invert().unwrap_err(), Error::NonInvertible);
    }

    #[test]
    fn invert_production_size() {
        let mut rng = rng(10);
        for _ in 0..3 {
            let mut a = RingElement::random(12_323, &mut rng);
            if a.weight().is_multiple_of(2) {
                let flip = RingElement::monomial(12_323, rng.next_u32() % 12_323);
                a = a.add(&flip).unwrap();
            }
            let inv = a.invert().unwrap();
            assert_eq!(a.mul_dense(&inv).unwrap(), RingElement::one(12_323));
        }
    }

    #[test]
    fn weight_examples() {
        assert_eq!(RingElement::zero(13).weight(), 0);
        let all: Vec<u32> = (0..13).collect();
        assert_eq!(RingElement::from_support(13, &all).unwrap().weight(), 13);
        let s = SparseVector::from_indices(12_323, vec![5, 90, 7000]).unwrap();
        assert_eq!(s.densify().weight(), 3);
    }

    #[test]
    fn serialization_examples() {
        assert_eq!(RingElement::one(13).to_bytes(), vec![0x01, 0x00]);
        assert_eq!(RingElement::monomial(13, 12).to_bytes(), vec![0x00, 0x10]);
    }

    #[test]
    fn serialization_rejects_bad_input() {
        assert!(RingElement::from_bytes(&[0x01], 13).is_err());
        assert!(RingElement::from_bytes(&[0x01, 0x00, 0x00], 13).is_err());
        // Bit 13 set: padding must be zero.
        assert!(RingElement::from_bytes(&[0x00, 0x20], 13).is_err());
        assert!(RingElement::from_bytes(&[0x00, 0x10], 13).is_ok());
    }

    #[test]
    fn rotation_matches_naive() {
        let mut rng = rng(11);
        let a = RingElement::random(13, &mut rng);
        for k in 0..13 {
            assert_eq!(a.rotate(k), oracle_rotate(&a, k), "k={k}");
        }
        let b = RingElement::random(12_323, &mut rng);
        for k in [0u32, 1, 63, 64, 65, 6161, 12_322] {
            assert_eq!(b.rotate(k), oracle_rotate(&b, k), "k={k}");
        }
    }

    #[test]
    fn sparse_vector_validation() {
        assert!(SparseVector::from_indices(13, vec![1, 5, 9]).is_ok());
        assert!(SparseVector::from_indices(13, vec![5, 1]).is_err());
        assert!(SparseVector::from_indices(13, vec![1, 1]).is_err());
        assert!(SparseVector::from_indices(13, vec![13]).is_err());
    }

    #[test]
    fn ring_axioms_production_size() {
        let mut rng = rng(12);
        let a = RingElement::random(12_323, &mut rng);
        let b = RingElement::random(12_323, &mut rng);
        let c = RingElement::random(12_323, &mut rng);
        let ab = a.mul_dense(&b).unwrap();
        assert_eq!(ab, b.mul_dense(&a).unwrap());
        assert_eq!(
            ab.mul_dense(&c).unwrap(),
            a.mul_dense(&b.mul_dense(&c).unwrap()).unwrap()
        );
        let bc = b.add(&c).unwrap();
        assert_eq!(
            a.mul_dense(&bc).unwrap(),
            ab.add(&a.mul_dense(&c).unwrap()).unwrap()
        );
    }

    fn toy_element() -> impl Strategy<Value = RingElement> {
        proptest::collection::vec(any::<bool>(), 13).prop_map(|bits| {
            let support: Vec<u32> = (0..13u32).filter(|&i| bits[i as usize]).collect();
            RingElement::from_support(13, &support).unwrap()
        })
    }

    proptest! {
        #[test]
        fn prop_mul_matches_oracle(a in toy_element(), b in toy_element()) {
            prop_assert_eq!(a.mul_dense(&b).unwrap(), oracle_mul(&a, &b));
        }

        #[test]
        fn prop_ring_axioms(a in toy_element(), b in toy_element(), c in toy_element()) {
            let ab = a.mul_dense(&b).unwrap();
            prop_assert_eq!(&ab, &b.mul_dense(&a).unwrap());
            prop_assert_eq!(
                ab.mul_dense(&c).unwrap(),
                a.mul_dense(&b.mul_dense(&c).unwrap()).unwrap()
            );
            let sum = b.add(&c).unwrap();
            prop_assert_eq!(
                a.mul_dense(&sum).unwrap(),
                a.mul_dense(&b).unwrap().add(&a.mul_dense(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn prop_serialize_round_trip(a in toy_element()) {
            let bytes = a.to_bytes();
            prop_assert_eq!(RingElement::from_bytes(&bytes, 13).unwrap(), a);
        }

        #[test]
        fn prop_square_weight_preserved(a in toy_element()) {
            prop_assert_eq!(a.square().weight(), a.weight());
        }
    }
}
