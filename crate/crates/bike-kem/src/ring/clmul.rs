//! Word-level carry-less multiplication.
//!
//! The portable path computes 64x64 -> 128 bit products of binary
//! polynomials with masked integer multiplies only: no table lookups, no
//! branches, so execution time is independent of the operand bits. Splitting
//! each operand into four quarter-density shares keeps every column sum of
//! the integer multiply at 15 or less inside the low word, so carries never
//! reach the next occupied bit lane.
//!
//! A build with `--features hw-clmul` swaps in the PCLMULQDQ instruction on
//! x86-64; the trait is the seam where other wide-multiply backends can be
//! plugged in.

/// Backend for multiplying word-granularity binary polynomials.
///
/// `mul_acc` carry-less multiplies `a` by `b` and XORs the full product into
/// `out`, which must hold at least `a.len() + b.len()` words. Implementations
/// must run in time independent of the word values.
pub trait ClmulProvider {
    fn mul_acc(a: &[u64], b: &[u64], out: &mut [u64]);
}

/// Pure word-operation backend; works on any target.
pub struct Portable;

const M0: u64 = 0x1111_1111_1111_1111;
const M1: u64 = 0x2222_2222_2222_2222;
const M2: u64 = 0x4444_4444_4444_4444;
const M3: u64 = 0x8888_8888_8888_8888;

/// Low 64 bits of the carry-less product of `x` and `y`.
#[inline(always)]
fn bmul64(x: u64, y: u64) -> u64 {
    let x0 = x & M0;
    let x1 = x & M1;
    let x2 = x & M2;
    let x3 = x & M3;
    let y0 = y & M0;
    let y1 = y & M1;
    let y2 = y & M2;
    let y3 = y & M3;
    let z0 = x0.wrapping_mul(y0) ^ x1.wrapping_mul(y3) ^ x2.wrapping_mul(y2) ^ x3.wrapping_mul(y1);
    let z1 = x0.wrapping_mul(y1) ^ x1.wrapping_mul(y0) ^ x2.wrapping_mul(y3) ^ x3.wrapping_mul(y2);
    let z2 = x0.wrapping_mul(y2) ^ x1.wrapping_mul(y1) ^ x2.wrapping_mul(y0) ^ x3.wrapping_mul(y3);
    let z3 = x0.wrapping_mul(y3) ^ x1.wrapping_mul(y2) ^ x2.wrapping_mul(y1) ^ x3.wrapping_mul(y0);
    (z0 & M0) | (z1 & M1) | (z2 & M2) | (z3 & M3)
}

/// Full 128-bit carry-less product as `(lo, hi)`.
///
/// The high half reuses `bmul64` on bit-reversed operands: reversing both
/// inputs reverses the 127-bit product, so its low word holds the original
/// high bits.
#[cfg(test)]
#[inline(always)]
fn clmul64_portable(a: u64, b: u64) -> (u64, u64) {
    let lo = bmul64(a, b);
    let hi = bmul64(a.reverse_bits(), b.reverse_bits()).reverse_bits() >> 1;
    (lo, hi)
}

impl ClmulProvider for Portable {
    fn mul_acc(a: &[u64], b: &[u64], out: &mut [u64]) {
        debug_assert!(out.len() >= a.len() + b.len());
        // Hoist the bit reversals: the high-half trick needs reversed copies
        // of both operands and they are loop-invariant per word.
        let ra: Vec<u64> = a.iter().map(|w| w.reverse_bits()).collect();
        let rb: Vec<u64> = b.iter().map(|w| w.reverse_bits()).collect();
        for i in 0..a.len() {
            let ai = a[i];
            let rai = ra[i];
            for j in 0..b.len() {
                let lo = bmul64(ai, b[j]);
                let hi = bmul64(rai, rb[j]).reverse_bits() >> 1;
                out[i + j] ^= lo;
                out[i + j + 1] ^= hi;
            }
        }
    }
}

/// PCLMULQDQ backend. Requires a CPU with the carry-less multiply extension;
/// selected at compile time by the `hw-clmul` feature.
#[cfg(all(feature = "hw-clmul", target_arch = "x86_64"))]
pub struct HwClmul;

#[cfg(all(feature = "hw-clmul", target_arch = "x86_64"))]
impl ClmulProvider for HwClmul {
    fn mul_acc(a: &[u64], b: &[u64], out: &mut [u64]) {
        debug_assert!(out.len() >= a.len() + b.len());
        #[target_feature(enable = "pclmulqdq")]
        unsafe fn inner(a: &[u64], b: &[u64], out: &mut [u64]) {
            use core::arch::x86_64::*;
            for i in 0..a.len() {
                let va = _mm_set_epi64x(0, a[i] as i64);
                for j in 0..b.len() {
                    let vb = _mm_set_epi64x(0, b[j] as i64);
                    let prod = _mm_clmulepi64_si128::<0>(va, vb);
                    out[i + j] ^= _mm_cvtsi128_si64(prod) as u64;
                    out[i + j + 1] ^= _mm_extract_epi64::<1>(prod) as u64;
                }
            }
        }
        // The feature contract makes PCLMULQDQ availability a build-time
        // requirement; document it rather than runtime-dispatch, which would
        // add an indirect call to the hot loop.
        unsafe { inner(a, b, out) }
    }
}

#[cfg(all(feature = "hw-clmul", target_arch = "x86_64"))]
pub(crate) type ActiveClmul = HwClmul;

#[cfg(not(all(feature = "hw-clmul", target_arch = "x86_64")))]
pub(crate) type ActiveClmul = Portable;
