//! Branch-free building blocks for handling secret data.
//!
//! Masks are all-ones or all-zero words derived from secret conditions;
//! callers combine them with AND/OR/XOR instead of branching. Comparisons
//! assume operands below 2^31, which holds for every index and counter in
//! this crate (indices are below 2r < 2^17).

#[inline(always)]
pub(crate) fn mask_u64(bit: u64) -> u64 {
    0u64.wrapping_sub(bit & 1)
}

#[inline(always)]
pub(crate) fn mask_u32(bit: u32) -> u32 {
    0u32.wrapping_sub(bit & 1)
}

#[inline(always)]
pub(crate) fn mask_u8(bit: u8) -> u8 {
    0u8.wrapping_sub(bit & 1)
}

/// 1 when `v != 0`, else 0.
#[inline(always)]
fn nonzero_bit_u32(v: u32) -> u32 {
    (v | v.wrapping_neg()) >> 31
}

/// All-ones when `a == b`.
#[inline(always)]
pub(crate) fn eq_mask_u32(a: u32, b: u32) -> u32 {
    mask_u32(nonzero_bit_u32(a ^ b) ^ 1)
}

/// All-ones when `a < b`. Both operands must be below 2^31.
#[inline(always)]
pub(crate) fn lt_mask_u32(a: u32, b: u32) -> u32 {
    debug_assert!(a < (1 << 31) && b < (1 << 31));
    mask_u32(a.wrapping_sub(b) >> 31)
}

/// All-ones when the two word slices are bitwise equal.
pub(crate) fn eq_mask_words(a: &[u64], b: &[u64]) -> u64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc |= x ^ y;
    }
    let nz = (acc | acc.wrapping_neg()) >> 63;
    mask_u64(nz ^ 1)
}

/// Writes `x` where `mask` is all-ones, `y` where it is zero.
pub(crate) fn select_bytes(mask: u8, x: &[u8], y: &[u8], out: &mut [u8]) {
    debug_assert!(x.len() == y.len() && y.len() == out.len());
    for i in 0..out.len() {
        out[i] = (x[i] & mask) | (y[i] & !mask);
    }
}

#[inline(always)]
fn compare_swap(v: &mut [u32], i: usize, j: usize) {
    let (a, b) = (v[i], v[j]);
    let swap = lt_mask_u32(b, a);
    v[i] = (b & swap) | (a & !swap);
    v[j] = (a & swap) | (b & !swap);
}

/// Sorts secret values with Batcher's odd-even merge network.
///
/// The compare-swap schedule depends only on the slice length, so memory
/// accesses and instruction flow are independent of the values being sorted.
pub(crate) fn sort_u32(v: &mut [u32]) {
    let n = v.len();
    if n < 2 {
        return;
    }
    let mut p = 1usize;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < n {
                let span = k.min(n - j - k);
                for i in 0..span {
                    // Only exchange within one merge block of width 2p.
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        compare_swap(v, i + j, i + j + k);
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
}
