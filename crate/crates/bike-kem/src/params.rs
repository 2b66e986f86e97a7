//! BIKE parameter sets.
//!
//! Three production sets cover NIST security levels 1, 3 and 5. A fourth toy
//! set (`r = 13`) exists only so that brute-force oracles stay tractable in
//! tests; it provides no security whatsoever.

use core::fmt;
use core::str::FromStr;

use crate::error::Error;

/// Security level tag, accepted on the CLI as `sl1`/`sl3`/`sl5`/`toy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Sl1,
    Sl3,
    Sl5,
    Toy,
}

impl Level {
    /// All levels, toy last.
    pub const ALL: [Level; 4] = [Level::Sl1, Level::Sl3, Level::Sl5, Level::Toy];

    /// One-byte tag used in serialized objects.
    pub fn tag(self) -> u8 {
        match self {
            Level::Sl1 => 1,
            Level::Sl3 => 3,
            Level::Sl5 => 5,
            Level::Toy => 0,
        }
    }

    /// Inverse of [`Level::tag`].
    pub fn from_tag(tag: u8) -> Result<Level, Error> {
        match tag {
            1 => Ok(Level::Sl1),
            3 => Ok(Level::Sl3),
            5 => Ok(Level::Sl5),
            0 => Ok(Level::Toy),
            other => Err(Error::format(format!("unknown level tag {other:#04x}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Level::Sl1 => "sl1",
            Level::Sl3 => "sl3",
            Level::Sl5 => "sl5",
            Level::Toy => "toy",
        };
        f.write_str(name)
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sl1" => Ok(Level::Sl1),
            "sl3" => Ok(Level::Sl3),
            "sl5" => Ok(Level::Sl5),
            "toy" => Ok(Level::Toy),
            other => Err(Error::parameter(format!(
                "unknown level {other:?} (expected sl1, sl3, sl5 or toy)"
            ))),
        }
    }
}

/// Scale shared by `threshold_a_num` and `threshold_b_num`: the affine
/// threshold coefficients are exact decimal rationals over 10^8, so the
/// flip threshold can be evaluated in integer arithmetic with no rounding
/// slop.
pub const THRESHOLD_DENOM: u64 = 100_000_000;

/// Constants for one BIKE instance.
///
/// `r` is prime with 2 a primitive root modulo `r`, so
/// `x^r - 1 = (x - 1) * (x^(r-1) + ... + 1)` with the second factor
/// irreducible and every odd-weight element other than the all-ones vector
/// is invertible in `F2[x]/(x^r - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParameterSet {
    pub level: Level,
    /// Block length: degree of the ring modulus `x^r - 1`.
    pub r: u32,
    /// Row weight of the parity-check matrix; `h0` and `h1` each have
    /// weight `w/2`.
    pub w: u32,
    /// Hamming weight of the error vector `e = (e0, e1)`.
    pub t: u32,
    /// Number of decoder iterations (fixed; no early exit).
    pub nb_iter: u32,
    /// Gray-mask threshold offset.
    pub tau: u32,
    /// Affine threshold coefficient `a`, scaled by [`THRESHOLD_DENOM`].
    pub threshold_a_num: u64,
    /// Affine threshold coefficient `b`, scaled by [`THRESHOLD_DENOM`].
    pub threshold_b_num: u64,
    /// Lower clamp of the flip threshold.
    pub threshold_floor: u32,
    /// Message and shared-secret length in bits.
    pub ell: u32,
}

impl ParameterSet {
    /// Weight of each private-key block, `w/2`.
    pub fn d(&self) -> u32 {
        self.w / 2
    }

    /// Bytes needed to serialize one ring element.
    pub fn r_bytes(&self) -> usize {
        (self.r as usize).div_ceil(8)
    }

    /// Bytes of the message / shared secret (`ell / 8`).
    pub fn ell_bytes(&self) -> usize {
        (self.ell as usize) / 8
    }

    /// Ciphertext object size: one ring element plus the masked message.
    pub fn ciphertext_bytes(&self) -> usize {
        self.r_bytes() + self.ell_bytes()
    }

    #[cfg(any(debug_assertions, test))]
    fn validate(&self) {
        assert!(self.w.is_multiple_of(2), "w must be even");
        assert!(self.d() < self.r, "w/2 must be below r");
        assert!(self.t < 2 * self.r, "t must be below 2r");
        assert!(
            self.threshold_floor >= (self.d() + 2) / 2,
            "threshold floor below ceil((w/2 + 1)/2)"
        );
        assert!(self.ell == 256, "message length is fixed at 256 bits");
    }
}

const SL1: ParameterSet = ParameterSet {
    level: Level::Sl1,
    r: 12_323,
    w: 142,
    t: 134,
    nb_iter: 5,
    tau: 3,
    threshold_a_num: 697_220,       // 0.0069722
    threshold_b_num: 1_353_000_000, // 13.530
    threshold_floor: 36,
    ell: 256,
};

const SL3: ParameterSet = ParameterSet {
    level: Level::Sl3,
    r: 24_659,
    w: 206,
    t: 199,
    nb_iter: 5,
    tau: 3,
    threshold_a_num: 526_500,       // 0.005265
    threshold_b_num: 1_525_880_000, // 15.2588
    threshold_floor: 52,
    ell: 256,
};

const SL5: ParameterSet = ParameterSet {
    level: Level::Sl5,
    r: 40_973,
    w: 274,
    t: 264,
    nb_iter: 5,
    tau: 3,
    threshold_a_num: 402_312,       // 0.00402312
    threshold_b_num: 1_787_850_000, // 17.8785
    threshold_floor: 69,
    ell: 256,
};

/// Test-only parameters. Weight-3 key blocks and weight-2 errors keep
/// exhaustive oracles cheap.
const TOY: ParameterSet = ParameterSet {
    level: Level::Toy,
    r: 13,
    w: 6,
    t: 2,
    nb_iter: 5,
    tau: 1,
    threshold_a_num: 0,
    threshold_b_num: 0,
    threshold_floor: 2,
    ell: 256,
};

/// Returns the fixed constants for a security level.
///
/// Total over the enum: every level has a table entry, so this cannot fail.
pub fn parameter_set(level: Level) -> &'static ParameterSet {
    let p = match level {
        Level::Sl1 => &SL1,
        Level::Sl3 => &SL3,
        Level::Sl5 => &SL5,
        Level::Toy => &TOY,
    };
    debug_assert_eq!(p.level, level);
    #[cfg(debug_assertions)]
    p.validate();
    p
}

/// Brute-force check that 2 generates the full multiplicative group mod `r`.
///
/// Enumerates `2^k mod r` for `0 < k < r-1` and requires none of them to hit
/// 1 early. Feasible for every shipped parameter set (`r <= 41k`).
pub fn two_is_primitive_root(r: u32) -> bool {
    if r < 3 {
        return false;
    }
    let r = u64::from(r);
    let mut acc: u64 = 2 % r;
    for _ in 1..(r - 1) {
        if acc == 1 {
            return false;
        }
        acc = (acc * 2) % r;
    }
    acc == 1
}
