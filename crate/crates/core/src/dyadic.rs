//! Exact amounts of the form `m · 2^k`.
//!
//! Every finite `f64` is dyadic, so conversion from floats is lossless and
//! halving or doubling an amount never rounds.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A dyadic rational `mantissa · 2^exponent` in canonical form: the mantissa
/// is odd, or the value is zero with exponent 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: i64,
    exponent: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        mantissa: 0,
        exponent: 0,
    };

    pub fn new(mantissa: i64, exponent: i32) -> Self {
        if mantissa == 0 {
            return Self::ZERO;
        }
        let shift = mantissa.trailing_zeros();
        Dyadic {
            mantissa: mantissa >> shift,
            exponent: exponent + shift as i32,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(n, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i32) -> Self {
        Dyadic {
            mantissa: 1,
            exponent: k,
        }
    }

    pub fn mantissa(&self) -> i64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa > 0
    }

    /// `Some(k)` when the value is exactly `2^k`.
    pub fn log2_exact(&self) -> Option<i32> {
        (self.mantissa == 1).then_some(self.exponent)
    }

    pub fn half(&self) -> Self {
        self.scale_pow2(-1)
    }

    pub fn double(&self) -> Self {
        self.scale_pow2(1)
    }

    pub fn scale_pow2(&self, k: i32) -> Self {
        if self.is_zero() {
            return *self;
        }
        Dyadic {
            mantissa: self.mantissa,
            exponent: self.exponent + k,
        }
    }

    /// Exact conversion; `None` for NaN and infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::ZERO);
        }
        let bits = x.to_bits();
        let sign: i64 = if bits >> 63 == 0 { 1 } else { -1 };
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let fraction = (bits & ((1u64 << 52) - 1)) as i64;
        let (mantissa, exponent) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1i64 << 52), biased - 1075)
        };
        Some(Self::new(sign * mantissa, exponent))
    }

    /// Nearest `f64`; exact whenever the exponent is in range.
    pub fn to_f64(&self) -> f64 {
        let m = self.mantissa as f64;
        // powi overflows for exponents beyond ±1023 even when the product is
        // representable, so split the scaling in two
        let half = self.exponent / 2;
        m * 2f64.powi(half) * 2f64.powi(self.exponent - half)
    }

    pub fn to_ratio(&self) -> BigRational {
        let m = BigInt::from(self.mantissa);
        let p = BigInt::one() << self.exponent.unsigned_abs();
        if self.exponent >= 0 {
            BigRational::from_integer(m * p)
        } else {
            BigRational::new(m, p)
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (a, b) = (self.mantissa.signum(), other.mantissa.signum());
        if a != b || a.is_zero() {
            return a.cmp(&b);
        }
        self.to_ratio().cmp(&other.to_ratio())
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 && self.exponent < 53 {
            write!(f, "{}", self.to_f64())
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}
