use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::float::round::{round_pack, unpack, Unpacked};
use crate::float::FloatFormat;

/// IEEE value class of a [`FlexNum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpClass {
    PosZero,
    NegZero,
    Denormal,
    Normal,
    PosInf,
    NegInf,
    NaN,
}

/// A value in some [`FloatFormat`], stored as its bit pattern
/// (sign | exponent | mantissa, most significant first).
///
/// Equality is bitwise. Use [`compare`](Self::compare) for IEEE ordering.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlexNum {
    format: FloatFormat,
    bits: u64,
}

impl FlexNum {
    pub(crate) fn from_bits_unchecked(format: FloatFormat, bits: u64) -> Self {
        debug_assert_eq!(bits & !format.bits_mask(), 0);
        FlexNum { format, bits }
    }

    /// Wrap a raw pattern. NaN payloads are canonicalized.
    pub fn from_bits(format: FloatFormat, bits: u64) -> Result<Self> {
        if bits & !format.bits_mask() != 0 {
            return Err(Error::OutOfRange {
                what: "bit pattern",
                value: bits as i64,
                allowed: "fits the format width",
            });
        }
        let v = FlexNum::from_bits_unchecked(format, bits);
        Ok(if v.is_nan() { format.nan() } else { v })
    }

    /// Round an exact `f64` value into `format` (nearest, ties to even).
    pub fn from_f64(format: FloatFormat, x: f64) -> Self {
        if x.is_nan() {
            return format.nan();
        }
        if x.is_infinite() {
            return format.infinity(x < 0.0);
        }
        let b = x.to_bits();
        let neg = b >> 63 != 0;
        let field = ((b >> 52) & 0x7ff) as i32;
        let man = b & ((1u64 << 52) - 1);
        let (sig, exp) = if field == 0 {
            (man, -1074)
        } else {
            (man | (1u64 << 52), field - 1075)
        };
        round_pack(format, neg, sig as u128, exp)
    }

    /// Exact value as an `f64`. Lossless: every supported format embeds in binary64.
    pub fn to_f64(self) -> f64 {
        match unpack(self) {
            Unpacked::Nan => f64::NAN,
            Unpacked::Inf(n) => {
                if n {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            Unpacked::Zero(n) => {
                if n {
                    -0.0
                } else {
                    0.0
                }
            }
            Unpacked::Finite { neg, sig, exp } => {
                let v = sig as f64 * super::format::exp2i(exp);
                // exp >= -1074 and the value embeds in binary64, so this is exact
                if neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    #[inline]
    pub fn format(self) -> FloatFormat {
        self.format
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn sign(self) -> bool {
        self.bits & self.format.sign_bit() != 0
    }

    pub fn exponent_field(self) -> u64 {
        (self.bits >> self.format.man_bits()) & self.format.exp_field_max()
    }

    pub fn mantissa_field(self) -> u64 {
        self.bits & self.format.man_mask()
    }

    pub fn classify(self) -> FpClass {
        match unpack(self) {
            Unpacked::Nan => FpClass::NaN,
            Unpacked::Inf(false) => FpClass::PosInf,
            Unpacked::Inf(true) => FpClass::NegInf,
            Unpacked::Zero(false) => FpClass::PosZero,
            Unpacked::Zero(true) => FpClass::NegZero,
            Unpacked::Finite { .. } if self.exponent_field() == 0 => FpClass::Denormal,
            Unpacked::Finite { .. } => FpClass::Normal,
        }
    }

    pub fn is_nan(self) -> bool {
        self.exponent_field() == self.format.exp_field_max() && self.mantissa_field() != 0
    }

    pub fn is_infinite(self) -> bool {
        self.exponent_field() == self.format.exp_field_max() && self.mantissa_field() == 0
    }

    pub fn is_finite(self) -> bool {
        self.exponent_field() != self.format.exp_field_max()
    }

    pub fn is_zero(self) -> bool {
        self.bits & !self.format.sign_bit() == 0
    }

    /// Sign flip; NaN stays canonical.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        if self.is_nan() {
            return self;
        }
        FlexNum::from_bits_unchecked(self.format, self.bits ^ self.format.sign_bit())
    }

    pub fn abs(self) -> Self {
        if self.is_nan() {
            return self;
        }
        FlexNum::from_bits_unchecked(self.format, self.bits & !self.format.sign_bit())
    }

    /// Spacing to the adjacent representable value at this magnitude.
    pub fn ulp(self) -> f64 {
        self.format.ulp(self.to_f64())
    }

    /// IEEE comparison: `-0 == +0`, anything involving NaN is unordered (`None`).
    pub fn compare(self, other: FlexNum) -> Result<Option<Ordering>> {
        self.check_same(other)?;
        // decoding is exact, so f64 ordering is the value ordering
        Ok(self.to_f64().partial_cmp(&other.to_f64()))
    }

    pub(crate) fn check_same(self, other: FlexNum) -> Result<()> {
        if self.format != other.format {
            return Err(Error::FormatMismatch {
                left: self.format,
                right: other.format,
            });
        }
        Ok(())
    }

    /// Field-separated binary rendering, e.g. `0|01111|00`.
    pub fn to_bit_string(self) -> String {
        let f = self.format;
        format!(
            "{}|{:0ew$b}|{:0mw$b}",
            self.sign() as u8,
            self.exponent_field(),
            self.mantissa_field(),
            ew = f.exp_bits() as usize,
            mw = f.man_bits() as usize,
        )
    }
}

impl std::ops::Neg for FlexNum {
    type Output = FlexNum;
    fn neg(self) -> FlexNum {
        FlexNum::neg(self)
    }
}

impl fmt::Debug for FlexNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlexNum({} {} = {:?})", self.format, self.to_bit_string(), self.to_f64())
    }
}

impl fmt::Display for FlexNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.to_f64(), f)
    }
}
