use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::float::FlexNum;

/// Exponent and explicit-mantissa widths of a binary floating-point format.
///
/// The implicit leading bit is not counted in `man_bits`, so precision is
/// `man_bits + 1`. Valid formats have `2 <= exp_bits <= 11`,
/// `1 <= man_bits <= 52` and a total width of at most 64 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FloatFormat {
    exp_bits: u8,
    man_bits: u8,
}

impl FloatFormat {
    pub const BINARY8: FloatFormat = FloatFormat::new_unchecked(5, 2);
    pub const BINARY16: FloatFormat = FloatFormat::new_unchecked(5, 10);
    pub const BINARY16ALT: FloatFormat = FloatFormat::new_unchecked(8, 7);
    pub const BINARY32: FloatFormat = FloatFormat::new_unchecked(8, 23);
    pub const BINARY64: FloatFormat = FloatFormat::new_unchecked(11, 52);

    const fn new_unchecked(exp_bits: u8, man_bits: u8) -> Self {
        FloatFormat { exp_bits, man_bits }
    }

    pub fn new(exp_bits: u32, man_bits: u32) -> Result<Self> {
        if !(2..=11).contains(&exp_bits) {
            return Err(Error::OutOfRange {
                what: "exponent bits",
                value: exp_bits as i64,
                allowed: "2..=11",
            });
        }
        if !(1..=52).contains(&man_bits) {
            return Err(Error::OutOfRange {
                what: "mantissa bits",
                value: man_bits as i64,
                allowed: "1..=52",
            });
        }
        if 1 + exp_bits + man_bits > 64 {
            return Err(Error::OutOfRange {
                what: "total width",
                value: (1 + exp_bits + man_bits) as i64,
                allowed: "<= 64",
            });
        }
        Ok(FloatFormat::new_unchecked(exp_bits as u8, man_bits as u8))
    }

    #[inline]
    pub fn exp_bits(self) -> u32 {
        self.exp_bits as u32
    }

    #[inline]
    pub fn man_bits(self) -> u32 {
        self.man_bits as u32
    }

    /// Significand precision including the implicit bit.
    #[inline]
    pub fn precision(self) -> u32 {
        self.man_bits() + 1
    }

    /// Storage width in bits: sign + exponent + mantissa.
    #[inline]
    pub fn width(self) -> u32 {
        1 + self.exp_bits() + self.man_bits()
    }

    #[inline]
    pub fn bias(self) -> i32 {
        (1 << (self.exp_bits - 1)) - 1
    }

    #[inline]
    pub fn emax(self) -> i32 {
        self.bias()
    }

    #[inline]
    pub fn emin(self) -> i32 {
        1 - self.bias()
    }

    #[inline]
    pub(crate) fn exp_field_max(self) -> u64 {
        (1u64 << self.exp_bits) - 1
    }

    #[inline]
    pub(crate) fn man_mask(self) -> u64 {
        (1u64 << self.man_bits) - 1
    }

    #[inline]
    pub(crate) fn sign_bit(self) -> u64 {
        1u64 << (self.exp_bits + self.man_bits)
    }

    #[inline]
    pub(crate) fn bits_mask(self) -> u64 {
        if self.width() == 64 {
            u64::MAX
        } else {
            (1u64 << self.width()) - 1
        }
    }

    pub fn zero(self, negative: bool) -> FlexNum {
        FlexNum::from_bits_unchecked(self, if negative { self.sign_bit() } else { 0 })
    }

    pub fn infinity(self, negative: bool) -> FlexNum {
        let bits = self.exp_field_max() << self.man_bits;
        FlexNum::from_bits_unchecked(self, bits | if negative { self.sign_bit() } else { 0 })
    }

    /// The canonical quiet NaN: sign 0, exponent all ones, top mantissa bit set.
    pub fn nan(self) -> FlexNum {
        let bits = (self.exp_field_max() << self.man_bits) | (1u64 << (self.man_bits - 1));
        FlexNum::from_bits_unchecked(self, bits)
    }

    /// Largest finite value, `(2 - 2^-m) * 2^emax`.
    pub fn max_finite(self) -> FlexNum {
        let bits = ((self.exp_field_max() - 1) << self.man_bits) | self.man_mask();
        FlexNum::from_bits_unchecked(self, bits)
    }

    /// Most negative finite value (the negation of [`max_finite`](Self::max_finite)).
    pub fn min_finite(self) -> FlexNum {
        let max = self.max_finite();
        FlexNum::from_bits_unchecked(self, max.bits() | self.sign_bit())
    }

    /// Smallest positive denormal, `2^(emin - m)`.
    pub fn min_positive(self) -> FlexNum {
        FlexNum::from_bits_unchecked(self, 1)
    }

    /// Smallest positive normal, `2^emin`.
    pub fn min_normal(self) -> FlexNum {
        FlexNum::from_bits_unchecked(self, 1u64 << self.man_bits)
    }

    /// Spacing between adjacent representable values at the magnitude of `x`.
    ///
    /// Magnitudes in the denormal range share the denormal spacing; magnitudes
    /// at or above the top binade report the top binade's spacing. Non-finite
    /// inputs return NaN.
    pub fn ulp(self, x: f64) -> f64 {
        if !x.is_finite() {
            return f64::NAN;
        }
        let lead = if x == 0.0 {
            self.emin()
        } else {
            let b = x.abs().to_bits();
            let e = ((b >> 52) & 0x7ff) as i32;
            let e = if e == 0 {
                // f64 denormal: leading bit position of the mantissa
                -1074 + (63 - (b & ((1 << 52) - 1)).leading_zeros() as i32)
            } else {
                e - 1023
            };
            e.clamp(self.emin(), self.emax())
        };
        exp2i(lead - self.man_bits() as i32)
    }

    /// Whether every finite value of `self` is exactly representable in `other`.
    pub fn embeds_in(self, other: FloatFormat) -> bool {
        let lowest = |f: FloatFormat| f.emin() - f.man_bits() as i32;
        self.emax() <= other.emax()
            && lowest(self) >= lowest(other)
            && self.man_bits <= other.man_bits
    }
}

/// `2^k` as an `f64`, exact for `-1074 <= k <= 1023`.
pub(crate) fn exp2i(k: i32) -> f64 {
    debug_assert!((-1074..=1023).contains(&k));
    if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (k + 1074))
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}m{}", self.exp_bits, self.man_bits)
    }
}

impl FromStr for FloatFormat {
    type Err = Error;

    /// Accepts `e<exp>m<man>` (e.g. `e5m2`) or one of the named formats.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary8" => return Ok(Self::BINARY8),
            "binary16" => return Ok(Self::BINARY16),
            "binary16alt" => return Ok(Self::BINARY16ALT),
            "binary32" => return Ok(Self::BINARY32),
            "binary64" => return Ok(Self::BINARY64),
            _ => {}
        }
        let bad = || Error::parse(0, format!("bad format `{s}`, expected e.g. `e5m2`"));
        let rest = s.strip_prefix('e').ok_or_else(bad)?;
        let (e, m) = rest.split_once('m').ok_or_else(bad)?;
        let e = e.parse().map_err(|_| bad())?;
        let m = m.parse().map_err(|_| bad())?;
        FloatFormat::new(e, m)
    }
}
