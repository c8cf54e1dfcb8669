use crate::error::{Error, Result};
use crate::float::round::{round_pack, unpack, Unpacked};
use crate::float::{FlexNum, FloatFormat};

impl FlexNum {
    /// Convert to another format, rounding to nearest even when narrowing.
    pub fn cast(self, target: FloatFormat) -> FlexNum {
        if target == self.format() {
            return self;
        }
        match unpack(self) {
            Unpacked::Nan => target.nan(),
            Unpacked::Inf(n) => target.infinity(n),
            Unpacked::Zero(n) => target.zero(n),
            Unpacked::Finite { neg, sig, exp } => round_pack(target, neg, sig as u128, exp),
        }
    }

    pub fn from_i64(target: FloatFormat, i: i64) -> FlexNum {
        round_pack(target, i < 0, i.unsigned_abs() as u128, 0)
    }

    pub fn from_u64(target: FloatFormat, i: u64) -> FlexNum {
        round_pack(target, false, i as u128, 0)
    }

    /// Truncate toward zero into a `width`-bit integer, saturating at its bounds.
    ///
    /// The result is returned as `i128` so both signed and unsigned 64-bit
    /// ranges fit. NaN and infinities are rejected.
    pub fn to_int(self, width: u32, signed: bool) -> Result<i128> {
        if !(1..=64).contains(&width) {
            return Err(Error::OutOfRange {
                what: "integer width",
                value: width as i64,
                allowed: "1..=64",
            });
        }
        let (lo, hi) = if signed {
            (-(1i128 << (width - 1)), (1i128 << (width - 1)) - 1)
        } else {
            (0, (1i128 << width) - 1)
        };
        let (neg, mag) = match unpack(self) {
            Unpacked::Nan | Unpacked::Inf(_) => {
                return Err(Error::InvalidConversion(format!("{self:?}")))
            }
            Unpacked::Zero(_) => return Ok(0),
            Unpacked::Finite { neg, sig, exp } => {
                let mag: u128 = if exp >= 0 {
                    // anything at or past 2^65 saturates every supported width
                    if exp + (64 - sig.leading_zeros() as i32) > 65 {
                        u128::MAX >> 1
                    } else {
                        (sig as u128) << exp
                    }
                } else if -exp >= 64 {
                    0
                } else {
                    (sig >> (-exp)) as u128
                };
                (neg, mag)
            }
        };
        let mag = mag.min(1u128 << 66) as i128;
        let v = if neg { -mag } else { mag };
        Ok(v.clamp(lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::FpClass;

    const B8: FloatFormat = FloatFormat::BINARY8;
    const B16: FloatFormat = FloatFormat::BINARY16;

    #[test]
    fn int_to_float() {
        assert_eq!(FlexNum::from_i64(B8, 1).to_f64(), 1.0);
        assert_eq!(FlexNum::from_i64(B8, -6).to_f64(), -6.0);
        // 5 is a tie between 4 and 6 in binary8 (spacing 1 at [4,8)): even is 4
        assert_eq!(FlexNum::from_i64(B8, 5).to_f64(), 5.0);
        assert_eq!(FlexNum::from_i64(B8, 9).to_f64(), 8.0);
        assert_eq!(FlexNum::from_i64(B8, 11).to_f64(), 12.0);
        assert_eq!(FlexNum::from_i64(B8, 100_000).classify(), FpClass::PosInf);
        assert_eq!(FlexNum::from_u64(FloatFormat::BINARY64, u64::MAX).to_f64(), 18446744073709551616.0);
        assert_eq!(FlexNum::from_i64(B8, 0).classify(), FpClass::PosZero);
    }

    #[test]
    fn float_to_int() {
        assert_eq!(FlexNum::from_f64(B8, 1.75).to_int(32, true).unwrap(), 1);
        assert_eq!(FlexNum::from_f64(B8, -1.75).to_int(32, true).unwrap(), -1);
        assert_eq!(FlexNum::from_f64(B8, -1.75).to_int(32, false).unwrap(), 0);
        assert_eq!(FlexNum::from_f64(B8, 0.25).to_int(8, true).unwrap(), 0);
        assert_eq!(FlexNum::from_f64(B8, 57344.0).to_int(8, true).unwrap(), 127);
        assert_eq!(FlexNum::from_f64(B8, -57344.0).to_int(8, true).unwrap(), -128);
        assert_eq!(FlexNum::from_f64(B8, 57344.0).to_int(16, false).unwrap(), 57344);
        let big = FlexNum::from_f64(FloatFormat::BINARY64, 1e300);
        assert_eq!(big.to_int(64, false).unwrap(), u64::MAX as i128);
        assert_eq!(big.neg().to_int(64, true).unwrap(), i64::MIN as i128);
        assert!(B8.nan().to_int(32, true).is_err());
        assert!(B8.infinity(false).to_int(32, true).is_err());
        assert!(FlexNum::from_f64(B8, 1.0).to_int(0, true).is_err());
    }

    #[test]
    fn narrowing_casts() {
        let x = FlexNum::from_f64(FloatFormat::BINARY32, 100000.0);
        assert_eq!(x.cast(B16).classify(), FpClass::PosInf);
        let y = FlexNum::from_f64(FloatFormat::BINARY32, 2f64.powi(100));
        assert_eq!(y.cast(FloatFormat::BINARY16ALT).to_f64(), 2f64.powi(100));
        assert_eq!(FlexNum::from_f64(B16, 1.125).cast(B8).to_f64(), 1.0);
        assert_eq!(B16.nan().cast(B8), B8.nan());
        assert_eq!(B16.zero(true).cast(B8), B8.zero(true));
    }
}
