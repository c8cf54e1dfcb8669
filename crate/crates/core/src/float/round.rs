use crate::float::{FlexNum, FloatFormat};

/// Finite operand split into `(-1)^neg * sig * 2^exp` with an integer `sig`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Unpacked {
    Nan,
    Inf(bool),
    Zero(bool),
    Finite { neg: bool, sig: u64, exp: i32 },
}

pub(crate) fn unpack(a: FlexNum) -> Unpacked {
    let f = a.format();
    let bits = a.bits();
    let neg = bits & f.sign_bit() != 0;
    let field = (bits >> f.man_bits()) & f.exp_field_max();
    let man = bits & f.man_mask();
    if field == f.exp_field_max() {
        return if man == 0 { Unpacked::Inf(neg) } else { Unpacked::Nan };
    }
    if field == 0 {
        if man == 0 {
            return Unpacked::Zero(neg);
        }
        return Unpacked::Finite {
            neg,
            sig: man,
            exp: f.emin() - f.man_bits() as i32,
        };
    }
    Unpacked::Finite {
        neg,
        sig: man | (1u64 << f.man_bits()),
        exp: field as i32 - f.bias() - f.man_bits() as i32,
    }
}

/// Round `(-1)^neg * sig * 2^exp` into `f`, nearest-even.
///
/// Inexact callers must fold any discarded low-order information into the
/// least significant bit of `sig` (round-to-odd jamming) and leave at least
/// two bits below the target precision, so a single rounding here is exact.
pub(crate) fn round_pack(f: FloatFormat, neg: bool, sig: u128, exp: i32) -> FlexNum {
    if sig == 0 {
        return f.zero(neg);
    }
    let m = f.man_bits() as i32;
    let p = m + 1;
    let len = 128 - sig.leading_zeros() as i32;
    let quantum_min = f.emin() - m;
    let shift = (len - p).max(quantum_min - exp);

    let (mut r, mut q) = if shift <= 0 {
        (sig << (-shift) as u32, exp + shift)
    } else {
        let (kept, rem, half) = if shift >= 128 {
            (0u128, sig, None)
        } else {
            let s = shift as u32;
            (sig >> s, sig & ((1u128 << s) - 1), Some(1u128 << (s - 1)))
        };
        let up = match half {
            // remainder is below 2^127, hence below half a quantum of 2^128+
            None => false,
            Some(h) => rem > h || (rem == h && kept & 1 == 1),
        };
        (kept + up as u128, exp + shift)
    };

    if r == 1u128 << p {
        r >>= 1;
        q += 1;
    }
    if r == 0 {
        return f.zero(neg);
    }
    let sign = if neg { f.sign_bit() } else { 0 };
    if r < 1u128 << m {
        debug_assert_eq!(q, quantum_min);
        return FlexNum::from_bits_unchecked(f, sign | r as u64);
    }
    let field = q + m + f.bias();
    if field as i64 >= f.exp_field_max() as i64 {
        return f.infinity(neg);
    }
    let man = (r as u64) & f.man_mask();
    FlexNum::from_bits_unchecked(f, sign | ((field as u64) << f.man_bits()) | man)
}

/// Jam a nonzero discarded remainder into a fresh low bit.
#[inline]
pub(crate) fn jam(sig: u128, inexact: bool) -> u128 {
    (sig << 1) | inexact as u128
}
