//! Exact-rational reference for small binary floating-point formats.
//!
//! Every finite value of a format is decoded to a `BigRational`; rounding is
//! done by locating the exact result between two neighbours in a sorted table
//! of all representable magnitudes and comparing against their midpoint. No
//! bit tricks, no shared code with the implementation under test.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `(exponent bits, mantissa bits)` of an IEEE-style binary format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fmt {
    pub e: u32,
    pub m: u32,
}

pub const B8: Fmt = Fmt { e: 5, m: 2 };
pub const B16: Fmt = Fmt { e: 5, m: 10 };
pub const B16ALT: Fmt = Fmt { e: 8, m: 7 };
pub const B32: Fmt = Fmt { e: 8, m: 23 };

impl Fmt {
    pub fn width(self) -> u32 {
        1 + self.e + self.m
    }
    fn bias(self) -> i64 {
        (1i64 << (self.e - 1)) - 1
    }
    fn exp_all_ones(self) -> u64 {
        (1u64 << self.e) - 1
    }
    pub fn sign_bit(self) -> u64 {
        1u64 << (self.e + self.m)
    }
    pub fn inf_bits(self, neg: bool) -> u64 {
        (self.exp_all_ones() << self.m) | if neg { self.sign_bit() } else { 0 }
    }
    pub fn nan_bits(self) -> u64 {
        (self.exp_all_ones() << self.m) | (1u64 << (self.m - 1))
    }
    pub fn zero_bits(self, neg: bool) -> u64 {
        if neg {
            self.sign_bit()
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Nan,
    Inf(bool),
    /// Signed zero or nonzero finite value; the flag is the sign bit.
    Fin(bool, BigRational),
}

fn pow2(k: i64) -> BigRational {
    let one = BigInt::one();
    if k >= 0 {
        BigRational::from_integer(one << (k as usize))
    } else {
        BigRational::new(one.clone(), one << ((-k) as usize))
    }
}

pub fn decode(f: Fmt, bits: u64) -> Val {
    let neg = bits & f.sign_bit() != 0;
    let exp = (bits >> f.m) & f.exp_all_ones();
    let man = bits & ((1u64 << f.m) - 1);
    if exp == f.exp_all_ones() {
        return if man == 0 { Val::Inf(neg) } else { Val::Nan };
    }
    let (sig, e) = if exp == 0 {
        (man, 1 - f.bias() - f.m as i64)
    } else {
        (man | (1u64 << f.m), exp as i64 - f.bias() - f.m as i64)
    };
    let mag = BigRational::from_integer(BigInt::from(sig)) * pow2(e);
    Val::Fin(neg, if neg { -mag } else { mag })
}

/// Every non-negative finite magnitude in ascending order, followed by the
/// first magnitude past the top binade, which stands in for +inf.
pub struct Table {
    fmt: Fmt,
    values: Vec<BigRational>,
}

impl Table {
    fn build(f: Fmt) -> Table {
        let inf = f.inf_bits(false);
        let mut values: Vec<BigRational> = (0..inf)
            .map(|b| match decode(f, b) {
                Val::Fin(_, v) => v,
                _ => unreachable!(),
            })
            .collect();
        values.push(pow2(f.bias() + 1));
        Table { fmt: f, values }
    }

    /// Bit pattern at index `i` (index == bits for the positive half).
    fn bits(&self, i: usize) -> u64 {
        i as u64
    }

    /// Round a non-negative magnitude to nearest, ties to even.
    fn round_mag(&self, x: &BigRational) -> u64 {
        let top = self.values.len() - 1;
        if x >= &self.values[top] {
            return self.bits(top);
        }
        // largest index with values[i] <= x
        let lo = self.values.partition_point(|v| v <= x) - 1;
        if &self.values[lo] == x {
            return self.bits(lo);
        }
        let hi = lo + 1;
        let mid = (&self.values[lo] + &self.values[hi]) / BigRational::from_integer(2.into());
        match x.cmp(&mid) {
            Ordering::Less => self.bits(lo),
            Ordering::Greater => self.bits(hi),
            Ordering::Equal => {
                if self.bits(lo) & 1 == 0 {
                    self.bits(lo)
                } else {
                    self.bits(hi)
                }
            }
        }
    }

    fn sqrt_mag(&self, x: &BigRational) -> u64 {
        let sq = |v: &BigRational| v * v;
        let top = self.values.len() - 1;
        if x >= &sq(&self.values[top]) {
            return self.bits(top);
        }
        let lo = self.values.partition_point(|v| &sq(v) <= x) - 1;
        if &sq(&self.values[lo]) == x {
            return self.bits(lo);
        }
        let hi = lo + 1;
        let mid = (&self.values[lo] + &self.values[hi]) / BigRational::from_integer(2.into());
        match x.cmp(&sq(&mid)) {
            Ordering::Less => self.bits(lo),
            Ordering::Greater => self.bits(hi),
            Ordering::Equal => {
                if self.bits(lo) & 1 == 0 {
                    self.bits(lo)
                } else {
                    self.bits(hi)
                }
            }
        }
    }
}

/// Cached table for a format. Only practical for widths up to ~20 bits.
pub fn table(f: Fmt) -> Arc<Table> {
    static CACHE: OnceLock<Mutex<HashMap<Fmt, Arc<Table>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&f) {
        return t.clone();
    }
    let t = Arc::new(Table::build(f));
    cache.lock().unwrap().insert(f, t.clone());
    t
}

/// Round an exact value into `f`. A zero result keeps `zero_neg` as its sign.
pub fn round(f: Fmt, x: &BigRational, zero_neg: bool) -> u64 {
    let t = table(f);
    debug_assert_eq!(t.fmt, f);
    if x.is_zero() {
        return f.zero_bits(zero_neg);
    }
    let neg = x.is_negative();
    let bits = t.round_mag(&x.abs());
    if neg {
        bits | f.sign_bit()
    } else {
        bits
    }
}

pub fn encode_val(f: Fmt, v: &Val) -> u64 {
    match v {
        Val::Nan => f.nan_bits(),
        Val::Inf(n) => f.inf_bits(*n),
        Val::Fin(n, x) => round(f, x, *n),
    }
}

pub fn add(f: Fmt, a: u64, b: u64) -> u64 {
    match (decode(f, a), decode(f, b)) {
        (Val::Nan, _) | (_, Val::Nan) => f.nan_bits(),
        (Val::Inf(x), Val::Inf(y)) => {
            if x == y {
                f.inf_bits(x)
            } else {
                f.nan_bits()
            }
        }
        (Val::Inf(x), _) | (_, Val::Inf(x)) => f.inf_bits(x),
        (Val::Fin(sa, x), Val::Fin(sb, y)) => {
            let s = &x + &y;
            // exact zero sum is +0 except (-0) + (-0)
            let zneg = x.is_zero() && y.is_zero() && sa && sb;
            round(f, &s, zneg)
        }
    }
}

pub fn sub(f: Fmt, a: u64, b: u64) -> u64 {
    let nb = match decode(f, b) {
        Val::Nan => return f.nan_bits(),
        _ => b ^ f.sign_bit(),
    };
    add(f, a, nb)
}

pub fn mul(f: Fmt, a: u64, b: u64) -> u64 {
    match (decode(f, a), decode(f, b)) {
        (Val::Nan, _) | (_, Val::Nan) => f.nan_bits(),
        (Val::Inf(x), Val::Inf(y)) => f.inf_bits(x != y),
        (Val::Inf(x), Val::Fin(s, v)) | (Val::Fin(s, v), Val::Inf(x)) => {
            if v.is_zero() {
                f.nan_bits()
            } else {
                f.inf_bits(x != s)
            }
        }
        (Val::Fin(sa, x), Val::Fin(sb, y)) => round(f, &(x * y), sa != sb),
    }
}

pub fn div(f: Fmt, a: u64, b: u64) -> u64 {
    match (decode(f, a), decode(f, b)) {
        (Val::Nan, _) | (_, Val::Nan) => f.nan_bits(),
        (Val::Inf(_), Val::Inf(_)) => f.nan_bits(),
        (Val::Inf(x), Val::Fin(s, _)) => f.inf_bits(x != s),
        (Val::Fin(s, _), Val::Inf(x)) => f.zero_bits(x != s),
        (Val::Fin(sa, x), Val::Fin(sb, y)) => {
            if y.is_zero() {
                if x.is_zero() {
                    f.nan_bits()
                } else {
                    f.inf_bits(sa != sb)
                }
            } else {
                round(f, &(x / y), sa != sb)
            }
        }
    }
}

pub fn sqrt(f: Fmt, a: u64) -> u64 {
    match decode(f, a) {
        Val::Nan => f.nan_bits(),
        Val::Inf(false) => f.inf_bits(false),
        Val::Inf(true) => f.nan_bits(),
        Val::Fin(s, x) => {
            if x.is_zero() {
                f.zero_bits(s)
            } else if x.is_negative() {
                f.nan_bits()
            } else {
                table(f).sqrt_mag(&x)
            }
        }
    }
}

/// Format conversion; the target table must be buildable.
pub fn cast(src: Fmt, dst: Fmt, a: u64) -> u64 {
    encode_val(dst, &decode(src, a))
}

/// Exact value of a finite pattern as `f64`-free rational, or `None`.
pub fn value(f: Fmt, a: u64) -> Option<BigRational> {
    match decode(f, a) {
        Val::Fin(_, v) => Some(v),
        _ => None,
    }
}

/// Exact rational of a finite `f64`.
pub fn rational_of_f64(x: f64) -> BigRational {
    assert!(x.is_finite());
    let bits = x.to_bits();
    let neg = bits >> 63 != 0;
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let man = bits & ((1u64 << 52) - 1);
    let (sig, e) = if exp == 0 {
        (man, -1074)
    } else {
        (man | (1u64 << 52), exp - 1075)
    };
    let v = BigRational::from_integer(BigInt::from(sig)) * pow2(e);
    if neg {
        -v
    } else {
        v
    }
}

/// Round an integer into `f`.
pub fn from_int(f: Fmt, i: i128) -> u64 {
    round(f, &BigRational::from_integer(BigInt::from(i)), false)
}
