//! Correctly rounded `+ - * / sqrt`.
//!
//! Significands are combined exactly in `u128` with enough guard bits that
//! any remaining inexactness can be jammed into a sticky bit before a single
//! final rounding in [`round_pack`].

use crate::error::Result;
use crate::float::round::{jam, round_pack, unpack, Unpacked};
use crate::float::FlexNum;

/// Bits of headroom placed below the larger addend.
const ADD_GUARD: i32 = 64;

/// Normalize a nonzero significand to exactly 53 bits.
#[inline]
fn normalize53(sig: u64, exp: i32) -> (u64, i32) {
    let shift = sig.leading_zeros() as i32 - 11;
    (sig << shift, exp - shift)
}

fn add_unpacked(a: FlexNum, ua: Unpacked, ub: Unpacked) -> FlexNum {
    let f = a.format();
    match (ua, ub) {
        (Unpacked::Nan, _) | (_, Unpacked::Nan) => f.nan(),
        (Unpacked::Inf(x), Unpacked::Inf(y)) => {
            if x == y {
                f.infinity(x)
            } else {
                f.nan()
            }
        }
        (Unpacked::Inf(x), _) | (_, Unpacked::Inf(x)) => f.infinity(x),
        (Unpacked::Zero(x), Unpacked::Zero(y)) => f.zero(x && y),
        (Unpacked::Zero(_), Unpacked::Finite { neg, sig, exp })
        | (Unpacked::Finite { neg, sig, exp }, Unpacked::Zero(_)) => {
            round_pack(f, neg, sig as u128, exp)
        }
        (
            Unpacked::Finite {
                neg: na,
                sig: sa,
                exp: ea,
            },
            Unpacked::Finite {
                neg: nb,
                sig: sb,
                exp: eb,
            },
        ) => {
            // order by quantum exponent so the first operand is never shifted right
            let ((na, sa, ea), (nb, sb, eb)) = if ea >= eb {
                ((na, sa, ea), (nb, sb, eb))
            } else {
                ((nb, sb, eb), (na, sa, ea))
            };
            let base = ea - ADD_GUARD;
            let big = (sa as u128) << ADD_GUARD;
            let d = eb - base;
            let small = if d >= 0 {
                (sb as u128) << d
            } else if -d >= 64 {
                (sb != 0) as u128
            } else {
                let k = -d as u32;
                ((sb >> k) as u128) | ((sb & ((1u64 << k) - 1)) != 0) as u128
            };
            if na == nb {
                round_pack(f, na, big + small, base)
            } else if big > small {
                round_pack(f, na, big - small, base)
            } else if small > big {
                round_pack(f, nb, small - big, base)
            } else {
                f.zero(false)
            }
        }
    }
}

fn mul_unpacked(a: FlexNum, ua: Unpacked, ub: Unpacked) -> FlexNum {
    let f = a.format();
    match (ua, ub) {
        (Unpacked::Nan, _) | (_, Unpacked::Nan) => f.nan(),
        (Unpacked::Inf(x), Unpacked::Inf(y)) => f.infinity(x != y),
        (Unpacked::Inf(_), Unpacked::Zero(_)) | (Unpacked::Zero(_), Unpacked::Inf(_)) => f.nan(),
        (Unpacked::Inf(x), Unpacked::Finite { neg, .. })
        | (Unpacked::Finite { neg, .. }, Unpacked::Inf(x)) => f.infinity(x != neg),
        (Unpacked::Zero(x), Unpacked::Zero(y)) => f.zero(x != y),
        (Unpacked::Zero(x), Unpacked::Finite { neg, .. })
        | (Unpacked::Finite { neg, .. }, Unpacked::Zero(x)) => f.zero(x != neg),
        (
            Unpacked::Finite {
                neg: na,
                sig: sa,
                exp: ea,
            },
            Unpacked::Finite {
                neg: nb,
                sig: sb,
                exp: eb,
            },
        ) => round_pack(f, na != nb, sa as u128 * sb as u128, ea + eb),
    }
}

fn div_unpacked(a: FlexNum, ua: Unpacked, ub: Unpacked) -> FlexNum {
    let f = a.format();
    match (ua, ub) {
        (Unpacked::Nan, _) | (_, Unpacked::Nan) => f.nan(),
        (Unpacked::Inf(_), Unpacked::Inf(_)) | (Unpacked::Zero(_), Unpacked::Zero(_)) => f.nan(),
        (Unpacked::Inf(x), Unpacked::Zero(y)) => f.infinity(x != y),
        (Unpacked::Inf(x), Unpacked::Finite { neg, .. }) => f.infinity(x != neg),
        (Unpacked::Zero(x), Unpacked::Inf(y)) => f.zero(x != y),
        (Unpacked::Finite { neg, .. }, Unpacked::Inf(y)) => f.zero(neg != y),
        (Unpacked::Zero(x), Unpacked::Finite { neg, .. }) => f.zero(x != neg),
        (Unpacked::Finite { neg, .. }, Unpacked::Zero(y)) => f.infinity(neg != y),
        (
            Unpacked::Finite {
                neg: na,
                sig: sa,
                exp: ea,
            },
            Unpacked::Finite {
                neg: nb,
                sig: sb,
                exp: eb,
            },
        ) => {
            let (sa, ea) = normalize53(sa, ea);
            let (sb, eb) = normalize53(sb, eb);
            let num = (sa as u128) << 64;
            let den = sb as u128;
            // quotient lies in (2^63, 2^65)
            let q = num / den;
            let r = num % den;
            round_pack(f, na != nb, jam(q, r != 0), ea - eb - 64 - 1)
        }
    }
}

/// Integer square root: largest `r` with `r * r <= n`.
fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    // float estimate, then correct in exact arithmetic
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn sqrt_unpacked(a: FlexNum, ua: Unpacked) -> FlexNum {
    let f = a.format();
    match ua {
        Unpacked::Nan | Unpacked::Inf(true) => f.nan(),
        Unpacked::Inf(false) => f.infinity(false),
        Unpacked::Zero(n) => f.zero(n),
        Unpacked::Finite { neg: true, .. } => f.nan(),
        Unpacked::Finite {
            neg: false,
            sig,
            exp,
        } => {
            let (sig, exp) = normalize53(sig, exp);
            // radicand of ~117 bits with an even exponent gives a ~59-bit root
            let k = if (exp - 64).rem_euclid(2) == 0 { 64 } else { 65 };
            let n = (sig as u128) << k;
            let r = isqrt(n);
            let inexact = r * r != n;
            round_pack(f, false, jam(r, inexact), (exp - k) / 2 - 1)
        }
    }
}

impl FlexNum {
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: FlexNum) -> Result<FlexNum> {
        self.check_same(rhs)?;
        Ok(add_unpacked(self, unpack(self), unpack(rhs)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: FlexNum) -> Result<FlexNum> {
        self.check_same(rhs)?;
        Ok(add_unpacked(self, unpack(self), unpack(rhs.neg())))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: FlexNum) -> Result<FlexNum> {
        self.check_same(rhs)?;
        Ok(mul_unpacked(self, unpack(self), unpack(rhs)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: FlexNum) -> Result<FlexNum> {
        self.check_same(rhs)?;
        Ok(div_unpacked(self, unpack(self), unpack(rhs)))
    }

    pub fn sqrt(self) -> FlexNum {
        sqrt_unpacked(self, unpack(self))
    }
}
