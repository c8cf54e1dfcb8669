//! Bit-exact comparison of the float core against the exact-rational oracle.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transprec::{FlexNum, FloatFormat};
use transprec_oracle as oracle;

fn ofmt(f: FloatFormat) -> oracle::Fmt {
    oracle::Fmt {
        e: f.exp_bits(),
        m: f.man_bits(),
    }
}

fn num(f: FloatFormat, bits: u64) -> FlexNum {
    FlexNum::from_bits(f, bits).unwrap()
}

type Op = (&'static str, fn(FlexNum, FlexNum) -> FlexNum, fn(oracle::Fmt, u64, u64) -> u64);

const OPS: [Op; 4] = [
    ("add", |a, b| a.add(b).unwrap(), oracle::add),
    ("sub", |a, b| a.sub(b).unwrap(), oracle::sub),
    ("mul", |a, b| a.mul(b).unwrap(), oracle::mul),
    ("div", |a, b| a.div(b).unwrap(), oracle::div),
];

#[test]
fn binary8_exhaustive_arithmetic() {
    let f = FloatFormat::BINARY8;
    let of = ofmt(f);
    for (name, op, reference) in OPS {
        for a in 0..256u64 {
            for b in 0..256u64 {
                let got = op(num(f, a), num(f, b)).bits();
                // from_bits canonicalizes NaN inputs; the oracle sees the raw pattern
                let want = reference(of, a, b);
                assert_eq!(got, want, "{name} {a:#010b} {b:#010b}");
            }
        }
    }
}

#[test]
fn binary8_exhaustive_sqrt() {
    let f = FloatFormat::BINARY8;
    for a in 0..256u64 {
        assert_eq!(num(f, a).sqrt().bits(), oracle::sqrt(ofmt(f), a), "sqrt {a:#010b}");
    }
}

#[test]
fn small_formats_sampled() {
    // a spread of odd shapes, including e=2 and tiny mantissas
    let formats = [(2, 1), (2, 5), (3, 3), (4, 3), (6, 1), (7, 4), (4, 9)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (e, m) in formats {
        let f = FloatFormat::new(e, m).unwrap();
        let of = ofmt(f);
        let n = 1u64 << f.width();
        for _ in 0..4000 {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            for (name, op, reference) in OPS {
                assert_eq!(op(num(f, a), num(f, b)).bits(), reference(of, a, b), "{f} {name} {a} {b}");
            }
            assert_eq!(num(f, a).sqrt().bits(), oracle::sqrt(of, a), "{f} sqrt {a}");
        }
    }
}

#[test]
fn sixteen_bit_formats_sampled() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in [FloatFormat::BINARY16, FloatFormat::BINARY16ALT] {
        let of = ofmt(f);
        for _ in 0..20_000 {
            let a = rng.random_range(0..1u64 << 16);
            let b = rng.random_range(0..1u64 << 16);
            for (name, op, reference) in OPS {
                assert_eq!(op(num(f, a), num(f, b)).bits(), reference(of, a, b), "{f} {name} {a:#x} {b:#x}");
            }
            assert_eq!(num(f, a).sqrt().bits(), oracle::sqrt(of, a));
        }
    }
}

#[test]
fn encode_matches_enumeration() {
    let f = FloatFormat::BINARY8;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut xs: Vec<f64> = vec![0.1, 1.125, 1.375, -0.1, 57344.0, 61439.0, 61440.0, 1e-5, 2f64.powi(-17)];
    xs.extend((0..5000).map(|_| {
        let mag = 2f64.powf(rng.random_range(-20.0..17.0));
        if rng.random_bool(0.5) {
            -mag
        } else {
            mag
        }
    }));
    for x in xs {
        let want = oracle::round(ofmt(f), &oracle::rational_of_f64(x), x.is_sign_negative());
        assert_eq!(FlexNum::from_f64(f, x).bits(), want, "{x}");
    }
}

#[test]
fn casts_match_oracle() {
    let b8 = FloatFormat::BINARY8;
    let b16 = FloatFormat::BINARY16;
    for a in 0..1u64 << 16 {
        let got = num(b16, a).cast(b8).bits();
        assert_eq!(got, oracle::cast(ofmt(b16), ofmt(b8), a), "{a:#x}");
    }
    let alt = FloatFormat::BINARY16ALT;
    for a in 0..1u64 << 16 {
        // binary16 -> binary16alt narrows precision but widens range
        assert_eq!(num(b16, a).cast(alt).bits(), oracle::cast(ofmt(b16), ofmt(alt), a), "{a:#x}");
    }
}

#[test]
fn int_conversions_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in [FloatFormat::BINARY8, FloatFormat::BINARY16, FloatFormat::BINARY16ALT] {
        for _ in 0..3000 {
            let i: i64 = rng.random_range(-200_000..200_000);
            assert_eq!(FlexNum::from_i64(f, i).bits(), oracle::from_int(ofmt(f), i as i128), "{f} {i}");
        }
    }
}

proptest! {
    #[test]
    fn rounding_is_monotone(x in -7e4f64..7e4, y in -7e4f64..7e4) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        for f in [FloatFormat::BINARY8, FloatFormat::BINARY16, FloatFormat::BINARY16ALT] {
            prop_assert!(FlexNum::from_f64(f, lo).to_f64() <= FlexNum::from_f64(f, hi).to_f64());
        }
    }

    #[test]
    fn encode_inverts_decode(bits in 0u64..1 << 16) {
        for f in [FloatFormat::BINARY16, FloatFormat::BINARY16ALT] {
            let a = FlexNum::from_bits(f, bits).unwrap();
            if a.is_finite() {
                prop_assert_eq!(FlexNum::from_f64(f, a.to_f64()), a);
            }
        }
    }

    #[test]
    fn commutative(a in 0u64..1 << 16, b in 0u64..1 << 16) {
        let f = FloatFormat::BINARY16;
        let (x, y) = (num(f, a), num(f, b));
        prop_assert_eq!(x.add(y).unwrap(), y.add(x).unwrap());
        prop_assert_eq!(x.mul(y).unwrap(), y.mul(x).unwrap());
    }

    #[test]
    fn self_cancellation_is_positive_zero(a in 0u64..1 << 16) {
        let x = num(FloatFormat::BINARY16ALT, a);
        if x.is_finite() {
            prop_assert_eq!(x.add(x.neg()).unwrap(), FloatFormat::BINARY16ALT.zero(false));
        }
    }

    #[test]
    fn wide_formats_match_native(a in any::<f32>(), b in any::<f32>()) {
        let f = FloatFormat::BINARY32;
        let (x, y) = (FlexNum::from_f64(f, a as f64), FlexNum::from_f64(f, b as f64));
        let check = |got: FlexNum, want: f32| {
            if want.is_nan() { got.is_nan() } else { got.to_f64() == want as f64 && got.sign() == want.is_sign_negative() }
        };
        prop_assert!(check(x.add(y).unwrap(), a + b));
        prop_assert!(check(x.sub(y).unwrap(), a - b));
        prop_assert!(check(x.mul(y).unwrap(), a * b));
        prop_assert!(check(x.div(y).unwrap(), a / b));
        prop_assert!(check(x.sqrt(), a.sqrt()));
    }
}
