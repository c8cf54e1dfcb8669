//! Parameterized binary floating-point formats and values.
//!
//! A [`FloatFormat`] is an `(exponent bits, mantissa bits)` pair laid out the
//! IEEE 754 way: sign, biased exponent, explicit mantissa, with denormals,
//! signed zeros, infinities and a single canonical quiet NaN. [`FlexNum`]
//! pairs a format with a bit pattern. Every arithmetic operation and
//! conversion is correctly rounded (round to nearest, ties to even): the
//! result is exactly what rounding the infinitely precise result would give.
//!
//! Operations never mix formats implicitly. Operands in different formats
//! are rejected with [`Error::FormatMismatch`](crate::Error::FormatMismatch);
//! use [`FlexNum::cast`] to move a value between formats.

mod arith;
mod convert;
mod format;
mod num;
mod round;

pub use format::FloatFormat;
pub use num::{FlexNum, FpClass};
