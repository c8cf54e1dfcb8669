//! Instrumented execution helpers shared by the kernels.

use std::cmp::Ordering;

use crate::error::Result;
use crate::float::{FlexNum, FloatFormat};
use crate::stats::{OpKind, Operand, RegionTag, StatsContext};

/// Evaluates operations in per-variable formats and records every event.
///
/// An operation runs in the format of the variable receiving its result.
/// Operands in another format are cast first, one `CastFp` per operand.
pub(crate) struct Exec<'a> {
    formats: &'a [FloatFormat],
    ctx: &'a mut StatsContext,
}

impl<'a> Exec<'a> {
    pub fn new(formats: &'a [FloatFormat], ctx: &'a mut StatsContext) -> Self {
        Exec { formats, ctx }
    }

    #[inline]
    pub fn fmt(&self, var: usize) -> FloatFormat {
        self.formats[var]
    }

    /// Encode a constant or an input value. Not counted.
    #[inline]
    pub fn value(&self, var: usize, x: f64) -> FlexNum {
        FlexNum::from_f64(self.fmt(var), x)
    }

    #[inline]
    pub fn coerce(&mut self, var: usize, x: FlexNum) -> FlexNum {
        let to = self.fmt(var);
        let from = x.format();
        if from == to {
            return x;
        }
        self.ctx.record(OpKind::CastFp, Operand::Cast { from, to });
        x.cast(to)
    }

    #[inline]
    fn binary(&mut self, kind: OpKind, var: usize, a: FlexNum, b: FlexNum) -> (FlexNum, FlexNum) {
        let a = self.coerce(var, a);
        let b = self.coerce(var, b);
        self.ctx.record(kind, Operand::Fp(self.fmt(var)));
        (a, b)
    }

    pub fn add(&mut self, var: usize, a: FlexNum, b: FlexNum) -> Result<FlexNum> {
        let (a, b) = self.binary(OpKind::Add, var, a, b);
        a.add(b)
    }

    pub fn sub(&mut self, var: usize, a: FlexNum, b: FlexNum) -> Result<FlexNum> {
        let (a, b) = self.binary(OpKind::Sub, var, a, b);
        a.sub(b)
    }

    pub fn mul(&mut self, var: usize, a: FlexNum, b: FlexNum) -> Result<FlexNum> {
        let (a, b) = self.binary(OpKind::Mul, var, a, b);
        a.mul(b)
    }

    pub fn div(&mut self, var: usize, a: FlexNum, b: FlexNum) -> Result<FlexNum> {
        let (a, b) = self.binary(OpKind::Div, var, a, b);
        a.div(b)
    }

    /// `a * a` with a single cast of `a`.
    pub fn square(&mut self, var: usize, a: FlexNum) -> Result<FlexNum> {
        let a = self.coerce(var, a);
        self.ctx.record(OpKind::Mul, Operand::Fp(self.fmt(var)));
        a.mul(a)
    }

    pub fn sqrt(&mut self, var: usize, a: FlexNum) -> FlexNum {
        let a = self.coerce(var, a);
        self.ctx.record(OpKind::Sqrt, Operand::Fp(self.fmt(var)));
        a.sqrt()
    }

    /// `a < b` compared in `var`'s format. False if either is NaN.
    pub fn less(&mut self, var: usize, a: FlexNum, b: FlexNum) -> Result<bool> {
        let (a, b) = self.binary(OpKind::Cmp, var, a, b);
        Ok(a.compare(b)? == Some(Ordering::Less))
    }

    /// Read an element of array `var`.
    #[inline]
    pub fn load(&mut self, var: usize, x: FlexNum) -> FlexNum {
        debug_assert_eq!(x.format(), self.fmt(var));
        self.ctx.record(
            OpKind::Load,
            Operand::Mem {
                width: self.fmt(var).width(),
            },
        );
        x
    }

    /// Write `x` to an element of array `var`, casting if needed.
    #[inline]
    pub fn store(&mut self, var: usize, x: FlexNum) -> FlexNum {
        let x = self.coerce(var, x);
        self.ctx.record(
            OpKind::Store,
            Operand::Mem {
                width: self.fmt(var).width(),
            },
        );
        x
    }

    /// Run `body` as a vectorizable region.
    pub fn vector<T>(&mut self, body: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.ctx.enter_region(RegionTag::Vectorizable)?;
        let out = body(self);
        self.ctx.exit_region()?;
        out
    }
}
