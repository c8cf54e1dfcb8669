//! One-level Haar wavelet transform.

use super::exec::Exec;
use super::{Kernel, KernelSpec, Shape, VarSpec};
use crate::error::Result;
use crate::float::FlexNum;

pub(super) const SIGNAL: usize = 0;
pub(super) const COEF: usize = 1;
pub(super) const APPROX: usize = 2;
pub(super) const DETAIL: usize = 3;

pub(super) static SPEC: KernelSpec = KernelSpec {
    kernel: Kernel::Dwt,
    vars: &[
        VarSpec { name: "signal", shape: Shape::Array },
        VarSpec { name: "coef", shape: Shape::Scalar },
        VarSpec { name: "approx", shape: Shape::Array },
        VarSpec { name: "detail", shape: Shape::Array },
    ],
    regions: &["approximation", "detail"],
    dims: &["n"],
    default_size: 256,
    size_range: (2, 1024),
    default_iterations: None,
};

/// Output: approximation coefficients then detail coefficients.
pub(super) fn run(ex: &mut Exec, dims: &[usize], data: &[f64]) -> Result<Vec<FlexNum>> {
    let half = dims[0] / 2;
    let signal: Vec<FlexNum> = data.iter().map(|&x| ex.value(SIGNAL, x)).collect();
    let coef = ex.value(COEF, std::f64::consts::FRAC_1_SQRT_2);
    let mut out = Vec::with_capacity(dims[0]);
    ex.vector(|ex| {
        for i in 0..half {
            let a = ex.load(SIGNAL, signal[2 * i]);
            let b = ex.load(SIGNAL, signal[2 * i + 1]);
            let s = ex.add(APPROX, a, b)?;
            let s = ex.mul(APPROX, s, coef)?;
            out.push(ex.store(APPROX, s));
        }
        Ok(())
    })?;
    ex.vector(|ex| {
        for i in 0..half {
            let a = ex.load(SIGNAL, signal[2 * i]);
            let b = ex.load(SIGNAL, signal[2 * i + 1]);
            let s = ex.sub(DETAIL, a, b)?;
            let s = ex.mul(DETAIL, s, coef)?;
            out.push(ex.store(DETAIL, s));
        }
        Ok(())
    })?;
    Ok(out)
}
