//! Linear support vector machine decision function.

use super::exec::Exec;
use super::{Kernel, KernelSpec, Shape, VarSpec};
use crate::error::Result;
use crate::float::FlexNum;

pub(super) const FEATURES: usize = 16;

pub(super) const WEIGHTS: usize = 0;
pub(super) const SAMPLES: usize = 1;
pub(super) const BIAS: usize = 2;
pub(super) const ACC: usize = 3;
pub(super) const DECISION: usize = 4;

pub(super) static SPEC: KernelSpec = KernelSpec {
    kernel: Kernel::Svm,
    vars: &[
        VarSpec { name: "weights", shape: Shape::Array },
        VarSpec { name: "samples", shape: Shape::Array },
        VarSpec { name: "bias", shape: Shape::Scalar },
        VarSpec { name: "acc", shape: Shape::Scalar },
        VarSpec { name: "decision", shape: Shape::Array },
    ],
    regions: &["dot product"],
    dims: &["n", "d"],
    default_size: 64,
    size_range: (1, 1024),
    default_iterations: None,
};

/// Payload: `d` weights, the bias, then `n × d` samples.
pub(super) fn generate(n: usize, d: usize, unit: &mut impl FnMut(usize) -> Vec<f64>) -> Vec<f64> {
    let mut v = super::signed(unit(d));
    v.push((unit(1)[0] as f32 - 0.5) as f64);
    v.extend(super::signed(unit(n * d)));
    v
}

pub(super) fn run(ex: &mut Exec, dims: &[usize], data: &[f64]) -> Result<Vec<FlexNum>> {
    let (n, d) = (dims[0], dims[1]);
    let weights: Vec<FlexNum> = data[..d].iter().map(|&x| ex.value(WEIGHTS, x)).collect();
    let bias = ex.value(BIAS, data[d]);
    let samples: Vec<FlexNum> = data[d + 1..].iter().map(|&x| ex.value(SAMPLES, x)).collect();
    let zero = ex.value(ACC, 0.0);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let acc = ex.vector(|ex| {
            let mut acc = zero;
            for j in 0..d {
                let w = ex.load(WEIGHTS, weights[j]);
                let x = ex.load(SAMPLES, samples[i * d + j]);
                let p = ex.mul(ACC, w, x)?;
                acc = ex.add(ACC, acc, p)?;
            }
            Ok(acc)
        })?;
        let y = ex.add(DECISION, acc, bias)?;
        out.push(ex.store(DECISION, y));
    }
    Ok(out)
}
