//! 5×5 same-size convolution of a single-channel image with zero padding.

use super::exec::Exec;
use super::{Kernel, KernelSpec, Shape, VarSpec};
use crate::error::Result;
use crate::float::FlexNum;

pub(super) const TAPS: usize = 5;
const PAD: usize = TAPS / 2;

pub(super) const IMAGE: usize = 0;
pub(super) const WEIGHTS: usize = 1;
pub(super) const ACC: usize = 2;
pub(super) const OUTPUT: usize = 3;

pub(super) static SPEC: KernelSpec = KernelSpec {
    kernel: Kernel::Conv,
    vars: &[
        VarSpec { name: "image", shape: Shape::Array },
        VarSpec { name: "weights", shape: Shape::Array },
        VarSpec { name: "acc", shape: Shape::Scalar },
        VarSpec { name: "output", shape: Shape::Array },
    ],
    regions: &["output row"],
    dims: &["n", "taps"],
    default_size: 32,
    size_range: (1, 64),
    default_iterations: None,
};

/// Payload: `n × n` image in [0,1), then 25 weights summing to about 1.
pub(super) fn generate(n: usize, unit: &mut impl FnMut(usize) -> Vec<f64>) -> Vec<f64> {
    let mut v = unit(n * n);
    let raw = unit(TAPS * TAPS);
    let total: f64 = raw.iter().sum();
    v.extend(raw.iter().map(|w| (w / total) as f32 as f64));
    v
}

pub(super) fn run(ex: &mut Exec, dims: &[usize], data: &[f64]) -> Result<Vec<FlexNum>> {
    let n = dims[0];
    let w = n + 2 * PAD;
    let mut image = vec![ex.value(IMAGE, 0.0); w * w];
    for i in 0..n {
        for j in 0..n {
            image[(i + PAD) * w + j + PAD] = ex.value(IMAGE, data[i * n + j]);
        }
    }
    let weights: Vec<FlexNum> = data[n * n..].iter().map(|&x| ex.value(WEIGHTS, x)).collect();
    let zero = ex.value(ACC, 0.0);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        ex.vector(|ex| {
            for j in 0..n {
                let mut acc = zero;
                for a in 0..TAPS {
                    for b in 0..TAPS {
                        let x = ex.load(IMAGE, image[(i + a) * w + j + b]);
                        let k = ex.load(WEIGHTS, weights[a * TAPS + b]);
                        let p = ex.mul(ACC, x, k)?;
                        acc = ex.add(ACC, acc, p)?;
                    }
                }
                out.push(ex.store(OUTPUT, acc));
            }
            Ok(())
        })?;
    }
    Ok(out)
}
