//! Principal components by power iteration with deflation.

use super::exec::Exec;
use super::{Kernel, KernelSpec, Shape, VarSpec};
use crate::error::Result;
use crate::float::FlexNum;

pub(super) const DIMS: usize = 4;
pub(super) const COMPONENTS: usize = 2;

pub(super) const DATA: usize = 0;
pub(super) const MEAN: usize = 1;
pub(super) const CENTERED: usize = 2;
pub(super) const COV: usize = 3;
pub(super) const ACC: usize = 4;
pub(super) const VEC: usize = 5;
pub(super) const NORM: usize = 6;
pub(super) const EIGVAL: usize = 7;

pub(super) static SPEC: KernelSpec = KernelSpec {
    kernel: Kernel::Pca,
    vars: &[
        VarSpec { name: "data", shape: Shape::Array },
        VarSpec { name: "mean", shape: Shape::Array },
        VarSpec { name: "centered", shape: Shape::Array },
        VarSpec { name: "cov", shape: Shape::Array },
        VarSpec { name: "acc", shape: Shape::Scalar },
        VarSpec { name: "vec", shape: Shape::Array },
        VarSpec { name: "norm", shape: Shape::Scalar },
        VarSpec { name: "eigval", shape: Shape::Array },
    ],
    regions: &["centering", "covariance"],
    dims: &["n", "d", "components", "iterations"],
    default_size: 64,
    size_range: (2, 1024),
    default_iterations: Some(16),
};

/// Output: `c` eigenvalues, then `c` unit eigenvectors of length `d`.
///
/// Each eigenvector is scaled by ±1 so its largest-magnitude entry is
/// positive.
pub(super) fn run(ex: &mut Exec, dims: &[usize], data: &[f64]) -> Result<Vec<FlexNum>> {
    let (n, d, c, iterations) = (dims[0], dims[1], dims[2], dims[3]);
    let x: Vec<FlexNum> = data.iter().map(|&v| ex.value(DATA, v)).collect();
    let acc0 = ex.value(ACC, 0.0);

    let count = ex.value(MEAN, n as f64);
    let mut mean = Vec::with_capacity(d);
    for j in 0..d {
        let mut acc = acc0;
        for i in 0..n {
            let v = ex.load(DATA, x[i * d + j]);
            acc = ex.add(ACC, acc, v)?;
        }
        let m = ex.div(MEAN, acc, count)?;
        mean.push(ex.store(MEAN, m));
    }

    let mut centered = Vec::with_capacity(n * d);
    ex.vector(|ex| {
        for i in 0..n {
            for j in 0..d {
                let v = ex.load(DATA, x[i * d + j]);
                let m = ex.load(MEAN, mean[j]);
                let r = ex.sub(CENTERED, v, m)?;
                centered.push(ex.store(CENTERED, r));
            }
        }
        Ok(())
    })?;

    let count = ex.value(COV, n as f64);
    let mut cov = vec![ex.value(COV, 0.0); d * d];
    for a in 0..d {
        for b in a..d {
            let acc = ex.vector(|ex| {
                let mut acc = acc0;
                for i in 0..n {
                    let u = ex.load(CENTERED, centered[i * d + a]);
                    let v = ex.load(CENTERED, centered[i * d + b]);
                    let p = ex.mul(ACC, u, v)?;
                    acc = ex.add(ACC, acc, p)?;
                }
                Ok(acc)
            })?;
            let s = ex.div(COV, acc, count)?;
            cov[a * d + b] = ex.store(COV, s);
            if a != b {
                cov[b * d + a] = ex.store(COV, s);
            }
        }
    }

    let mut eigvals = Vec::with_capacity(c);
    let mut vectors = Vec::with_capacity(c * d);
    let one = ex.value(VEC, 1.0);
    let minus_one = ex.value(VEC, -1.0);
    for comp in 0..c {
        let mut v = vec![one; d];
        let mut norm = ex.value(NORM, 0.0);
        for _ in 0..iterations {
            // w = cov · v, held in the vec array.
            let mut w = Vec::with_capacity(d);
            for a in 0..d {
                let mut acc = acc0;
                for b in 0..d {
                    let m = ex.load(COV, cov[a * d + b]);
                    let e = ex.load(VEC, v[b]);
                    let p = ex.mul(ACC, m, e)?;
                    acc = ex.add(ACC, acc, p)?;
                }
                w.push(ex.store(VEC, acc));
            }
            let mut sq = ex.value(NORM, 0.0);
            for &e in &w {
                let e = ex.load(VEC, e);
                let p = ex.square(NORM, e)?;
                sq = ex.add(NORM, sq, p)?;
            }
            norm = ex.sqrt(NORM, sq);
            for a in 0..d {
                let e = ex.load(VEC, w[a]);
                let q = ex.div(VEC, e, norm)?;
                v[a] = ex.store(VEC, q);
            }
        }

        let mut big = ex.load(VEC, v[0]);
        for &e in &v[1..] {
            let e = ex.load(VEC, e);
            if ex.less(VEC, big.abs(), e.abs())? {
                big = e;
            }
        }
        let sign = if big.sign() { minus_one } else { one };
        for e in v.iter_mut() {
            let loaded = ex.load(VEC, *e);
            let s = ex.mul(VEC, loaded, sign)?;
            *e = ex.store(VEC, s);
        }

        let lambda = ex.store(EIGVAL, norm);
        eigvals.push(lambda);

        if comp + 1 < c {
            for a in 0..d {
                let va = ex.load(VEC, v[a]);
                let t = ex.mul(COV, lambda, va)?;
                for b in 0..d {
                    let vb = ex.load(VEC, v[b]);
                    let t2 = ex.mul(COV, t, vb)?;
                    let m = ex.load(COV, cov[a * d + b]);
                    let r = ex.sub(COV, m, t2)?;
                    cov[a * d + b] = ex.store(COV, r);
                }
            }
        }
        vectors.extend_from_slice(&v);
    }
    eigvals.extend(vectors);
    Ok(eigvals)
}
