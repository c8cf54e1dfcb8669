//! k nearest neighbours of a query point by euclidean distance.

use super::exec::Exec;
use super::{Kernel, KernelSpec, Shape, VarSpec};
use crate::error::Result;
use crate::float::FlexNum;

pub(super) const DIMS: usize = 4;
pub(super) const K: usize = 8;

pub(super) const DATA: usize = 0;
pub(super) const QUERY: usize = 1;
pub(super) const DIFF: usize = 2;
pub(super) const ACC: usize = 3;
pub(super) const DIST: usize = 4;

pub(super) static SPEC: KernelSpec = KernelSpec {
    kernel: Kernel::Knn,
    vars: &[
        VarSpec { name: "data", shape: Shape::Array },
        VarSpec { name: "query", shape: Shape::Array },
        VarSpec { name: "diff", shape: Shape::Scalar },
        VarSpec { name: "acc", shape: Shape::Scalar },
        VarSpec { name: "dist", shape: Shape::Array },
    ],
    regions: &["distance"],
    dims: &["n", "d", "k"],
    default_size: 128,
    size_range: (1, 1024),
    default_iterations: None,
};

/// Output: the `k` smallest distances, ascending.
pub(super) fn run(ex: &mut Exec, dims: &[usize], data: &[f64]) -> Result<Vec<FlexNum>> {
    let (n, d, k) = (dims[0], dims[1], dims[2]);
    let points: Vec<FlexNum> = data[..n * d].iter().map(|&x| ex.value(DATA, x)).collect();
    let query: Vec<FlexNum> = data[n * d..].iter().map(|&x| ex.value(QUERY, x)).collect();
    let zero = ex.value(ACC, 0.0);

    let mut dist = Vec::with_capacity(n);
    for i in 0..n {
        let acc = ex.vector(|ex| {
            let mut acc = zero;
            for j in 0..d {
                let p = ex.load(DATA, points[i * d + j]);
                let q = ex.load(QUERY, query[j]);
                let diff = ex.sub(DIFF, p, q)?;
                let sq = ex.square(ACC, diff)?;
                acc = ex.add(ACC, acc, sq)?;
            }
            Ok(acc)
        })?;
        let r = ex.sqrt(DIST, acc);
        dist.push(ex.store(DIST, r));
    }

    // Partial selection sort. The swap is unconditional so counts do not
    // depend on the data.
    for s in 0..k {
        let mut best = s;
        let mut best_val = ex.load(DIST, dist[s]);
        for (j, &d) in dist.iter().enumerate().skip(s + 1) {
            let v = ex.load(DIST, d);
            if ex.less(DIST, v, best_val)? {
                best = j;
                best_val = v;
            }
        }
        let a = ex.load(DIST, dist[s]);
        let b = ex.load(DIST, dist[best]);
        dist[s] = ex.store(DIST, b);
        dist[best] = ex.store(DIST, a);
    }
    dist.truncate(k);
    Ok(dist)
}
