//! Jacobi relaxation of a 2-D heat grid with fixed boundaries.

use super::exec::Exec;
use super::{Kernel, KernelSpec, Shape, VarSpec};
use crate::error::Result;
use crate::float::FlexNum;

pub(super) const GRID: usize = 0;
pub(super) const SUM: usize = 1;
pub(super) const SCALE: usize = 2;

pub(super) static SPEC: KernelSpec = KernelSpec {
    kernel: Kernel::Jacobi,
    vars: &[
        VarSpec { name: "grid", shape: Shape::Array },
        VarSpec { name: "sum", shape: Shape::Scalar },
        VarSpec { name: "scale", shape: Shape::Scalar },
    ],
    regions: &["row update"],
    dims: &["n", "iterations"],
    default_size: 16,
    size_range: (3, 64),
    default_iterations: Some(50),
};

/// Top row held at 1, other edges at 0, interior uniform in [0,1).
pub(super) fn generate(n: usize, unit: &mut impl FnMut(usize) -> Vec<f64>) -> Vec<f64> {
    let interior = unit((n - 2) * (n - 2));
    let mut grid = vec![0.0; n * n];
    grid[..n].fill(1.0);
    for i in 1..n - 1 {
        grid[i * n + 1..i * n + n - 1].copy_from_slice(&interior[(i - 1) * (n - 2)..i * (n - 2)]);
    }
    grid
}

pub(super) fn run(ex: &mut Exec, dims: &[usize], data: &[f64]) -> Result<Vec<FlexNum>> {
    let (n, iterations) = (dims[0], dims[1]);
    let mut cur: Vec<FlexNum> = data.iter().map(|&x| ex.value(GRID, x)).collect();
    let mut next = cur.clone();
    let scale = ex.value(SCALE, 0.25);
    for _ in 0..iterations {
        for i in 1..n - 1 {
            ex.vector(|ex| {
                for j in 1..n - 1 {
                    let up = ex.load(GRID, cur[(i - 1) * n + j]);
                    let down = ex.load(GRID, cur[(i + 1) * n + j]);
                    let left = ex.load(GRID, cur[i * n + j - 1]);
                    let right = ex.load(GRID, cur[i * n + j + 1]);
                    let mut s = ex.add(SUM, up, down)?;
                    s = ex.add(SUM, s, left)?;
                    s = ex.add(SUM, s, right)?;
                    s = ex.mul(SUM, s, scale)?;
                    next[i * n + j] = ex.store(GRID, s);
                }
                Ok(())
            })?;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}
