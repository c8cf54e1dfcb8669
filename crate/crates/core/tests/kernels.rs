//! Kernel behaviour against independent native binary32 implementations,
//! event counts, and frozen golden data.

use std::path::PathBuf;

use transprec::kernels::{evaluate, reference_output, run_kernel};
use transprec::stats::{EventKey, OpKind, Operand, RegionTag};
use transprec::{FloatFormat, Kernel, KernelConfig, KernelInput, StatsContext, StatsReport};

fn f32s(v: &[f64]) -> Vec<f32> {
    v.iter().map(|&x| x as f32).collect()
}

fn native(input: &KernelInput) -> Vec<f32> {
    let d = input.dims();
    let x = f32s(input.data());
    match input.kernel() {
        Kernel::Jacobi => {
            let (n, iters) = (d[0], d[1]);
            let mut cur = x.clone();
            let mut next = x;
            for _ in 0..iters {
                for i in 1..n - 1 {
                    for j in 1..n - 1 {
                        let s = cur[(i - 1) * n + j] + cur[(i + 1) * n + j] + cur[i * n + j - 1] + cur[i * n + j + 1];
                        next[i * n + j] = s * 0.25;
                    }
                }
                std::mem::swap(&mut cur, &mut next);
            }
            cur
        }
        Kernel::Knn => {
            let (n, dd, k) = (d[0], d[1], d[2]);
            let q = &x[n * dd..];
            let mut dist: Vec<f32> = (0..n)
                .map(|i| {
                    let mut acc = 0.0f32;
                    for j in 0..dd {
                        let t = x[i * dd + j] - q[j];
                        acc += t * t;
                    }
                    acc.sqrt()
                })
                .collect();
            for s in 0..k {
                let mut best = s;
                for j in s + 1..n {
                    if dist[j] < dist[best] {
                        best = j;
                    }
                }
                dist.swap(s, best);
            }
            dist.truncate(k);
            dist
        }
        Kernel::Pca => {
            let (n, dd, c, iters) = (d[0], d[1], d[2], d[3]);
            let nf = n as f32;
            let mean: Vec<f32> = (0..dd)
                .map(|j| (0..n).fold(0.0f32, |a, i| a + x[i * dd + j]) / nf)
                .collect();
            let cen: Vec<f32> = (0..n * dd).map(|t| x[t] - mean[t % dd]).collect();
            let mut cov = vec![0.0f32; dd * dd];
            for a in 0..dd {
                for b in a..dd {
                    let s = (0..n).fold(0.0f32, |acc, i| acc + cen[i * dd + a] * cen[i * dd + b]) / nf;
                    cov[a * dd + b] = s;
                    cov[b * dd + a] = s;
                }
            }
            let mut vals = vec![];
            let mut vecs = vec![];
            for comp in 0..c {
                let mut v = vec![1.0f32; dd];
                let mut norm = 0.0f32;
                for _ in 0..iters {
                    let w: Vec<f32> = (0..dd)
                        .map(|a| (0..dd).fold(0.0f32, |acc, b| acc + cov[a * dd + b] * v[b]))
                        .collect();
                    norm = w.iter().fold(0.0f32, |acc, e| acc + e * e).sqrt();
                    v = w.iter().map(|e| e / norm).collect();
                }
                let mut big = v[0];
                for &e in &v[1..] {
                    if big.abs() < e.abs() {
                        big = e;
                    }
                }
                let sign = if big.is_sign_negative() { -1.0f32 } else { 1.0 };
                for e in v.iter_mut() {
                    *e *= sign;
                }
                if comp + 1 < c {
                    for a in 0..dd {
                        let t = norm * v[a];
                        for b in 0..dd {
                            cov[a * dd + b] -= t * v[b];
                        }
                    }
                }
                vals.push(norm);
                vecs.extend(v);
            }
            vals.extend(vecs);
            vals
        }
        Kernel::Dwt => {
            let c = std::f64::consts::FRAC_1_SQRT_2 as f32;
            let h = d[0] / 2;
            let mut out: Vec<f32> = (0..h).map(|i| (x[2 * i] + x[2 * i + 1]) * c).collect();
            out.extend((0..h).map(|i| (x[2 * i] - x[2 * i + 1]) * c));
            out
        }
        Kernel::Svm => {
            let (n, dd) = (d[0], d[1]);
            let (w, b, s) = (&x[..dd], x[dd], &x[dd + 1..]);
            (0..n)
                .map(|i| (0..dd).fold(0.0f32, |acc, j| acc + w[j] * s[i * dd + j]) + b)
                .collect()
        }
        Kernel::Conv => {
            let n = d[0];
            let w = &x[n * n..];
            let px = |i: isize, j: isize| {
                if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                    0.0
                } else {
                    x[i as usize * n + j as usize]
                }
            };
            let mut out = vec![];
            for i in 0..n as isize {
                for j in 0..n as isize {
                    let mut acc = 0.0f32;
                    for a in 0..5 {
                        for b in 0..5 {
                            acc += px(i + a - 2, j + b - 2) * w[(a * 5 + b) as usize];
                        }
                    }
                    out.push(acc);
                }
            }
            out
        }
    }
}

#[test]
fn binary32_matches_native_f32() {
    for k in Kernel::ALL {
        for seed in [1, 2, 42] {
            let input = KernelInput::generate(k, seed, None).unwrap();
            let got = reference_output(&input).unwrap();
            let want = native(&input);
            assert_eq!(got.len(), want.len(), "{k}");
            for (i, (g, w)) in got.values.iter().zip(&want).enumerate() {
                assert_eq!(g.to_bits(), (*w as f64).to_bits(), "{k} seed {seed} output {i}: {g} vs {w}");
            }
        }
    }
}

fn stats(input: &KernelInput, config: &KernelConfig) -> StatsReport {
    let mut ctx = StatsContext::new();
    run_kernel(input, config, &mut ctx).unwrap();
    ctx.finish().unwrap()
}

fn count(r: &StatsReport, kind: OpKind) -> u64 {
    r.total_where(|k| k.kind == kind)
}

#[test]
fn conv_counts() {
    for n in [1, 7, 32] {
        let input = KernelInput::generate(Kernel::Conv, 42, Some(n)).unwrap();
        let r = stats(&input, &KernelConfig::binary32(Kernel::Conv));
        let pixels = (n * n) as u64;
        assert_eq!(count(&r, OpKind::Mul), 25 * pixels);
        assert_eq!(count(&r, OpKind::Add), 25 * pixels);
        assert_eq!(count(&r, OpKind::Load), 50 * pixels);
        assert_eq!(count(&r, OpKind::Store), pixels);
        assert_eq!(r.casts(), 0);
        assert_eq!(r.total_where(|k| k.region == RegionTag::Scalar), 0);
    }
}

#[test]
fn jacobi_zero_iterations_is_identity() {
    let input = KernelInput::generate(Kernel::Jacobi, 42, None).unwrap().with_iterations(0).unwrap();
    let out = reference_output(&input).unwrap();
    assert_eq!(out.values, input.data());
    let r = stats(&input, &KernelConfig::binary32(Kernel::Jacobi));
    assert!(r.is_empty());
}

#[test]
fn jacobi_boundaries_fixed() {
    let input = KernelInput::generate(Kernel::Jacobi, 42, None).unwrap();
    let n = input.dims()[0];
    let data = input.data();
    let out = reference_output(&input).unwrap().values;
    for i in 0..n {
        for j in 0..n {
            let edge = i == 0 || j == 0 || i == n - 1 || j == n - 1;
            if edge {
                assert_eq!(data[i * n + j], if i == 0 { 1.0 } else { 0.0 });
                assert_eq!(out[i * n + j], data[i * n + j]);
            } else {
                assert!((0.0..1.0).contains(&data[i * n + j]));
            }
        }
    }
}

#[test]
fn knn_query_on_dataset_point() {
    let base = KernelInput::generate(Kernel::Knn, 9, Some(16)).unwrap();
    let d = base.dims()[1];
    let mut data = base.data().to_vec();
    let point: Vec<f64> = data[5 * d..6 * d].to_vec();
    data[16 * d..].copy_from_slice(&point);
    let input = KernelInput::new(Kernel::Knn, vec![16, d, 1], data).unwrap();
    for f in [FloatFormat::BINARY8, FloatFormat::BINARY16ALT, FloatFormat::BINARY32] {
        let out = evaluate(&input, &KernelConfig::uniform(Kernel::Knn, f)).unwrap();
        assert_eq!(out.values, vec![0.0]);
    }
}

#[test]
fn knn_selection_counts_are_data_independent() {
    let a = KernelInput::generate(Kernel::Knn, 1, None).unwrap();
    let b = KernelInput::generate(Kernel::Knn, 2, None).unwrap();
    let cfg = KernelConfig::uniform(Kernel::Knn, FloatFormat::BINARY16);
    let (n, k) = (a.dims()[0] as u64, a.dims()[2] as u64);
    let ra = stats(&a, &cfg);
    assert_eq!(ra, stats(&b, &cfg));
    assert_eq!(count(&ra, OpKind::Cmp), (0..k).map(|s| n - s - 1).sum::<u64>());
    assert_eq!(count(&ra, OpKind::Sqrt), n);
}

#[test]
fn straight_line_kernels_conserve_fp_ops() {
    let formats = [FloatFormat::BINARY8, FloatFormat::BINARY16, FloatFormat::BINARY16ALT, FloatFormat::BINARY32];
    for k in [Kernel::Conv, Kernel::Dwt, Kernel::Svm] {
        let input = KernelInput::generate(k, 5, None).unwrap();
        let base = stats(&input, &KernelConfig::binary32(k));
        let groups = k.spec().vars.len();
        for salt in 0..8usize {
            let cfg: Vec<FloatFormat> = (0..groups).map(|g| formats[(g * 7 + salt * 3) % 4]).collect();
            let r = stats(&input, &KernelConfig::new(k, cfg).unwrap());
            assert_eq!(r.fp_ops(), base.fp_ops(), "{k}");
            assert_eq!(r.memory(), base.memory(), "{k}");
        }
    }
}

#[test]
fn each_mixed_edge_costs_one_cast() {
    let b8 = FloatFormat::BINARY8;
    let b32 = FloatFormat::BINARY32;
    // DWT: signal in b8, rest b32. Each of 2·n loads feeds one op in another format.
    let input = KernelInput::generate(Kernel::Dwt, 5, None).unwrap();
    let n = input.dims()[0] as u64;
    let r = stats(&input, &KernelConfig::new(Kernel::Dwt, vec![b8, b32, b32, b32]).unwrap());
    assert_eq!(r.get(&EventKey::cast(b8, b32, RegionTag::Vectorizable)), 2 * n);
    assert_eq!(r.casts(), 2 * n);
    // coef in b8: one cast per multiplication.
    let r = stats(&input, &KernelConfig::new(Kernel::Dwt, vec![b32, b8, b32, b32]).unwrap());
    assert_eq!(r.casts(), n);
    // acc in b8 for CONV: both factors cast, then the store casts back.
    let input = KernelInput::generate(Kernel::Conv, 5, Some(4)).unwrap();
    let r = stats(&input, &KernelConfig::new(Kernel::Conv, vec![b32, b32, b8, b32]).unwrap());
    assert_eq!(r.casts(), 16 * (25 * 2 + 1));
}

#[test]
fn mixed_arithmetic_demotes_region() {
    let b8 = FloatFormat::BINARY8;
    let b16 = FloatFormat::BINARY16;
    let input = KernelInput::generate(Kernel::Knn, 5, None).unwrap();
    let same = stats(&input, &KernelConfig::uniform(Kernel::Knn, b8));
    assert!(same.total_where(|k| k.region == RegionTag::Vectorizable) > 0);
    let mixed = stats(&input, &KernelConfig::new(Kernel::Knn, vec![b8, b8, b8, b16, b8]).unwrap());
    assert_eq!(mixed.total_where(|k| k.region == RegionTag::Vectorizable), 0);
    assert_eq!(mixed.fp_ops(), same.fp_ops());
}

#[test]
fn stats_are_deterministic() {
    for k in Kernel::ALL {
        let input = KernelInput::generate(k, 11, None).unwrap();
        let cfg = KernelConfig::uniform(k, FloatFormat::BINARY16ALT);
        assert_eq!(stats(&input, &cfg), stats(&input, &cfg));
        let widths: Vec<u32> = stats(&input, &cfg)
            .iter()
            .filter_map(|(k, _)| match k.operand {
                Operand::Mem { width } => Some(width),
                _ => None,
            })
            .collect();
        assert!(widths.iter().all(|&w| w == 16));
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compare `text` to a frozen file. `TRANSPREC_BLESS=1` rewrites it.
fn check_golden(name: &str, bytes: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("TRANSPREC_BLESS").is_some() {
        std::fs::write(&path, bytes).unwrap();
        return;
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == bytes, "{name} differs from golden file");
}

#[test]
fn golden_inputs_and_references() {
    for (k, file) in [(Kernel::Jacobi, "jacobi_16_seed42"), (Kernel::Conv, "conv_32_seed42")] {
        let input = KernelInput::generate(k, 42, None).unwrap();
        check_golden(&format!("{file}.input"), &input.to_bytes());
        let out = reference_output(&input).unwrap();
        check_golden(&format!("{file}.ref"), out.to_text().as_bytes());
    }
}
