//! The six benchmark kernels.
//!
//! Every kernel variable (an array or a scalar) belongs to one format group
//! and the [`KernelConfig`] binds one [`FloatFormat`] per group, in the
//! declaration order of [`KernelSpec::vars`]. All arithmetic goes through
//! [`FlexNum`] and every event is reported to a [`StatsContext`].
//!
//! Inputs are generated deterministically from a seed. Generated values are
//! binary32-representable so the all-binary32 run sees them exactly.
//!
//! # Input file layout
//!
//! All integers little-endian:
//!
//! | field   | type          |
//! |---------|---------------|
//! | magic   | `b"TPKI"`     |
//! | version | u32 (= 1)     |
//! | kernel  | 8 bytes ASCII, zero padded |
//! | ndims   | u32           |
//! | dims    | ndims × u64   |
//! | count   | u64           |
//! | payload | count × f64   |

mod conv;
mod dwt;
mod exec;
mod jacobi;
mod knn;
mod pca;
mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::float::{FlexNum, FloatFormat};
use crate::formats::TypeSystem;
use crate::stats::StatsContext;

use exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Jacobi,
    Knn,
    Pca,
    Dwt,
    Svm,
    Conv,
}

impl Kernel {
    pub const ALL: [Kernel; 6] = [
        Kernel::Jacobi,
        Kernel::Knn,
        Kernel::Pca,
        Kernel::Dwt,
        Kernel::Svm,
        Kernel::Conv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Jacobi => "JACOBI",
            Kernel::Knn => "KNN",
            Kernel::Pca => "PCA",
            Kernel::Dwt => "DWT",
            Kernel::Svm => "SVM",
            Kernel::Conv => "CONV",
        }
    }

    pub fn spec(self) -> &'static KernelSpec {
        match self {
            Kernel::Jacobi => &jacobi::SPEC,
            Kernel::Knn => &knn::SPEC,
            Kernel::Pca => &pca::SPEC,
            Kernel::Dwt => &dwt::SPEC,
            Kernel::Svm => &svm::SPEC,
            Kernel::Conv => &conv::SPEC,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownKernel(s.to_string()))
    }
}

/// All kernel specs in a fixed order.
pub fn list_kernels() -> Vec<&'static KernelSpec> {
    Kernel::ALL.iter().map(|k| k.spec()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarSpec {
    pub name: &'static str,
    pub shape: Shape,
}

#[derive(Debug)]
pub struct KernelSpec {
    pub kernel: Kernel,
    /// Format groups in declaration order.
    pub vars: &'static [VarSpec],
    /// Loops tagged as vectorizable.
    pub regions: &'static [&'static str],
    /// Names of the `dims` entries of an input.
    pub dims: &'static [&'static str],
    /// Default problem size (first dim).
    pub default_size: usize,
    /// Inclusive bounds on the problem size.
    pub size_range: (usize, usize),
    /// Default iteration count, for kernels that iterate.
    pub default_iterations: Option<usize>,
}

impl KernelSpec {
    pub const DEFAULT_FORMAT: FloatFormat = FloatFormat::BINARY32;

    pub fn var_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.vars.iter().map(|v| v.name)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn output_len(&self, dims: &[usize]) -> usize {
        match self.kernel {
            Kernel::Jacobi => dims[0] * dims[0],
            Kernel::Knn => dims[2],
            Kernel::Pca => dims[2] * (1 + dims[1]),
            Kernel::Dwt => dims[0],
            Kernel::Svm => dims[0],
            Kernel::Conv => dims[0] * dims[0],
        }
    }
}

/// One format per variable group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelConfig {
    kernel: Kernel,
    formats: Vec<FloatFormat>,
}

impl KernelConfig {
    pub fn new(kernel: Kernel, formats: Vec<FloatFormat>) -> Result<Self> {
        let expected = kernel.spec().vars.len();
        if formats.len() != expected {
            return Err(Error::BindingCount {
                kernel: kernel.name(),
                expected,
                got: formats.len(),
            });
        }
        Ok(KernelConfig { kernel, formats })
    }

    pub fn uniform(kernel: Kernel, format: FloatFormat) -> Self {
        KernelConfig {
            kernel,
            formats: vec![format; kernel.spec().vars.len()],
        }
    }

    pub fn binary32(kernel: Kernel) -> Self {
        Self::uniform(kernel, KernelSpec::DEFAULT_FORMAT)
    }

    /// Resolve precision bits through `map_precision`.
    pub fn from_precisions(kernel: Kernel, bits: &[u32], ts: &TypeSystem) -> Result<Self> {
        Self::resolve(kernel, bits, |p| ts.map_precision(p))
    }

    /// Resolve precision bits to the named storage types.
    pub fn from_precisions_named(kernel: Kernel, bits: &[u32], ts: &TypeSystem) -> Result<Self> {
        Self::resolve(kernel, bits, |p| Ok(ts.classify_precision(p)?.format()))
    }

    fn resolve(
        kernel: Kernel,
        bits: &[u32],
        f: impl Fn(u32) -> Result<FloatFormat>,
    ) -> Result<Self> {
        let spec = kernel.spec();
        if bits.len() < spec.vars.len() {
            return Err(Error::UnboundVariable(spec.vars[bits.len()].name.to_string()));
        }
        let formats = bits.iter().map(|&p| f(p)).collect::<Result<Vec<_>>>()?;
        Self::new(kernel, formats)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn formats(&self) -> &[FloatFormat] {
        &self.formats
    }

    pub fn format_of(&self, var: &str) -> Option<FloatFormat> {
        self.kernel.spec().var_index(var).map(|i| self.formats[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelInput {
    kernel: Kernel,
    dims: Vec<usize>,
    data: Vec<f64>,
}

const MAGIC: &[u8; 4] = b"TPKI";
const VERSION: u32 = 1;

impl KernelInput {
    /// Validate dims and payload for `kernel`.
    pub fn new(kernel: Kernel, dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let spec = kernel.spec();
        let bad = |reason: String| Error::InvalidInput {
            kernel: kernel.name(),
            reason,
        };
        if dims.len() != spec.dims.len() {
            return Err(bad(format!(
                "expected {} dims ({}), got {}",
                spec.dims.len(),
                spec.dims.join(", "),
                dims.len()
            )));
        }
        let (lo, hi) = spec.size_range;
        if !(lo..=hi).contains(&dims[0]) {
            return Err(bad(format!("size {} outside [{lo}, {hi}]", dims[0])));
        }
        let expected = match kernel {
            Kernel::Jacobi => {
                if dims[1] > 1000 {
                    return Err(bad("more than 1000 iterations".into()));
                }
                dims[0] * dims[0]
            }
            Kernel::Knn => {
                let [n, d, k] = [dims[0], dims[1], dims[2]];
                if d == 0 || d > 64 || k == 0 || k > n {
                    return Err(bad(format!("need 1 <= d <= 64 and 1 <= k <= n, got d={d} k={k}")));
                }
                n * d + d
            }
            Kernel::Pca => {
                let [n, d, c, it] = [dims[0], dims[1], dims[2], dims[3]];
                if d == 0 || d > 64 || c == 0 || c > d || it == 0 || it > 1000 {
                    return Err(bad(format!(
                        "need 1 <= c <= d <= 64 and 1..=1000 iterations, got d={d} c={c} iterations={it}"
                    )));
                }
                n * d
            }
            Kernel::Dwt => {
                if !dims[0].is_multiple_of(2) {
                    return Err(bad("signal length must be even".into()));
                }
                dims[0]
            }
            Kernel::Svm => {
                if dims[1] == 0 || dims[1] > 1024 {
                    return Err(bad(format!("feature count {} outside [1, 1024]", dims[1])));
                }
                dims[1] + 1 + dims[0] * dims[1]
            }
            Kernel::Conv => {
                if dims[1] != conv::TAPS {
                    return Err(bad(format!("filter size must be {}", conv::TAPS)));
                }
                dims[0] * dims[0] + conv::TAPS * conv::TAPS
            }
        };
        if data.len() != expected {
            return Err(bad(format!("expected {expected} values, got {}", data.len())));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(bad(format!("value {i} is not finite")));
        }
        Ok(KernelInput { kernel, dims, data })
    }

    /// Deterministic input of the given size (or the kernel default).
    pub fn generate(kernel: Kernel, seed: u64, size: Option<usize>) -> Result<Self> {
        let spec = kernel.spec();
        let n = size.unwrap_or(spec.default_size);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut unit = |count: usize| -> Vec<f64> {
            (0..count).map(|_| rng.random::<f32>() as f64).collect()
        };
        let (dims, data) = match kernel {
            Kernel::Jacobi => (vec![n, spec.default_iterations.unwrap()], jacobi::generate(n, &mut unit)),
            Kernel::Knn => {
                let (d, k) = (knn::DIMS, knn::K.min(n.max(1)));
                (vec![n, d, k], signed(unit(n * d + d)))
            }
            Kernel::Pca => {
                let (d, c) = (pca::DIMS, pca::COMPONENTS);
                (vec![n, d, c, spec.default_iterations.unwrap()], signed(unit(n * d)))
            }
            Kernel::Dwt => (vec![n], signed(unit(n))),
            Kernel::Svm => (vec![n, svm::FEATURES], svm::generate(n, svm::FEATURES, &mut unit)),
            Kernel::Conv => (vec![n, conv::TAPS], conv::generate(n, &mut unit)),
        };
        Self::new(kernel, dims, data)
    }

    /// Replace the iteration count of JACOBI or PCA.
    pub fn with_iterations(mut self, iterations: usize) -> Result<Self> {
        let slot = match self.kernel {
            Kernel::Jacobi => 1,
            Kernel::Pca => 3,
            k => {
                return Err(Error::InvalidInput {
                    kernel: k.name(),
                    reason: "kernel has no iteration count".into(),
                })
            }
        };
        self.dims[slot] = iterations;
        Self::new(self.kernel, self.dims, self.data)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn output_len(&self) -> usize {
        self.kernel.spec().output_len(&self.dims)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 8 * (self.dims.len() + self.data.len()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        let mut name = [0u8; 8];
        name[..self.kernel.name().len()].copy_from_slice(self.kernel.name().as_bytes());
        out.extend_from_slice(&name);
        out.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        out.extend_from_slice(&(self.data.len() as u64).to_le_bytes());
        for &x in &self.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::parse(0, "not a kernel input file"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::parse(0, format!("unsupported input version {version}")));
        }
        let name = r.take(8)?;
        let name = std::str::from_utf8(name)
            .map_err(|_| Error::parse(0, "kernel name is not ASCII"))?
            .trim_end_matches('\0');
        let kernel: Kernel = name.parse()?;
        let ndims = r.u32()? as usize;
        if ndims > 16 {
            return Err(Error::parse(0, format!("implausible dim count {ndims}")));
        }
        let dims = (0..ndims)
            .map(|_| r.u64().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let count = r.u64()? as usize;
        if count > (bytes.len() - r.pos) / 8 {
            return Err(Error::parse(0, "payload truncated"));
        }
        let data = (0..count)
            .map(|_| r.u64().map(f64::from_bits))
            .collect::<Result<Vec<_>>>()?;
        if r.pos != bytes.len() {
            return Err(Error::parse(0, "trailing bytes after payload"));
        }
        Self::new(kernel, dims, data)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::parse(0, "unexpected end of input file"))?;
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Map [0,1) to [-1,1), staying binary32-exact.
fn signed(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| (2.0 * x as f32 - 1.0) as f64).collect()
}

/// Kernel results, decoded exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOutput {
    pub values: Vec<f64>,
}

impl KernelOutput {
    pub fn from_nums(nums: &[FlexNum]) -> Self {
        KernelOutput {
            values: nums.iter().map(|x| x.to_f64()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    /// One value per line, shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in &self.values {
            s.push_str(&format_value(*x));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(i + 1, format!("not a number: `{}`", l.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelOutput { values })
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

/// Run `input` under `config`, recording events into `ctx`.
pub fn run_kernel(input: &KernelInput, config: &KernelConfig, ctx: &mut StatsContext) -> Result<KernelOutput> {
    if config.kernel != input.kernel {
        return Err(Error::InvalidInput {
            kernel: input.kernel.name(),
            reason: format!("config is for {}", config.kernel),
        });
    }
    let mut ex = Exec::new(&config.formats, ctx);
    let out = match input.kernel {
        Kernel::Jacobi => jacobi::run(&mut ex, &input.dims, &input.data)?,
        Kernel::Knn => knn::run(&mut ex, &input.dims, &input.data)?,
        Kernel::Pca => pca::run(&mut ex, &input.dims, &input.data)?,
        Kernel::Dwt => dwt::run(&mut ex, &input.dims, &input.data)?,
        Kernel::Svm => svm::run(&mut ex, &input.dims, &input.data)?,
        Kernel::Conv => conv::run(&mut ex, &input.dims, &input.data)?,
    };
    debug_assert_eq!(out.len(), input.output_len());
    Ok(KernelOutput::from_nums(&out))
}

/// Run without keeping stats.
pub fn evaluate(input: &KernelInput, config: &KernelConfig) -> Result<KernelOutput> {
    run_kernel(input, config, &mut StatsContext::new())
}

/// The all-binary32 output.
pub fn reference_output(input: &KernelInput) -> Result<KernelOutput> {
    evaluate(input, &KernelConfig::binary32(input.kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_kernels() {
        let specs = list_kernels();
        assert_eq!(specs.len(), 6);
        let conv = Kernel::Conv.spec();
        assert!(conv.var_index("weights").is_some());
        assert_eq!(conv::TAPS, 5);
        assert!(Kernel::Knn.spec().var_index("acc").is_some());
        assert_eq!("knn".parse::<Kernel>().unwrap(), Kernel::Knn);
        assert!(matches!("fft".parse::<Kernel>(), Err(Error::UnknownKernel(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        for k in Kernel::ALL {
            let a = KernelInput::generate(k, 7, None).unwrap();
            let b = KernelInput::generate(k, 7, None).unwrap();
            let c = KernelInput::generate(k, 8, None).unwrap();
            assert_eq!(a, b);
            assert_ne!(a.data, c.data);
            assert!(a.data.iter().all(|&x| x as f32 as f64 == x));
        }
    }

    #[test]
    fn input_bytes_round_trip() {
        for k in Kernel::ALL {
            let a = KernelInput::generate(k, 3, None).unwrap();
            let bytes = a.to_bytes();
            assert_eq!(KernelInput::from_bytes(&bytes).unwrap(), a);
            assert!(KernelInput::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
        assert!(KernelInput::from_bytes(b"nope").is_err());
    }

    #[test]
    fn output_shape_is_config_independent() {
        for k in Kernel::ALL {
            let input = KernelInput::generate(k, 1, None).unwrap();
            let r = reference_output(&input).unwrap();
            assert_eq!(r.len(), input.output_len(), "{k}");
            assert!(r.is_finite(), "{k}");
            let low = evaluate(&input, &KernelConfig::uniform(k, FloatFormat::BINARY8)).unwrap();
            assert_eq!(low.len(), r.len());
        }
    }

    #[test]
    fn binding_errors() {
        let ts = TypeSystem::v2();
        let err = KernelConfig::from_precisions(Kernel::Conv, &[8, 8], &ts).unwrap_err();
        assert_eq!(err.to_string(), "variable `acc` has no precision binding");
        assert!(KernelConfig::from_precisions(Kernel::Conv, &[8; 5], &ts).is_err());
        assert!(KernelConfig::from_precisions(Kernel::Conv, &[8; 4], &ts).is_ok());
    }

    #[test]
    fn output_text_round_trips() {
        let out = KernelOutput {
            values: vec![0.1, -0.0, 1e-40, 57344.0, 1.0 / 3.0],
        };
        let back = KernelOutput::parse(&out.to_text()).unwrap();
        for (a, b) in out.values.iter().zip(&back.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(KernelInput::generate(Kernel::Dwt, 0, Some(7)).is_err());
        assert!(KernelInput::generate(Kernel::Conv, 0, Some(1000)).is_err());
        assert!(KernelInput::new(Kernel::Dwt, vec![2], vec![1.0, f64::NAN]).is_err());
        assert!(KernelInput::generate(Kernel::Svm, 0, None).unwrap().with_iterations(3).is_err());
    }
}
