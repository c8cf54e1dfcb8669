//! Transprecision floating-point toolkit.
//!
//! - [`float`]: parameterized minifloat formats with correctly rounded arithmetic
//! - [`formats`]: named formats and precision-to-format type systems
//! - [`stats`]: per-format operation, cast and memory-access counting
//! - [`kernels`]: six benchmark kernels with per-variable formats
//! - [`tuner`]: per-variable precision minimization under a quality threshold
//! - [`cost`]: cycles, memory accesses and energy of a transprecision FPU
//! - [`report`]: the key/value text format shared by all reports and tables

pub mod cost;
mod error;
pub mod float;
pub mod formats;
pub mod kernels;
pub mod report;
pub mod stats;
pub mod tuner;

pub use error::{Error, Result};
pub use float::{FlexNum, FloatFormat, FpClass};
pub use formats::{FormatMap, NamedFormat, TypeSystem};
pub use kernels::{Kernel, KernelConfig, KernelInput, KernelOutput, KernelSpec};
pub use stats::{OpKind, RegionTag, StatsContext, StatsReport};
pub use tuner::{PrecisionAssignment, QualityThreshold, TuningResult};
