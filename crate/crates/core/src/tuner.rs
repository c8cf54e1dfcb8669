//! Per-variable precision tuning against an output-quality threshold.
//!
//! The search works on precision bits (implicit bit included) per variable
//! group. Bits map to formats through a [`TypeSystem`].
//!
//! Single input: each group in declaration order is binary searched from its
//! current value down to 1, every accepted step having been verified. A
//! descent loop then lowers any group whose single decrement still passes,
//! until none does, so the result is 1-minimal.
//!
//! Several inputs: the per-input results are joined by pointwise maximum,
//! then groups are raised one bit at a time until every input passes. Each
//! step picks the group whose increment gives the lowest worst-case metric,
//! ties going to the earlier group.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formats::{NamedFormat, TypeSystem, MAX_PRECISION};
use crate::kernels::{evaluate, reference_output, Kernel, KernelConfig, KernelInput, KernelOutput};
use crate::report::Report;

/// Relative noise power `Σ(r−t)² / Σr²`.
///
/// Infinite when `test` is non-finite where `reference` is finite.
pub fn error_metric(reference: &KernelOutput, test: &KernelOutput) -> Result<f64> {
    if reference.len() != test.len() {
        return Err(Error::LengthMismatch {
            reference: reference.len(),
            test: test.len(),
        });
    }
    let mut noise = 0.0f64;
    let mut signal = 0.0f64;
    for (&r, &t) in reference.values.iter().zip(&test.values) {
        if !r.is_finite() {
            if r.to_bits() != t.to_bits() && !(r.is_nan() && t.is_nan()) {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        if !t.is_finite() {
            return Ok(f64::INFINITY);
        }
        noise += (r - t) * (r - t);
        signal += r * r;
    }
    if noise == 0.0 {
        Ok(0.0)
    } else if signal == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(noise / signal)
    }
}

/// Upper bound on [`error_metric`]. Positive; may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityThreshold(f64);

impl QualityThreshold {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::InvalidThreshold(t));
        }
        Ok(QualityThreshold(t))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn passes(self, metric: f64) -> bool {
        metric <= self.0
    }
}

impl fmt::Display for QualityThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Precision bits per variable group, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrecisionAssignment {
    kernel: Kernel,
    bits: Vec<u32>,
}

impl PrecisionAssignment {
    pub fn new(kernel: Kernel, bits: Vec<u32>) -> Result<Self> {
        let vars = kernel.spec().vars;
        if bits.len() < vars.len() {
            return Err(Error::UnboundVariable(vars[bits.len()].name.to_string()));
        }
        if bits.len() > vars.len() {
            return Err(Error::BindingCount {
                kernel: kernel.name(),
                expected: vars.len(),
                got: bits.len(),
            });
        }
        if let Some(&p) = bits.iter().find(|&&p| !(1..=MAX_PRECISION).contains(&p)) {
            return Err(Error::OutOfRange {
                what: "precision",
                value: p as i64,
                allowed: "1..=24",
            });
        }
        Ok(PrecisionAssignment { kernel, bits })
    }

    pub fn uniform(kernel: Kernel, p: u32) -> Result<Self> {
        Self::new(kernel, vec![p; kernel.spec().vars.len()])
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn bits(&self) -> &[u32] {
        &self.bits
    }

    pub fn get(&self, var: &str) -> Option<u32> {
        self.kernel.spec().var_index(var).map(|i| self.bits[i])
    }

    /// Formats from `map_precision`.
    pub fn config(&self, ts: &TypeSystem) -> Result<KernelConfig> {
        KernelConfig::from_precisions(self.kernel, &self.bits, ts)
    }

    /// Named storage formats from `classify_precision`.
    pub fn storage_config(&self, ts: &TypeSystem) -> Result<KernelConfig> {
        KernelConfig::from_precisions_named(self.kernel, &self.bits, ts)
    }

    /// Pointwise maximum.
    pub fn join(&self, other: &PrecisionAssignment) -> Result<PrecisionAssignment> {
        if self.kernel != other.kernel {
            return Err(Error::InvalidInput {
                kernel: self.kernel.name(),
                reason: format!("cannot join with an assignment for {}", other.kernel),
            });
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| *a.max(b)).collect();
        Ok(PrecisionAssignment { kernel: self.kernel, bits })
    }

    /// One integer per line.
    pub fn to_text(&self) -> String {
        self.bits.iter().map(|p| format!("{p}\n")).collect()
    }

    /// Inverse of [`to_text`](Self::to_text). Blank lines and `#` comments are skipped.
    pub fn parse(kernel: Kernel, text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let p = line
                .parse::<u32>()
                .map_err(|_| Error::parse(i + 1, format!("expected precision bits, got `{line}`")))?;
            bits.push(p);
        }
        Self::new(kernel, bits)
    }
}

/// Per-named-format group counts, as in a type-classification table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormatCounts {
    pub counts: [usize; 4],
}

impl FormatCounts {
    pub fn get(&self, f: NamedFormat) -> usize {
        self.counts[NamedFormat::ALL.iter().position(|&g| g == f).unwrap()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl fmt::Display for FormatCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in NamedFormat::ALL {
            write!(f, "{:>12}", n.name())?;
        }
        writeln!(f)?;
        for c in self.counts {
            write!(f, "{c:>12}")?;
        }
        writeln!(f)
    }
}

/// Count variable groups per named storage type.
pub fn tabulate(assignment: &PrecisionAssignment, ts: &TypeSystem) -> Result<FormatCounts> {
    let mut out = FormatCounts::default();
    for &p in &assignment.bits {
        let named = ts.classify_precision(p)?;
        out.counts[NamedFormat::ALL.iter().position(|&g| g == named).unwrap()] += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningResult {
    pub assignment: PrecisionAssignment,
    /// Single-input results, one per input.
    pub per_input: Vec<PrecisionAssignment>,
    /// Distinct (assignment, input) evaluations performed.
    pub evaluations: u64,
    /// Metric of `assignment` on each input.
    pub metrics: Vec<f64>,
}

impl TuningResult {
    pub fn to_report(&self, ts: &TypeSystem, threshold: QualityThreshold) -> Result<Report> {
        let kernel = self.assignment.kernel;
        let mut r = Report::new("tune");
        r.set("kernel", kernel);
        r.set("type_system", ts.label());
        r.set("threshold", threshold);
        r.set("inputs", self.metrics.len());
        r.set("evaluations", self.evaluations);
        for (i, var) in kernel.spec().var_names().enumerate() {
            let p = self.assignment.bits[i];
            r.set(format!("precision.{var}"), p);
            r.set(format!("format.{var}"), ts.map_precision(p)?);
            r.set(format!("type.{var}"), ts.classify_precision(p)?);
        }
        for (i, m) in self.metrics.iter().enumerate() {
            r.set(format!("metric.{i}"), format!("{m:?}"));
        }
        for (i, a) in self.per_input.iter().enumerate() {
            let bits: Vec<String> = a.bits.iter().map(u32::to_string).collect();
            r.set(format!("single.{i}"), bits.join(" "));
        }
        let table = tabulate(&self.assignment, ts)?;
        for n in NamedFormat::ALL {
            r.set(format!("table.{}", n.name()), table.get(n));
        }
        Ok(r)
    }
}

/// Evaluates assignments on a fixed set of inputs, memoizing results.
pub struct Evaluator {
    kernel: Kernel,
    inputs: Vec<KernelInput>,
    references: Vec<KernelOutput>,
    ts: TypeSystem,
    threshold: QualityThreshold,
    cache: Mutex<HashMap<(usize, Vec<u32>), f64>>,
    evaluations: AtomicU64,
}

impl Evaluator {
    pub fn new(inputs: Vec<KernelInput>, ts: TypeSystem, threshold: QualityThreshold) -> Result<Self> {
        let kernel = inputs
            .first()
            .ok_or_else(|| Error::InvalidInput {
                kernel: "tuner",
                reason: "no tuning inputs".into(),
            })?
            .kernel();
        if let Some(other) = inputs.iter().find(|i| i.kernel() != kernel) {
            return Err(Error::InvalidInput {
                kernel: kernel.name(),
                reason: format!("mixed with an input for {}", other.kernel()),
            });
        }
        let references = inputs.par_iter().map(reference_output).collect::<Result<Vec<_>>>()?;
        for (r, input) in references.iter().zip(&inputs) {
            if !r.is_finite() {
                return Err(Error::InvalidInput {
                    kernel: input.kernel().name(),
                    reason: "binary32 reference output is not finite".into(),
                });
            }
        }
        Ok(Evaluator {
            kernel,
            inputs,
            references,
            ts,
            threshold,
            cache: Mutex::new(HashMap::new()),
            evaluations: AtomicU64::new(0),
        })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn threshold(&self) -> QualityThreshold {
        self.threshold
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Metric of `bits` on input `i`.
    pub fn metric(&self, i: usize, bits: &[u32]) -> Result<f64> {
        let key = (i, bits.to_vec());
        if let Some(&m) = self.cache.lock().unwrap().get(&key) {
            return Ok(m);
        }
        let config = KernelConfig::from_precisions(self.kernel, bits, &self.ts)?;
        let out = evaluate(&self.inputs[i], &config)?;
        let m = error_metric(&self.references[i], &out)?;
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        self.cache.lock().unwrap().insert(key, m);
        Ok(m)
    }

    pub fn passes(&self, i: usize, bits: &[u32]) -> Result<bool> {
        Ok(self.threshold.passes(self.metric(i, bits)?))
    }

    /// Worst metric over all inputs.
    pub fn worst(&self, bits: &[u32]) -> Result<f64> {
        let ms = (0..self.inputs.len())
            .into_par_iter()
            .map(|i| self.metric(i, bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(ms.into_iter().fold(0.0, f64::max))
    }

    /// Search on input `i` alone.
    pub fn tune_single(&self, i: usize) -> Result<PrecisionAssignment> {
        let groups = self.kernel.spec().vars.len();
        let mut cur = vec![MAX_PRECISION; groups];
        let m = self.metric(i, &cur)?;
        if !self.threshold.passes(m) {
            return Err(Error::Infeasible(m));
        }
        for g in 0..groups {
            let (mut lo, mut hi) = (1, cur[g]);
            while lo < hi {
                let mid = (lo + hi) / 2;
                let mut trial = cur.clone();
                trial[g] = mid;
                if self.passes(i, &trial)? {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            cur[g] = hi;
        }
        loop {
            let candidates: Vec<usize> = (0..groups).filter(|&g| cur[g] > 1).collect();
            let verdicts = candidates
                .par_iter()
                .map(|&g| {
                    let mut trial = cur.clone();
                    trial[g] -= 1;
                    self.passes(i, &trial)
                })
                .collect::<Result<Vec<_>>>()?;
            match candidates.iter().zip(verdicts).find(|(_, ok)| *ok) {
                Some((&g, _)) => cur[g] -= 1,
                None => break,
            }
        }
        PrecisionAssignment::new(self.kernel, cur)
    }

    /// Raise groups of `start` until every input passes.
    pub fn refine(&self, start: &PrecisionAssignment) -> Result<PrecisionAssignment> {
        let mut cur = start.bits.clone();
        loop {
            let worst = self.worst(&cur)?;
            if self.threshold.passes(worst) {
                return PrecisionAssignment::new(self.kernel, cur);
            }
            let candidates: Vec<usize> = (0..cur.len()).filter(|&g| cur[g] < MAX_PRECISION).collect();
            if candidates.is_empty() {
                return Err(Error::Infeasible(worst));
            }
            let scores = candidates
                .par_iter()
                .map(|&g| {
                    let mut trial = cur.clone();
                    trial[g] += 1;
                    self.worst(&trial)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut best = 0;
            for (j, s) in scores.iter().enumerate() {
                if *s < scores[best] {
                    best = j;
                }
            }
            cur[candidates[best]] += 1;
        }
    }

    /// Tune on every input, then join.
    pub fn tune(&self) -> Result<TuningResult> {
        let per_input = (0..self.inputs.len())
            .into_par_iter()
            .map(|i| self.tune_single(i))
            .collect::<Result<Vec<_>>>()?;
        let assignment = refine_across_inputs(self, &per_input)?;
        let metrics = (0..self.inputs.len())
            .map(|i| self.metric(i, &assignment.bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(TuningResult {
            assignment,
            per_input,
            evaluations: self.evaluations(),
            metrics,
        })
    }
}

/// Search a 1-minimal assignment for one input.
pub fn tune_single_input(
    input: &KernelInput,
    threshold: QualityThreshold,
    ts: &TypeSystem,
) -> Result<PrecisionAssignment> {
    Evaluator::new(vec![input.clone()], ts.clone(), threshold)?.tune_single(0)
}

/// Pointwise maximum of `assignments`, raised until all inputs pass.
pub fn refine_across_inputs(ev: &Evaluator, assignments: &[PrecisionAssignment]) -> Result<PrecisionAssignment> {
    let (first, rest) = assignments.split_first().ok_or_else(|| Error::InvalidInput {
        kernel: ev.kernel.name(),
        reason: "nothing to join".into(),
    })?;
    let mut joined = first.clone();
    for a in rest {
        joined = joined.join(a)?;
    }
    ev.refine(&joined)
}

/// Tune on several inputs and join.
pub fn tune(inputs: Vec<KernelInput>, threshold: QualityThreshold, ts: &TypeSystem) -> Result<TuningResult> {
    Evaluator::new(inputs, ts.clone(), threshold)?.tune()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(v: &[f64]) -> KernelOutput {
        KernelOutput { values: v.to_vec() }
    }

    #[test]
    fn metric_examples() {
        let r = out(&[1.0, 0.0, 0.0]);
        assert_eq!(error_metric(&r, &r).unwrap(), 0.0);
        let m = error_metric(&r, &out(&[1.1, 0.0, 0.0])).unwrap();
        assert!((m - 0.01).abs() < 1e-15);
        assert_eq!(error_metric(&r, &out(&[f64::NAN, 0.0, 0.0])).unwrap(), f64::INFINITY);
        assert_eq!(error_metric(&out(&[0.0]), &out(&[0.0])).unwrap(), 0.0);
        assert_eq!(error_metric(&out(&[0.0]), &out(&[1.0])).unwrap(), f64::INFINITY);
        assert!(matches!(
            error_metric(&r, &out(&[1.0])),
            Err(Error::LengthMismatch { reference: 3, test: 1 })
        ));
    }

    #[test]
    fn thresholds() {
        assert!(QualityThreshold::new(0.0).is_err());
        assert!(QualityThreshold::new(f64::NAN).is_err());
        let t = QualityThreshold::new(f64::INFINITY).unwrap();
        assert!(t.passes(f64::INFINITY));
        assert!(!QualityThreshold::new(1e-3).unwrap().passes(0.01));
    }

    #[test]
    fn precision_file() {
        let a = PrecisionAssignment::new(Kernel::Conv, vec![3, 8, 11, 12]).unwrap();
        assert_eq!(PrecisionAssignment::parse(Kernel::Conv, &a.to_text()).unwrap(), a);
        let short = PrecisionAssignment::parse(Kernel::Conv, "3\n# comment\n8\n").unwrap_err();
        assert_eq!(short.to_string(), "variable `acc` has no precision binding");
        assert!(PrecisionAssignment::parse(Kernel::Conv, "1\n2\n3\n4\n5\n").is_err());
        assert!(PrecisionAssignment::parse(Kernel::Conv, "1\n2\n3\n25\n").is_err());
        assert!(PrecisionAssignment::parse(Kernel::Conv, "1\nx\n3\n4\n").is_err());
    }

    #[test]
    fn join_is_pointwise_max() {
        let a = PrecisionAssignment::new(Kernel::Conv, vec![3, 8, 1, 1]).unwrap();
        let b = PrecisionAssignment::new(Kernel::Conv, vec![5, 4, 1, 2]).unwrap();
        assert_eq!(a.join(&b).unwrap().bits(), &[5, 8, 1, 2]);
    }

    #[test]
    fn tabulate_examples() {
        let v2 = TypeSystem::v2();
        let all3 = PrecisionAssignment::uniform(Kernel::Conv, 3).unwrap();
        assert_eq!(tabulate(&all3, &v2).unwrap().get(NamedFormat::Binary8), 4);
        let mixed = PrecisionAssignment::new(Kernel::Conv, vec![3, 8, 11, 12]).unwrap();
        assert_eq!(tabulate(&mixed, &v2).unwrap().counts, [1, 1, 1, 1]);
        let v1 = TypeSystem::v1();
        assert_eq!(tabulate(&mixed, &v1).unwrap().counts, [1, 2, 0, 1]);
    }
}
