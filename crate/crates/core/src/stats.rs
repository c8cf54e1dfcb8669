//! Dynamic operation, cast and memory-access counting.
//!
//! Kernels report every executed event to a [`StatsContext`]. Events inside
//! a [`RegionTag::Vectorizable`] region are buffered until the region closes.
//! A vectorizable region whose arithmetic ran in more than one format cannot
//! map onto a single SIMD slice, so its events are filed as scalar instead.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::float::FloatFormat;
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Cmp,
    CastFp,
    CastToInt,
    CastFromInt,
    Load,
    Store,
}

impl OpKind {
    pub const ALL: [OpKind; 11] = [
        OpKind::Add,
        OpKind::Sub,
        OpKind::Mul,
        OpKind::Div,
        OpKind::Sqrt,
        OpKind::Cmp,
        OpKind::CastFp,
        OpKind::CastToInt,
        OpKind::CastFromInt,
        OpKind::Load,
        OpKind::Store,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Add => "add",
            OpKind::Sub => "sub",
            OpKind::Mul => "mul",
            OpKind::Div => "div",
            OpKind::Sqrt => "sqrt",
            OpKind::Cmp => "cmp",
            OpKind::CastFp => "castfp",
            OpKind::CastToInt => "casttoint",
            OpKind::CastFromInt => "castfromint",
            OpKind::Load => "load",
            OpKind::Store => "store",
        }
    }

    /// Arithmetic and comparison executed in a single FP format.
    pub fn is_arith(self) -> bool {
        matches!(
            self,
            OpKind::Add | OpKind::Sub | OpKind::Mul | OpKind::Div | OpKind::Sqrt | OpKind::Cmp
        )
    }

    pub fn is_conversion(self) -> bool {
        matches!(self, OpKind::CastFp | OpKind::CastToInt | OpKind::CastFromInt)
    }

    pub fn is_memory(self) -> bool {
        matches!(self, OpKind::Load | OpKind::Store)
    }
}

impl FromStr for OpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown op kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionTag {
    Scalar,
    Vectorizable,
}

impl RegionTag {
    pub fn name(self) -> &'static str {
        match self {
            RegionTag::Scalar => "scalar",
            RegionTag::Vectorizable => "vector",
        }
    }
}

impl FromStr for RegionTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(RegionTag::Scalar),
            "vector" => Ok(RegionTag::Vectorizable),
            _ => Err(Error::parse(0, format!("unknown region `{s}`"))),
        }
    }
}

/// What an event operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    /// Arithmetic, comparison and int conversions: the FP format involved.
    Fp(FloatFormat),
    /// FP-to-FP conversion.
    Cast { from: FloatFormat, to: FloatFormat },
    /// Load or store of an element of the given storage width in bits.
    Mem { width: u32 },
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Fp(x) => write!(f, "{x}"),
            Operand::Cast { from, to } => write!(f, "{from}>{to}"),
            Operand::Mem { width } => write!(f, "w{width}"),
        }
    }
}

impl FromStr for Operand {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(w) = s.strip_prefix('w') {
            let width = w
                .parse()
                .map_err(|_| Error::parse(0, format!("bad width `{s}`")))?;
            return Ok(Operand::Mem { width });
        }
        if let Some((a, b)) = s.split_once('>') {
            return Ok(Operand::Cast {
                from: a.parse()?,
                to: b.parse()?,
            });
        }
        Ok(Operand::Fp(s.parse()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventKey {
    pub kind: OpKind,
    pub operand: Operand,
    pub region: RegionTag,
}

impl EventKey {
    pub fn new(kind: OpKind, operand: Operand, region: RegionTag) -> Result<Self> {
        let ok = match operand {
            Operand::Fp(_) => kind.is_arith() || matches!(kind, OpKind::CastToInt | OpKind::CastFromInt),
            Operand::Cast { .. } => kind == OpKind::CastFp,
            Operand::Mem { .. } => kind.is_memory(),
        };
        if !ok {
            return Err(Error::parse(0, format!("{} cannot apply to {operand}", kind.name())));
        }
        Ok(EventKey {
            kind,
            operand,
            region,
        })
    }

    pub fn op(kind: OpKind, format: FloatFormat, region: RegionTag) -> Self {
        EventKey::new(kind, Operand::Fp(format), region).expect("arithmetic kind")
    }

    pub fn cast(from: FloatFormat, to: FloatFormat, region: RegionTag) -> Self {
        EventKey::new(OpKind::CastFp, Operand::Cast { from, to }, region).unwrap()
    }

    pub fn mem(kind: OpKind, width: u32, region: RegionTag) -> Self {
        EventKey::new(kind, Operand::Mem { width }, region).expect("memory kind")
    }

    fn text(&self) -> String {
        format!("{}.{}.{}", self.kind.name(), self.operand, self.region.name())
    }
}

/// Event counts keyed by kind, operand and region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatsReport {
    counts: BTreeMap<EventKey, u64>,
}

impl StatsReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &EventKey) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn add(&mut self, key: EventKey, n: u64) {
        if n > 0 {
            *self.counts.entry(key).or_insert(0) += n;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EventKey, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn total_where(&self, pred: impl Fn(&EventKey) -> bool) -> u64 {
        self.iter().filter(|(k, _)| pred(k)).map(|(_, n)| n).sum()
    }

    /// Arithmetic and comparison operations, casts excluded.
    pub fn fp_ops(&self) -> u64 {
        self.total_where(|k| k.kind.is_arith())
    }

    pub fn casts(&self) -> u64 {
        self.total_where(|k| k.kind.is_conversion())
    }

    pub fn memory(&self) -> u64 {
        self.total_where(|k| k.kind.is_memory())
    }

    /// Pointwise sum.
    pub fn merge(&self, other: &StatsReport) -> StatsReport {
        let mut out = self.clone();
        for (k, n) in other.iter() {
            out.add(*k, n);
        }
        out
    }

    /// Write counts under `count.<kind>.<operand>.<region>`.
    pub fn write_to(&self, report: &mut Report) {
        report.set("total", self.total());
        for (k, n) in self.iter() {
            report.set(format!("count.{}", k.text()), n);
        }
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("stats");
        self.write_to(&mut r);
        r
    }

    pub fn from_report(report: &Report) -> Result<Self> {
        let mut out = StatsReport::new();
        for (key, value) in report.section("count") {
            let mut parts = key.split('.');
            let (Some(kind), Some(operand), Some(region), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::parse(0, format!("bad count key `{key}`")));
            };
            let n: u64 = value
                .parse()
                .map_err(|_| Error::parse(0, format!("bad count `{value}`")))?;
            out.add(EventKey::new(kind.parse()?, operand.parse()?, region.parse()?)?, n);
        }
        if let Some(total) = report.get("total") {
            if total.parse::<u64>().ok() != Some(out.total()) {
                return Err(Error::parse(0, format!("total {total} disagrees with counts")));
            }
        }
        Ok(out)
    }
}

#[derive(Debug)]
struct OpenRegion {
    tag: RegionTag,
    events: Vec<(OpKind, Operand, u64)>,
    arith_format: Option<FloatFormat>,
    mixed: bool,
}

/// Per-evaluation event sink. Not shared between evaluations.
#[derive(Debug, Default)]
pub struct StatsContext {
    counts: HashMap<EventKey, u64>,
    open: Option<OpenRegion>,
}

impl StatsContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Region new events are attributed to.
    pub fn region(&self) -> RegionTag {
        self.open.as_ref().map_or(RegionTag::Scalar, |r| r.tag)
    }

    pub fn record(&mut self, kind: OpKind, operand: Operand) {
        self.record_n(kind, operand, 1);
    }

    pub fn record_n(&mut self, kind: OpKind, operand: Operand, n: u64) {
        debug_assert!(EventKey::new(kind, operand, RegionTag::Scalar).is_ok());
        match &mut self.open {
            Some(r) if r.tag == RegionTag::Vectorizable => {
                if kind.is_arith() {
                    if let Operand::Fp(f) = operand {
                        match r.arith_format {
                            None => r.arith_format = Some(f),
                            Some(g) if g != f => r.mixed = true,
                            _ => {}
                        }
                    }
                }
                match r.events.iter_mut().find(|(k, o, _)| *k == kind && *o == operand) {
                    Some(slot) => slot.2 += n,
                    None => r.events.push((kind, operand, n)),
                }
            }
            _ => {
                let key = EventKey {
                    kind,
                    operand,
                    region: RegionTag::Scalar,
                };
                *self.counts.entry(key).or_insert(0) += n;
            }
        }
    }

    pub fn enter_region(&mut self, tag: RegionTag) -> Result<()> {
        if self.open.is_some() {
            return Err(Error::RegionImbalance("regions cannot nest"));
        }
        self.open = Some(OpenRegion {
            tag,
            events: Vec::new(),
            arith_format: None,
            mixed: false,
        });
        Ok(())
    }

    pub fn exit_region(&mut self) -> Result<()> {
        let r = self
            .open
            .take()
            .ok_or(Error::RegionImbalance("exit without a matching enter"))?;
        let region = if r.tag == RegionTag::Vectorizable && !r.mixed {
            RegionTag::Vectorizable
        } else {
            RegionTag::Scalar
        };
        for (kind, operand, n) in r.events {
            *self
                .counts
                .entry(EventKey {
                    kind,
                    operand,
                    region,
                })
                .or_insert(0) += n;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<StatsReport> {
        if self.open.is_some() {
            return Err(Error::RegionImbalance("region still open at end of run"));
        }
        let mut out = StatsReport::new();
        for (k, n) in self.counts {
            out.add(k, n);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B8: FloatFormat = FloatFormat::BINARY8;
    const B16: FloatFormat = FloatFormat::BINARY16;

    #[test]
    fn fresh_context_is_empty() {
        assert!(StatsContext::new().finish().unwrap().is_empty());
    }

    #[test]
    fn vector_region_event() {
        let mut ctx = StatsContext::new();
        ctx.enter_region(RegionTag::Vectorizable).unwrap();
        ctx.record(OpKind::Add, Operand::Fp(B8));
        ctx.exit_region().unwrap();
        let r = ctx.finish().unwrap();
        assert_eq!(r.get(&EventKey::op(OpKind::Add, B8, RegionTag::Vectorizable)), 1);
        assert_eq!(r.total(), 1);
    }

    #[test]
    fn mixed_format_region_is_demoted() {
        let mut ctx = StatsContext::new();
        ctx.enter_region(RegionTag::Vectorizable).unwrap();
        ctx.record(OpKind::Add, Operand::Fp(B8));
        ctx.record(OpKind::Mul, Operand::Fp(B16));
        ctx.record(OpKind::Load, Operand::Mem { width: 8 });
        ctx.exit_region().unwrap();
        let r = ctx.finish().unwrap();
        assert_eq!(r.total_where(|k| k.region == RegionTag::Vectorizable), 0);
        assert_eq!(r.get(&EventKey::mem(OpKind::Load, 8, RegionTag::Scalar)), 1);
    }

    #[test]
    fn casts_do_not_demote() {
        let mut ctx = StatsContext::new();
        ctx.enter_region(RegionTag::Vectorizable).unwrap();
        ctx.record(OpKind::CastFp, Operand::Cast { from: B8, to: B16 });
        ctx.record(OpKind::Add, Operand::Fp(B16));
        ctx.exit_region().unwrap();
        let r = ctx.finish().unwrap();
        assert_eq!(r.total_where(|k| k.region == RegionTag::Vectorizable), 2);
    }

    #[test]
    fn region_balance() {
        let mut ctx = StatsContext::new();
        assert!(matches!(ctx.exit_region(), Err(Error::RegionImbalance(_))));
        ctx.enter_region(RegionTag::Scalar).unwrap();
        assert!(ctx.enter_region(RegionTag::Vectorizable).is_err());
        ctx.exit_region().unwrap();
        ctx.enter_region(RegionTag::Vectorizable).unwrap();
        assert!(ctx.finish().is_err());
    }

    #[test]
    fn merge_laws() {
        let mut a = StatsReport::new();
        a.add(EventKey::op(OpKind::Add, B8, RegionTag::Scalar), 1);
        let mut b = StatsReport::new();
        b.add(EventKey::mem(OpKind::Store, 16, RegionTag::Vectorizable), 1);
        assert_eq!(a.merge(&StatsReport::new()), a);
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b).total(), 2);
    }

    #[test]
    fn report_round_trip() {
        let mut a = StatsReport::new();
        a.add(EventKey::op(OpKind::Sqrt, B8, RegionTag::Scalar), 3);
        a.add(EventKey::cast(B8, B16, RegionTag::Vectorizable), 5);
        a.add(EventKey::mem(OpKind::Load, 16, RegionTag::Vectorizable), 7);
        a.add(EventKey::op(OpKind::CastToInt, B16, RegionTag::Scalar), 1);
        let text = a.to_report().to_string();
        assert!(text.contains("count.castfp.e5m2>e5m10.vector = 5"));
        let back = StatsReport::from_report(&Report::parse(&text).unwrap()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn inconsistent_keys_rejected() {
        assert!(EventKey::new(OpKind::Load, Operand::Fp(B8), RegionTag::Scalar).is_err());
        assert!(EventKey::new(OpKind::Add, Operand::Mem { width: 8 }, RegionTag::Scalar).is_err());
        let bad = Report::parse("# transprec stats v1\ntotal = 9\ncount.add.e5m2.scalar = 1\n").unwrap();
        assert!(StatsReport::from_report(&bad).is_err());
    }
}
