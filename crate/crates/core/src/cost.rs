//! Analytical cost model of a transprecision FPU with sub-word vectors.
//!
//! Events in vectorizable regions are packed into SIMD operations over a
//! fixed-width bus (32 bits by default: four 8-bit or two 16-bit lanes).
//! Cycles, memory accesses and energy are then summed per event from
//! configurable tables.
//!
//! # Table file
//!
//! A report of kind `tables` holding these keys:
//!
//! ```text
//! # transprec tables v1
//! stall_fraction = 0
//! bus_width = 32
//! latency.<class>.<op> = <latency> <issue>   class: b8 b16 b16alt b32 b64
//!                                            op: add sub mul div sqrt cmp
//! latency.conv.<op> = <latency> <issue>      op: castfp casttoint castfromint
//! latency.mem.<op> = <latency> <issue>       op: load store
//! energy.fp.<class>.<scalar|vector> = <e>
//! energy.cast.<scalar|vector> = <e>
//! energy.mem.w<8|16|32|64>.<scalar|vector> = <e>
//! energy.other = <e>                         per stall cycle
//! ```
//!
//! An event costs `issue + stall_fraction * (latency - issue)` cycles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::float::FloatFormat;
use crate::report::Report;
use crate::stats::{EventKey, OpKind, Operand, RegionTag, StatsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormatClass {
    B8,
    B16,
    B16Alt,
    B32,
    B64,
}

impl FormatClass {
    pub const ALL: [FormatClass; 5] = [
        FormatClass::B8,
        FormatClass::B16,
        FormatClass::B16Alt,
        FormatClass::B32,
        FormatClass::B64,
    ];

    /// Hardware class an arbitrary format is stored and computed in.
    pub fn of(f: FloatFormat) -> FormatClass {
        match f.width() {
            0..=8 => FormatClass::B8,
            9..=16 if f.exp_bits() >= 8 => FormatClass::B16Alt,
            9..=16 => FormatClass::B16,
            17..=32 => FormatClass::B32,
            _ => FormatClass::B64,
        }
    }

    pub fn width(self) -> u32 {
        match self {
            FormatClass::B8 => 8,
            FormatClass::B16 | FormatClass::B16Alt => 16,
            FormatClass::B32 => 32,
            FormatClass::B64 => 64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FormatClass::B8 => "b8",
            FormatClass::B16 => "b16",
            FormatClass::B16Alt => "b16alt",
            FormatClass::B32 => "b32",
            FormatClass::B64 => "b64",
        }
    }
}

impl fmt::Display for FormatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Storage container of an element of `bits` width.
pub fn container_width(bits: u32) -> u32 {
    match bits {
        0..=8 => 8,
        9..=16 => 16,
        17..=32 => 32,
        _ => 64,
    }
}

/// Lanes per SIMD operation for a given element container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VectorLanes {
    bus_width: u32,
}

impl Default for VectorLanes {
    fn default() -> Self {
        VectorLanes { bus_width: 32 }
    }
}

impl VectorLanes {
    pub fn new(bus_width: u32) -> Result<Self> {
        if !matches!(bus_width, 8 | 16 | 32 | 64) {
            return Err(Error::OutOfRange {
                what: "bus width",
                value: bus_width as i64,
                allowed: "8, 16, 32 or 64",
            });
        }
        Ok(VectorLanes { bus_width })
    }

    pub fn bus_width(self) -> u32 {
        self.bus_width
    }

    pub fn lanes(self, element_width: u32) -> u64 {
        (self.bus_width / container_width(element_width)).max(1) as u64
    }

    /// Lanes available to an event.
    pub fn lanes_for(self, operand: &Operand) -> u64 {
        match *operand {
            Operand::Fp(f) => self.lanes(FormatClass::of(f).width()),
            Operand::Cast { from, to } => {
                let w = FormatClass::of(from).width().max(FormatClass::of(to).width());
                self.lanes(w)
            }
            Operand::Mem { width } => self.lanes(width),
        }
    }
}

/// Replace `n` vector-region events by `ceil(n / lanes)` SIMD events.
pub fn pack_vectors(r: &StatsReport, lanes: VectorLanes) -> StatsReport {
    let mut out = StatsReport::new();
    for (k, n) in r.iter() {
        let n = match k.region {
            RegionTag::Scalar => n,
            RegionTag::Vectorizable => n.div_ceil(lanes.lanes_for(&k.operand)),
        };
        out.add(*k, n);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timing {
    pub latency: u32,
    pub issue: u32,
}

/// Table key for the timing of an event.
fn latency_key(k: &EventKey) -> String {
    match k.operand {
        Operand::Fp(f) if k.kind.is_arith() => {
            format!("latency.{}.{}", FormatClass::of(f), k.kind.name())
        }
        Operand::Mem { .. } => format!("latency.mem.{}", k.kind.name()),
        _ => format!("latency.conv.{}", k.kind.name()),
    }
}

fn energy_key(k: &EventKey) -> String {
    let region = k.region.name();
    match k.operand {
        Operand::Fp(f) if k.kind.is_arith() => format!("energy.fp.{}.{region}", FormatClass::of(f)),
        Operand::Mem { width } => format!("energy.mem.w{}.{region}", container_width(width)),
        _ => format!("energy.cast.{region}"),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LatencyTable {
    entries: BTreeMap<String, Timing>,
}

impl LatencyTable {
    pub fn set(&mut self, key: impl Into<String>, latency: u32, issue: u32) -> Result<()> {
        if latency == 0 || issue == 0 || issue > latency {
            return Err(Error::OutOfRange {
                what: "latency entry",
                value: latency.min(issue) as i64,
                allowed: "1 <= issue <= latency",
            });
        }
        self.entries.insert(key.into(), Timing { latency, issue });
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<Timing> {
        self.entries
            .get(key)
            .copied()
            .ok_or_else(|| Error::MissingTableEntry(key.to_string()))
    }

    pub fn timing(&self, k: &EventKey) -> Result<Timing> {
        self.get(&latency_key(k))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTable {
    entries: BTreeMap<String, f64>,
}

impl EnergyTable {
    pub fn set(&mut self, key: impl Into<String>, e: f64) -> Result<()> {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::parse(0, format!("energy must be finite and >= 0, got {e}")));
        }
        self.entries.insert(key.into(), e);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        self.entries
            .get(key)
            .copied()
            .ok_or_else(|| Error::MissingTableEntry(key.to_string()))
    }

    pub fn energy(&self, k: &EventKey) -> Result<f64> {
        self.get(&energy_key(k))
    }
}

/// Everything [`estimate`] needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Tables {
    pub latency: LatencyTable,
    pub energy: EnergyTable,
    pub lanes: VectorLanes,
    /// Fraction of latency slots left unfilled, in [0,1].
    pub stall_fraction: f64,
}

const ARITH: [&str; 6] = ["add", "sub", "mul", "div", "sqrt", "cmp"];

impl Default for Tables {
    /// Placeholder unit energies; 1-cycle binary8 and conversions,
    /// 2-cycle pipelined 16/32/64-bit arithmetic.
    fn default() -> Self {
        Tables::parse(&default_tables_text()).expect("built-in tables parse")
    }
}

/// Text of the built-in tables.
pub fn default_tables_text() -> String {
    let mut r = Report::new("tables");
    r.set("stall_fraction", 0);
    r.set("bus_width", 32);
    for class in FormatClass::ALL {
        let lat = if class == FormatClass::B8 { 1 } else { 2 };
        for op in ARITH {
            r.set(format!("latency.{class}.{op}"), format!("{lat} 1"));
        }
    }
    for op in ["castfp", "casttoint", "castfromint"] {
        r.set(format!("latency.conv.{op}"), "1 1");
    }
    for op in ["load", "store"] {
        r.set(format!("latency.mem.{op}"), "1 1");
    }
    for region in ["scalar", "vector"] {
        for class in FormatClass::ALL {
            r.set(format!("energy.fp.{class}.{region}"), 1);
        }
        r.set(format!("energy.cast.{region}"), 1);
        for w in [8, 16, 32, 64] {
            r.set(format!("energy.mem.w{w}.{region}"), 1);
        }
    }
    r.set("energy.other", 1);
    r.to_string()
}

impl Tables {
    pub fn parse(text: &str) -> Result<Self> {
        let r = Report::parse_kind(text, "tables")?;
        let stall_fraction: f64 = r.require("stall_fraction")?;
        if !(0.0..=1.0).contains(&stall_fraction) {
            return Err(Error::parse(0, format!("stall_fraction {stall_fraction} outside [0,1]")));
        }
        let lanes = match r.get("bus_width") {
            Some(_) => VectorLanes::new(r.require("bus_width")?)?,
            None => VectorLanes::default(),
        };
        let mut latency = LatencyTable::default();
        let mut energy = EnergyTable::default();
        for (key, value) in r.entries() {
            if key.starts_with("latency.") {
                let nums: Vec<u32> = value
                    .split_whitespace()
                    .map(|s| s.parse().map_err(|_| Error::parse(0, format!("{key}: bad number `{s}`"))))
                    .collect::<Result<_>>()?;
                let [lat, issue] = nums[..] else {
                    return Err(Error::parse(0, format!("{key}: expected `<latency> <issue>`")));
                };
                latency.set(key, lat, issue)?;
            } else if key.starts_with("energy.") {
                let e: f64 = value
                    .parse()
                    .map_err(|_| Error::parse(0, format!("{key}: bad number `{value}`")))?;
                energy.set(key, e)?;
            } else if key != "stall_fraction" && key != "bus_width" {
                return Err(Error::parse(0, format!("unknown table key `{key}`")));
            }
        }
        Ok(Tables {
            latency,
            energy,
            lanes,
            stall_fraction,
        })
    }

    /// Cycles for one (packed) event.
    pub fn cycles(&self, k: &EventKey) -> Result<(f64, f64)> {
        let t = self.latency.timing(k)?;
        let stall = self.stall_fraction * (t.latency - t.issue) as f64;
        Ok((t.issue as f64 + stall, stall))
    }
}

/// Values relative to a baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub cycles: f64,
    pub memory_accesses: f64,
    pub energy: f64,
    /// Energy parts over the baseline's total energy.
    pub energy_fp_share: f64,
    pub energy_mem_share: f64,
    pub energy_other_share: f64,
    /// Cast cycles over the baseline's cycles.
    pub cast_overhead: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CostReport {
    pub cycles_fp: f64,
    pub cycles_cast: f64,
    pub cycles_mem: f64,
    /// Part of the cycles above spent in stalls.
    pub stall_cycles: f64,
    pub mem_scalar: u64,
    pub mem_vector: u64,
    /// Vector-region element accesses before packing.
    pub mem_vector_elements: u64,
    pub energy_fp: f64,
    pub energy_mem: f64,
    pub energy_other: f64,
    /// Arithmetic element operations per class, scalar and vector.
    pub ops: BTreeMap<FormatClass, (u64, u64)>,
    /// Conversion element operations, scalar and vector.
    pub casts: (u64, u64),
    pub ratios: Option<Ratios>,
}

impl CostReport {
    pub fn cycles(&self) -> f64 {
        self.cycles_fp + self.cycles_cast + self.cycles_mem
    }

    pub fn memory_accesses(&self) -> u64 {
        self.mem_scalar + self.mem_vector
    }

    pub fn energy(&self) -> f64 {
        self.energy_fp + self.energy_mem + self.energy_other
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("cost");
        r.set("cycles.total", format!("{:?}", self.cycles()));
        r.set("cycles.fp", format!("{:?}", self.cycles_fp));
        r.set("cycles.cast", format!("{:?}", self.cycles_cast));
        r.set("cycles.mem", format!("{:?}", self.cycles_mem));
        r.set("cycles.stall", format!("{:?}", self.stall_cycles));
        r.set("memory.total", self.memory_accesses());
        r.set("memory.scalar", self.mem_scalar);
        r.set("memory.vector", self.mem_vector);
        r.set("memory.vector_elements", self.mem_vector_elements);
        r.set("energy.total", format!("{:?}", self.energy()));
        r.set("energy.fp", format!("{:?}", self.energy_fp));
        r.set("energy.mem", format!("{:?}", self.energy_mem));
        r.set("energy.other", format!("{:?}", self.energy_other));
        for (class, (s, v)) in &self.ops {
            r.set(format!("ops.{class}.scalar"), s);
            r.set(format!("ops.{class}.vector"), v);
        }
        r.set("casts.scalar", self.casts.0);
        r.set("casts.vector", self.casts.1);
        if let Some(x) = &self.ratios {
            r.set("ratio.cycles", format!("{:?}", x.cycles));
            r.set("ratio.memory", format!("{:?}", x.memory_accesses));
            r.set("ratio.energy", format!("{:?}", x.energy));
            r.set("ratio.energy_fp", format!("{:?}", x.energy_fp_share));
            r.set("ratio.energy_mem", format!("{:?}", x.energy_mem_share));
            r.set("ratio.energy_other", format!("{:?}", x.energy_other_share));
            r.set("ratio.cast_overhead", format!("{:?}", x.cast_overhead));
        }
        r
    }

    pub fn from_report(r: &Report) -> Result<Self> {
        if r.kind() != "cost" {
            return Err(Error::parse(0, format!("expected a cost report, got `{}`", r.kind())));
        }
        let mut ops = BTreeMap::new();
        for class in FormatClass::ALL {
            if r.get(&format!("ops.{class}.scalar")).is_some() {
                ops.insert(
                    class,
                    (
                        r.require(&format!("ops.{class}.scalar"))?,
                        r.require(&format!("ops.{class}.vector"))?,
                    ),
                );
            }
        }
        let ratios = match r.get("ratio.cycles") {
            None => None,
            Some(_) => Some(Ratios {
                cycles: r.require("ratio.cycles")?,
                memory_accesses: r.require("ratio.memory")?,
                energy: r.require("ratio.energy")?,
                energy_fp_share: r.require("ratio.energy_fp")?,
                energy_mem_share: r.require("ratio.energy_mem")?,
                energy_other_share: r.require("ratio.energy_other")?,
                cast_overhead: r.require("ratio.cast_overhead")?,
            }),
        };
        Ok(CostReport {
            cycles_fp: r.require("cycles.fp")?,
            cycles_cast: r.require("cycles.cast")?,
            cycles_mem: r.require("cycles.mem")?,
            stall_cycles: r.require("cycles.stall")?,
            mem_scalar: r.require("memory.scalar")?,
            mem_vector: r.require("memory.vector")?,
            mem_vector_elements: r.require("memory.vector_elements")?,
            energy_fp: r.require("energy.fp")?,
            energy_mem: r.require("energy.mem")?,
            energy_other: r.require("energy.other")?,
            ops,
            casts: (r.require("casts.scalar")?, r.require("casts.vector")?),
            ratios,
        })
    }
}

/// Cost of the events in `r`.
pub fn estimate(r: &StatsReport, tables: &Tables) -> Result<CostReport> {
    let mut out = CostReport::default();
    for (k, n) in r.iter() {
        let vector = k.region == RegionTag::Vectorizable;
        if k.kind.is_arith() {
            if let Operand::Fp(f) = k.operand {
                let slot = out.ops.entry(FormatClass::of(f)).or_default();
                if vector { slot.1 += n } else { slot.0 += n }
            }
        } else if k.kind.is_conversion() {
            if vector { out.casts.1 += n } else { out.casts.0 += n }
        } else if vector {
            out.mem_vector_elements += n;
        }
    }
    let packed = pack_vectors(r, tables.lanes);
    for (k, n) in packed.iter() {
        let (cycles, stall) = tables.cycles(k)?;
        let energy = tables.energy.energy(k)?;
        let (cycles, stall, energy) = (cycles * n as f64, stall * n as f64, energy * n as f64);
        out.stall_cycles += stall;
        match k.kind {
            OpKind::Load | OpKind::Store => {
                out.cycles_mem += cycles;
                out.energy_mem += energy;
                match k.region {
                    RegionTag::Scalar => out.mem_scalar += n,
                    RegionTag::Vectorizable => out.mem_vector += n,
                }
            }
            kind if kind.is_conversion() => {
                out.cycles_cast += cycles;
                out.energy_fp += energy;
            }
            _ => {
                out.cycles_fp += cycles;
                out.energy_fp += energy;
            }
        }
    }
    if out.stall_cycles > 0.0 {
        out.energy_other = out.stall_cycles * tables.energy.get("energy.other")?;
    }
    Ok(out)
}

/// Attach ratios of `test` against `baseline`.
pub fn normalize(test: &CostReport, baseline: &CostReport) -> Result<CostReport> {
    let cycles = baseline.cycles();
    let mem = baseline.memory_accesses() as f64;
    let energy = baseline.energy();
    if cycles <= 0.0 {
        return Err(Error::DivisionByZeroBaseline("cycles"));
    }
    if mem <= 0.0 {
        return Err(Error::DivisionByZeroBaseline("memory accesses"));
    }
    if energy <= 0.0 {
        return Err(Error::DivisionByZeroBaseline("energy"));
    }
    let mut out = test.clone();
    out.ratios = Some(Ratios {
        cycles: test.cycles() / cycles,
        memory_accesses: test.memory_accesses() as f64 / mem,
        energy: test.energy() / energy,
        energy_fp_share: test.energy_fp / energy,
        energy_mem_share: test.energy_mem / energy,
        energy_other_share: test.energy_other / energy,
        cast_overhead: test.cycles_cast / cycles,
    });
    Ok(out)
}

impl FromStr for Tables {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Tables::parse(s)
    }
}
