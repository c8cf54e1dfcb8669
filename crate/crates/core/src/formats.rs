//! Named storage formats and type systems mapping precision to formats.
//!
//! A [`FormatMap`] partitions precision bits `(0, 24]` into intervals, each
//! with an exponent width. A tuned precision `p` becomes the format
//! `(exp_bits(p), p - 1)`; [`TypeSystem::classify_precision`] then picks the
//! narrowest named storage type that holds it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::float::FloatFormat;

/// Largest precision (in bits, implicit bit included) a map covers.
pub const MAX_PRECISION: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedFormat {
    Binary8,
    Binary16,
    Binary16Alt,
    Binary32,
}

impl NamedFormat {
    /// In storage-width order, matching the usual report column order.
    pub const ALL: [NamedFormat; 4] = [
        NamedFormat::Binary8,
        NamedFormat::Binary16,
        NamedFormat::Binary16Alt,
        NamedFormat::Binary32,
    ];

    pub fn format(self) -> FloatFormat {
        match self {
            NamedFormat::Binary8 => FloatFormat::BINARY8,
            NamedFormat::Binary16 => FloatFormat::BINARY16,
            NamedFormat::Binary16Alt => FloatFormat::BINARY16ALT,
            NamedFormat::Binary32 => FloatFormat::BINARY32,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedFormat::Binary8 => "binary8",
            NamedFormat::Binary16 => "binary16",
            NamedFormat::Binary16Alt => "binary16alt",
            NamedFormat::Binary32 => "binary32",
        }
    }

    pub fn of(format: FloatFormat) -> Option<NamedFormat> {
        NamedFormat::ALL.into_iter().find(|n| n.format() == format)
    }
}

impl fmt::Display for NamedFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered `(p_max, exp_bits)` entries partitioning `(0, 24]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatMap {
    entries: Vec<(u32, u32)>,
}

impl FormatMap {
    pub fn new(entries: Vec<(u32, u32)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::parse(0, "format map is empty"));
        }
        let mut prev = 0;
        for (i, &(p_max, exp_bits)) in entries.iter().enumerate() {
            if p_max <= prev {
                return Err(Error::parse(i + 1, format!("bound {p_max} is not above {prev}")));
            }
            if !(2..=11).contains(&exp_bits) {
                return Err(Error::parse(i + 1, format!("exponent width {exp_bits} outside 2..=11")));
            }
            prev = p_max;
        }
        if prev != MAX_PRECISION {
            return Err(Error::parse(
                entries.len(),
                format!("last bound is {prev}, must be {MAX_PRECISION}"),
            ));
        }
        Ok(FormatMap { entries })
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Exponent width for precision `p`.
    pub fn exp_bits(&self, p: u32) -> Result<u32> {
        check_precision(p)?;
        Ok(self
            .entries
            .iter()
            .find(|&&(p_max, _)| p <= p_max)
            .map(|&(_, e)| e)
            .expect("map covers (0, 24]"))
    }

    /// Parse the `p_max exp_bits` per line text format. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = |what: &str| -> Result<u32> {
                it.next()
                    .ok_or_else(|| Error::parse(i + 1, format!("missing {what}")))?
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad {what} in `{line}`")))
            };
            let p_max = next("precision bound")?;
            let e = next("exponent width")?;
            if it.next().is_some() {
                return Err(Error::parse(i + 1, "expected two fields"));
            }
            entries.push((p_max, e));
        }
        FormatMap::new(entries)
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(p, e)| format!("{p} {e}\n")).collect()
    }
}

fn check_precision(p: u32) -> Result<()> {
    if !(1..=MAX_PRECISION).contains(&p) {
        return Err(Error::OutOfRange {
            what: "precision bits",
            value: p as i64,
            allowed: "1..=24",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeSystemName {
    V1,
    V2,
    Custom,
}

/// A named precision map. V1 offers binary8/binary16/binary32; V2 adds binary16alt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSystem {
    pub name: TypeSystemName,
    pub map: FormatMap,
}

impl TypeSystem {
    pub fn v1() -> Self {
        TypeSystem {
            name: TypeSystemName::V1,
            map: FormatMap::new(vec![(3, 5), (11, 5), (24, 8)]).unwrap(),
        }
    }

    pub fn v2() -> Self {
        TypeSystem {
            name: TypeSystemName::V2,
            map: FormatMap::new(vec![(3, 5), (8, 8), (11, 5), (24, 8)]).unwrap(),
        }
    }

    pub fn custom(map: FormatMap) -> Self {
        TypeSystem {
            name: TypeSystemName::Custom,
            map,
        }
    }

    /// Format explored for a variable tuned to `p` bits.
    ///
    /// One explicit mantissa bit is the minimum a format can carry (NaN needs
    /// a nonzero mantissa), so `p = 1` yields the same format as `p = 2`.
    pub fn map_precision(&self, p: u32) -> Result<FloatFormat> {
        let e = self.map.exp_bits(p)?;
        FloatFormat::new(e, (p - 1).max(1))
    }

    /// Narrowest named storage type with the mapped exponent width and at
    /// least `p - 1` mantissa bits.
    pub fn classify_precision(&self, p: u32) -> Result<NamedFormat> {
        let e = self.map.exp_bits(p)?;
        let need = p - 1;
        NamedFormat::ALL
            .into_iter()
            .filter(|n| n.format().exp_bits() == e && n.format().man_bits() >= need)
            .min_by_key(|n| (n.format().width(), n.format().man_bits()))
            .ok_or(Error::NoNamedFormat {
                exp_bits: e,
                man_bits: need,
            })
    }

    pub fn label(&self) -> &'static str {
        match self.name {
            TypeSystemName::V1 => "v1",
            TypeSystemName::V2 => "v2",
            TypeSystemName::Custom => "custom",
        }
    }
}

impl FromStr for TypeSystem {
    type Err = Error;

    /// `v1` or `v2`; custom maps are loaded from files by the caller.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(TypeSystem::v1()),
            "v2" => Ok(TypeSystem::v2()),
            other => Err(Error::parse(0, format!("unknown type system `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v2_mapping() {
        let ts = TypeSystem::v2();
        assert_eq!(ts.map_precision(3).unwrap(), FloatFormat::BINARY8);
        assert_eq!(ts.map_precision(8).unwrap(), FloatFormat::BINARY16ALT);
        assert_eq!(ts.map_precision(11).unwrap(), FloatFormat::BINARY16);
        assert_eq!(ts.map_precision(24).unwrap(), FloatFormat::BINARY32);
        assert_eq!(ts.map_precision(4).unwrap(), FloatFormat::new(8, 3).unwrap());
        assert_eq!(ts.map_precision(1).unwrap(), ts.map_precision(2).unwrap());
        assert!(ts.map_precision(0).is_err());
        assert!(ts.map_precision(25).is_err());
    }

    #[test]
    fn v2_classification() {
        let ts = TypeSystem::v2();
        assert_eq!(ts.classify_precision(4).unwrap(), NamedFormat::Binary16Alt);
        assert_eq!(ts.classify_precision(9).unwrap(), NamedFormat::Binary16);
        assert_eq!(ts.classify_precision(12).unwrap(), NamedFormat::Binary32);
        assert_eq!(ts.classify_precision(1).unwrap(), NamedFormat::Binary8);
    }

    #[test]
    fn v1_classification() {
        let ts = TypeSystem::v1();
        assert_eq!(ts.classify_precision(4).unwrap(), NamedFormat::Binary16);
        assert_eq!(ts.classify_precision(8).unwrap(), NamedFormat::Binary16);
        assert_eq!(ts.classify_precision(3).unwrap(), NamedFormat::Binary8);
        assert_eq!(ts.classify_precision(20).unwrap(), NamedFormat::Binary32);
    }

    #[test]
    fn v2_never_wider_than_v1() {
        for p in 1..=24 {
            let w1 = TypeSystem::v1().classify_precision(p).unwrap().format().width();
            let w2 = TypeSystem::v2().classify_precision(p).unwrap().format().width();
            assert!(w2 <= w1, "p={p}");
        }
    }

    #[test]
    fn named_formats_round_trip() {
        for ts in [TypeSystem::v1(), TypeSystem::v2()] {
            for n in NamedFormat::ALL {
                if ts.name == TypeSystemName::V1 && n == NamedFormat::Binary16Alt {
                    continue;
                }
                assert_eq!(ts.classify_precision(n.format().precision()).unwrap(), n);
            }
        }
    }

    #[test]
    fn mantissa_monotone_in_precision() {
        let ts = TypeSystem::v2();
        for p in 1..24 {
            let (a, b) = (ts.map_precision(p).unwrap(), ts.map_precision(p + 1).unwrap());
            assert!(a.man_bits() <= b.man_bits());
        }
    }

    #[test]
    fn map_file_parsing() {
        let m = FormatMap::parse("# v2\n3 5\n8 8\n11 5\n\n24 8\n").unwrap();
        assert_eq!(m, TypeSystem::v2().map);
        assert_eq!(FormatMap::parse(&m.to_text()).unwrap(), m);
        assert!(FormatMap::parse("3 5\n2 8\n24 8").is_err());
        assert!(FormatMap::parse("3 5\n11 5").is_err());
        assert!(FormatMap::parse("24 1").is_err());
        assert!(FormatMap::parse("24").is_err());
    }

    #[test]
    fn custom_map_without_named_storage() {
        let ts = TypeSystem::custom(FormatMap::new(vec![(24, 6)]).unwrap());
        assert_eq!(ts.map_precision(10).unwrap(), FloatFormat::new(6, 9).unwrap());
        assert!(matches!(ts.classify_precision(10), Err(Error::NoNamedFormat { .. })));
    }
}
