//! Self-describing key/value text used for every machine-readable artifact.
//!
//! ```text
//! # transprec stats v1
//! kernel = conv
//! count.mul.e8m23.scalar = 25600
//! ```
//!
//! The header names the report kind and format version. Keys are unique and
//! kept in insertion order; values are free text up to the end of the line.

use std::fmt::{self, Display};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    kind: String,
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(kind: impl Into<String>) -> Self {
        Report {
            kind: kind.into(),
            entries: Vec::new(),
        }
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    /// Set `key`, replacing an earlier value.
    pub fn set(&mut self, key: impl Into<String>, value: impl Display) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::parse(0, format!("missing key `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::parse(0, format!("bad value `{raw}` for `{key}`")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Entries under `prefix.`, with the prefix stripped.
    pub fn section<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.entries().filter_map(move |(k, v)| {
            k.strip_prefix(prefix)
                .and_then(|rest| rest.strip_prefix('.'))
                .map(|rest| (rest, v))
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty report"))?;
        let kind = parse_header(header)?;
        let mut report = Report::new(kind);
        for (i, raw) in lines {
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected `key = value`, got `{line}`")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::parse(i + 1, "empty key"));
            }
            if report.get(k).is_some() {
                return Err(Error::parse(i + 1, format!("duplicate key `{k}`")));
            }
            report.entries.push((k.to_string(), v.trim().to_string()));
        }
        Ok(report)
    }

    /// Parse and insist on a particular kind.
    pub fn parse_kind(text: &str, kind: &str) -> Result<Self> {
        let r = Report::parse(text)?;
        if r.kind != kind {
            return Err(Error::parse(1, format!("expected a `{kind}` report, found `{}`", r.kind)));
        }
        Ok(r)
    }
}

fn parse_header(line: &str) -> Result<String> {
    let bad = || Error::parse(1, format!("bad header `{line}`"));
    let rest = line.trim().strip_prefix('#').ok_or_else(bad)?;
    let mut it = rest.split_whitespace();
    if it.next() != Some("transprec") {
        return Err(bad());
    }
    let kind = it.next().ok_or_else(bad)?;
    let version = it.next().and_then(|v| v.strip_prefix('v')).ok_or_else(bad)?;
    if version.parse::<u32>().ok() != Some(VERSION) {
        return Err(Error::parse(1, format!("unsupported report version `{version}`")));
    }
    Ok(kind.to_string())
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# transprec {} v{VERSION}", self.kind)?;
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new("stats");
        r.set("kernel", "conv");
        r.set("count.mul.e8m23.scalar", 25600);
        r.set("kernel", "svm");
        let back = Report::parse(&r.to_string()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get("kernel"), Some("svm"));
        assert_eq!(back.require::<u64>("count.mul.e8m23.scalar").unwrap(), 25600);
        assert_eq!(back.section("count").count(), 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Report::parse("").is_err());
        assert!(Report::parse("kernel = x").is_err());
        assert!(Report::parse("# transprec stats v2\n").is_err());
        assert!(Report::parse("# transprec stats v1\nnonsense\n").is_err());
        assert!(Report::parse("# transprec stats v1\na = 1\na = 2\n").is_err());
        assert!(Report::parse_kind("# transprec cost v1\n", "stats").is_err());
    }
}
