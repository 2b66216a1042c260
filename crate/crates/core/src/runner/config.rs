//! Flat `key = value` config files with `[section]` headers and `#` comments.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::text::Record;

/// Sections in file order of first appearance; keys before any header land in `experiment`.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, Record>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        let mut current = "experiment".to_string();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("line {}: unterminated section header", n + 1)))?
                    .trim()
                    .to_ascii_lowercase();
                if name.is_empty() {
                    return Err(Error::Parse(format!("line {}: empty section name", n + 1)));
                }
                current = name;
                raw.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value, got '{line}'", n + 1)))?;
            if k.trim().is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", n + 1)));
            }
            raw.entry(current.clone()).or_default().push((k.to_string(), v.to_string()));
        }
        let sections = raw
            .into_iter()
            .map(|(name, pairs)| {
                Record::from_pairs(pairs)
                    .map(|r| (name.clone(), r))
                    .map_err(|e| Error::Parse(format!("[{name}] {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { sections })
    }

    pub fn section(&self, name: &str) -> Option<&Record> {
        self.sections.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }
}

pub(crate) fn usize_of(r: &Record, key: &str) -> Result<usize> {
    let v = r.str(key)?;
    v.parse::<usize>()
        .map_err(|_| Error::Parse(format!("'{key}' expects a non-negative integer, got '{v}'")))
}

pub(crate) fn usize_or(r: &Record, key: &str, default: usize) -> Result<usize> {
    match r.get(key) {
        Some(_) => usize_of(r, key),
        None => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let c = ConfigFile::parse("kind = simulate # trailing\n\n[Profile]\nkind=power\nalpha = 0.5\n").unwrap();
        assert_eq!(c.section("experiment").unwrap().str("kind").unwrap(), "simulate");
        assert_eq!(c.section("profile").unwrap().f64("alpha").unwrap(), 0.5);
        assert_eq!(c.names().collect::<Vec<_>>(), ["experiment", "profile"]);
    }

    #[test]
    fn malformed() {
        assert!(ConfigFile::parse("[profile\nkind=power").is_err());
        assert!(ConfigFile::parse("just words").is_err());
        assert!(ConfigFile::parse("a=1\na=2").is_err());
        assert!(ConfigFile::parse("= 3").is_err());
    }
}
