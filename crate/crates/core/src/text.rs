//! `key=value; key=value` records shared by profiles and metrics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct Record(BTreeMap<String, String>);

impl Record {
    pub fn parse(s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            let k = k.trim().to_ascii_lowercase();
            if map.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key '{k}'")));
            }
        }
        Ok(Self(map))
    }

    /// Record from already split pairs; keys are lower-cased.
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.trim().to_ascii_lowercase();
            if map.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key '{k}'")));
            }
        }
        Ok(Self(map))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Parse(format!("missing key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(self.str(key)?, key)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            Some(v) => parse_f64(v, key),
            None => Ok(default),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.0.get(key).map(|v| parse_f64(v, key)).transpose()
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.str(key)?
            .split(',')
            .map(|v| parse_f64(v.trim(), key))
            .collect()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Error on any key outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::Parse(format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

pub fn parse_f64(v: &str, key: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Parse(format!("'{key}' expects a number, got '{v}'")))
}

/// Shortest string that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let r = Record::parse("kind=logbm; beta=1.0 ;domain_max=0.3").unwrap();
        assert_eq!(r.str("kind").unwrap(), "logbm");
        assert_eq!(r.f64("beta").unwrap(), 1.0);
        assert!(r.f64("alpha").is_err());
        assert!(Record::parse("kind").is_err());
        assert!(Record::parse("a=1; a=2").is_err());
        assert!(r.only(&["kind", "beta"]).is_err());
    }

    #[test]
    fn float_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
