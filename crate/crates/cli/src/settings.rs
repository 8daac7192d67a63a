//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Resolved settings of one command. Every value read through [`Settings`]
/// ends up in the snapshot, defaults included.
#[derive(Debug, Clone)]
pub struct Settings {
    allowed: &'static [&'static str],
    given: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(allowed: &'static [&'static str]) -> Self {
        Settings {
            allowed,
            given: BTreeMap::new(),
            resolved: BTreeMap::new(),
        }
    }

    /// Reads `path` if given. Lines are `key = value`; `#` starts a comment
    /// line; blank lines are skipped; a key may appear once.
    pub fn from_file(allowed: &'static [&'static str], path: Option<&Path>) -> Result<Self> {
        let mut s = Settings::new(allowed);
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::at(path)(e.into()))?;
            s.parse(&text).map_err(CliError::at(path))?;
        }
        Ok(s)
    }

    pub fn parse(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::config(format!("line {}: expected key = value", i + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            self.check_key(k).map_err(|e| CliError::config(format!("line {}: {e}", i + 1)))?;
            if self.given.insert(k.to_owned(), v.to_owned()).is_some() {
                return Err(CliError::config(format!("line {}: duplicate key {k:?}", i + 1)));
            }
        }
        Ok(())
    }

    fn check_key(&self, key: &str) -> Result<()> {
        if self.allowed.contains(&key) {
            Ok(())
        } else {
            Err(CliError::config(format!(
                "unknown setting {key:?} (known: {})",
                self.allowed.join(", ")
            )))
        }
    }

    /// Command-line value; wins over the file when present.
    pub fn set<V: ToString>(&mut self, key: &str, value: Option<V>) {
        debug_assert!(self.allowed.contains(&key), "undeclared key {key}");
        if let Some(v) = value {
            self.given.insert(key.to_owned(), v.to_string());
        }
    }

    pub fn set_flag(&mut self, key: &str, on: bool) {
        if on {
            self.set(key, Some(true));
        }
    }

    fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
        raw.parse()
            .map_err(|_| CliError::config(format!("setting {key}: cannot parse {raw:?}")))
    }

    pub fn opt<T: FromStr + ToString>(&mut self, key: &str) -> Result<Option<T>> {
        match self.given.get(key) {
            Some(raw) => {
                let v: T = Self::parse_value(key, raw)?;
                self.resolved.insert(key.to_owned(), v.to_string());
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn get<T: FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T> {
        let v = self.opt(key)?.unwrap_or(default);
        self.resolved.insert(key.to_owned(), v.to_string());
        Ok(v)
    }

    pub fn require<T: FromStr + ToString>(&mut self, key: &str) -> Result<T> {
        self.opt(key)?
            .ok_or_else(|| CliError::config(format!("missing required setting {key:?}")))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr + ToString>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(raw) = self.given.get(key).cloned() else {
            return Ok(None);
        };
        let items = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Self::parse_value(key, s))
            .collect::<Result<Vec<T>>>()?;
        let shown: Vec<String> = items.iter().map(ToString::to_string).collect();
        self.resolved.insert(key.to_owned(), shown.join(","));
        Ok(Some(items))
    }

    pub fn snapshot(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: &[&str] = &["a", "b", "sizes", "flag"];

    #[test]
    fn file_then_override() {
        let mut s = Settings::new(KEYS);
        s.parse("# comment\n\na = 1\n b=hello world \nsizes = 1, 2,4\n").unwrap();
        s.set("a", Some(5));
        assert_eq!(s.get::<u32>("a", 0).unwrap(), 5);
        assert_eq!(s.require::<String>("b").unwrap(), "hello world");
        assert_eq!(s.list::<usize>("sizes").unwrap().unwrap(), [1, 2, 4]);
        assert!(!s.get("flag", false).unwrap());
        let snap: Vec<(&str, &str)> = s.snapshot().iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        assert_eq!(snap, [("a", "5"), ("b", "hello world"), ("flag", "false"), ("sizes", "1,2,4")]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Settings::new(KEYS).parse("a 1\n").is_err());
        assert!(Settings::new(KEYS).parse("zz = 1\n").is_err());
        assert!(Settings::new(KEYS).parse("a = 1\na = 2\n").is_err());
        let mut s = Settings::new(KEYS);
        s.parse("a = x\n").unwrap();
        assert!(s.get::<u32>("a", 0).is_err());
        assert!(Settings::new(KEYS).require::<u32>("a").is_err());
    }
}
