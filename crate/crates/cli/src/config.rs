//! Flat `key=value` configuration files.
//!
//! One assignment per line; blank lines and everything after `#` are
//! ignored. Keys are flag names without the leading dashes (`eta-db`, with
//! `_` accepted for `-`). Command-line flags take precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{usage, CliResult};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", lineno + 1)))?;
            let key = normalize(key.trim());
            if key.is_empty() {
                return Err(usage(format!("config line {}: empty key", lineno + 1)));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(usage(format!(
                    "config line {}: duplicate key {key}",
                    lineno + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    /// Removes `key` and parses its value.
    pub fn take<T>(&mut self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key {key}: invalid value {v:?}: {e}"))),
        }
    }

    /// Fills `slot` from `key` unless a flag already set it. The key is
    /// consumed either way.
    pub fn fill<T>(&mut self, slot: &mut Option<T>, key: &str) -> CliResult<()>
    where
        T: FromStr,
        T::Err: Display,
    {
        let from_file = self.take(key)?;
        if slot.is_none() {
            *slot = from_file;
        }
        Ok(())
    }

    /// Errors on any key no command consumed.
    pub fn finish(self) -> CliResult<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(_) => Err(usage(format!(
                "unknown config keys: {}",
                self.values.keys().cloned().collect::<Vec<_>>().join(", ")
            ))),
        }
    }
}

fn normalize(key: &str) -> String {
    key.trim_start_matches('-').replace('_', "-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let cfg = Config::parse("# header\n\neta = 0.5  # trailing\nnbar_list=1\n").unwrap();
        assert!(cfg.contains("eta"));
        assert!(cfg.contains("nbar-list"));
        let mut cfg = cfg;
        assert_eq!(cfg.take::<f64>("eta").unwrap(), Some(0.5));
        assert_eq!(cfg.take::<f64>("eta").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("eta 0.5").is_err());
        assert!(Config::parse("=1").is_err());
        assert!(Config::parse("eta=1\neta=2").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut cfg = Config::parse("eps=0.1\nnbar=3").unwrap();
        let mut eps = Some(0.2);
        let mut nbar: Option<f64> = None;
        cfg.fill(&mut eps, "eps").unwrap();
        cfg.fill(&mut nbar, "nbar").unwrap();
        assert_eq!(eps, Some(0.2));
        assert_eq!(nbar, Some(3.0));
        cfg.finish().unwrap();
    }

    #[test]
    fn leftover_keys_are_errors() {
        let cfg = Config::parse("bogus=1").unwrap();
        assert!(cfg.finish().is_err());
    }

    #[test]
    fn bad_values_are_errors() {
        let mut cfg = Config::parse("eta=abc").unwrap();
        let mut eta: Option<f64> = None;
        assert!(cfg.fill(&mut eta, "eta").is_err());
    }
}
