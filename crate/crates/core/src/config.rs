//! Flat key-value configuration files.
//!
//! Grammar: one `key = value` pair per line; blank lines and lines starting
//! with `#` are ignored; keys are `[a-z0-9_]` words; list values are
//! comma-separated.  Duplicate and unknown keys are rejected so typos fail
//! loudly.

use crate::error::{Error, Result};

/// Parsed configuration: ordered key-value pairs.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: Vec<(String, String)>,
}

/// Parse configuration text.
pub fn parse_str(text: &str) -> Result<ConfigMap> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", idx + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        {
            return Err(Error::Parse(format!("line {}: bad key {key:?}", idx + 1)));
        }
        if value.is_empty() {
            return Err(Error::Parse(format!("line {}: empty value for {key:?}", idx + 1)));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(Error::Parse(format!("line {}: duplicate key {key:?}", idx + 1)));
        }
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(ConfigMap { entries })
}

impl ConfigMap {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("missing required key {key:?}")))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let raw = self.require(key)?;
        raw.parse::<f64>()
            .map_err(|_| Error::Parse(format!("key {key:?}: bad number {raw:?}")))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("key {key:?}: bad number {raw:?}"))),
        }
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        let raw = self.require(key)?;
        raw.parse::<usize>()
            .map_err(|_| Error::Parse(format!("key {key:?}: bad integer {raw:?}")))
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("key {key:?}: bad integer {raw:?}"))),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("key {key:?}: bad integer {raw:?}"))),
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(raw) => Err(Error::Parse(format!(
                "key {key:?}: expected true or false, got {raw:?}"
            ))),
        }
    }

    /// Comma-separated list items, trimmed.
    pub fn require_list(&self, key: &str) -> Result<Vec<&str>> {
        Ok(self
            .require(key)?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect())
    }

    /// Reject keys outside `allowed`.
    pub fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse(format!("unknown config key {k:?}")));
            }
        }
        Ok(())
    }
}
