//! Flat `key = value` configuration files.
//!
//! One setting per line, `#` starts a comment line, keys use the long flag
//! names with `-` or `_`. Values given on the command line take precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Keys accepted in a configuration file.
pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "format",
    "start_weekday",
    "market",
    "out",
    "models",
    "calib",
    "first",
    "last",
    "stride",
    "jobs",
    "var_fixed_order",
    "forecasts",
    "season",
    "from",
    "to",
    "dm_hac_lags",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    origin: String,
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| CliError::Config { path: origin.to_string(), line: i + 1, reason };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key '{key}'")));
            }
            if values.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(err(format!("key '{key}' given twice")));
            }
        }
        Ok(Self { origin: origin.to_string(), values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| CliError::Config {
                path: self.origin.clone(),
                line: *line,
                reason: format!("bad value for '{key}': {e}"),
            }),
        }
    }

    /// `flag` when given, else the configured value.
    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Boolean switch: set by the flag or by a true/false value in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }

    /// Comma-separated list value.
    pub fn list(&self, flag: Vec<String>, key: &str) -> Vec<String> {
        if !flag.is_empty() {
            return flag;
        }
        self.raw(key)
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dashed_keys() {
        let c = ConfigFile::parse("# run\ncalib = 365\n\nvar-fixed-order=true\nmodels = naive, mean_HoW\n", "t").unwrap();
        assert_eq!(c.get::<usize>("calib").unwrap(), Some(365));
        assert!(c.switch(false, "var_fixed_order").unwrap());
        assert_eq!(c.list(vec![], "models"), vec!["naive", "mean_HoW"]);
        assert_eq!(c.or(Some(10usize), "calib").unwrap(), Some(10));
        assert_eq!(c.or::<usize>(None, "stride").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed_lines() {
        assert!(matches!(ConfigFile::parse("colour = red", "t"), Err(CliError::Config { line: 1, .. })));
        assert!(matches!(ConfigFile::parse("calib=1\ncalib=2", "t"), Err(CliError::Config { line: 2, .. })));
        assert!(matches!(ConfigFile::parse("\ncalib", "t"), Err(CliError::Config { line: 2, .. })));
        let c = ConfigFile::parse("calib = many", "t").unwrap();
        assert!(c.get::<usize>("calib").is_err());
    }
}
