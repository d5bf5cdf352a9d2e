//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys may use `-` or
//! `_`; values may be quoted. Command-line flags win over the file, and the
//! file wins over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "method",
    "in",
    "tensor",
    "synthetic",
    "size",
    "center",
    "seed",
    "out",
    "retain",
    "basis",
    "sweep",
    "tol_eig",
    "tol_orth",
    "sym_tol",
    "eps_rank",
    "max_sweeps",
    "eig_cap",
    "memory_cap",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Config> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> CliResult<Config> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!(
                    "line {}: unknown key '{key}'",
                    i + 1
                )));
            }
            let value = value.trim();
            let value = value
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(value);
            if values.insert(key.clone(), value.to_string()).is_some() {
                return Err(CliError::usage(format!(
                    "line {}: duplicate key '{key}'",
                    i + 1
                )));
            }
        }
        Ok(Config { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::usage(format!("config: bad value '{v}' for '{key}'")))
            })
            .transpose()
    }

    /// `flag`, else the config value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}
