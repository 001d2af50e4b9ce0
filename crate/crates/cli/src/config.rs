//! Flat `key = value` config files with optional `[command]` sections.
//!
//! Keys at the top of the file apply to every command; keys inside a section
//! apply only to that command and win over the top-level ones. Values are
//! resolved with precedence flags > file > defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
    origin: String,
}

impl FileConfig {
    pub fn load(path: &Path, command: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        FileConfig::parse(&text, command, &path.display().to_string())
    }

    pub fn parse(text: &str, command: &str, origin: &str) -> CliResult<Self> {
        let mut global = BTreeMap::new();
        let mut own = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let bad = |what: &str| CliError::Config(format!("{origin}:{}: {what}", idx + 1));
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| bad("unterminated section header"))?;
                section = Some(name.trim().to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
            let key = key.trim().replace('-', "_");
            if key.is_empty() {
                return Err(bad("empty key"));
            }
            let target = match section.as_deref() {
                None => &mut global,
                Some(s) if s == command => &mut own,
                Some(_) => continue,
            };
            if target.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(bad(&format!("duplicate key `{key}`")));
            }
        }
        global.extend(own);
        Ok(FileConfig {
            values: global,
            origin: origin.to_string(),
        })
    }

    /// Rejects keys the command does not know, which are almost always typos.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("{}: unknown key `{k}`", self.origin))),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the file value, else `default`.
    pub fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| CliError::Config(format!("{}: bad value `{raw}` for `{key}`: {e}", self.origin))),
            None => Ok(default),
        }
    }

    /// Like [`FileConfig::resolve`] without a default.
    pub fn resolve_opt<T>(&self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|e| CliError::Config(format!("{}: bad value `{raw}` for `{key}`: {e}", self.origin)))
            })
            .transpose()
    }
}

/// Comma-separated reals.
pub fn parse_reals(key: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("`{s}` in `{key}` is not a number")))
        })
        .collect()
}

/// Inclusive integer range `a..b`.
pub fn parse_range(key: &str, text: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::Config(format!("`{text}` in `{key}` is not a range `a..b`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}
