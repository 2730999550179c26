//! Flat `key = value` configuration files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value      # trailing comment
//! ```
//!
//! Keys are the long flag names without the leading dashes (`face-value`,
//! `issuers-per-rating`); underscores are accepted as hyphens. Blank lines
//! and text after `#` are ignored. A key may appear once. A flag given on the
//! command line overrides the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Keys that any command accepts.
pub const GLOBAL_KEYS: [&str; 3] = ["seed", "threads", "out-dir"];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    origin: String,
    entries: BTreeMap<String, (String, usize)>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{origin}:{line_no}: expected 'key = value'"))
            })?;
            let key = normalize(key);
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
                return Err(CliError::Usage(format!("{origin}:{line_no}: bad key '{key}'")));
            }
            if entries.insert(key.clone(), (value.trim().to_string(), line_no)).is_some() {
                return Err(CliError::Usage(format!("{origin}:{line_no}: duplicate key '{key}'")));
            }
        }
        Ok(Self {
            origin: origin.to_string(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn get(&self, key: &str) -> Option<&(String, usize)> {
        self.entries.get(key)
    }
}

/// Merges flags over the config file and records every resolved value.
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    used: Vec<String>,
    echo: Vec<(String, String)>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a ConfigFile) -> Self {
        Self {
            file,
            used: GLOBAL_KEYS.iter().map(|k| k.to_string()).collect(),
            echo: Vec::new(),
        }
    }

    fn lookup<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.push(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some((text, line)) => text.parse().map(Some).map_err(|e| {
                CliError::Usage(format!("{}:{line}: bad value for '{key}': {e}", self.file.origin))
            }),
        }
    }

    /// Flag, else config entry, else `default`.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    /// Like [`Resolver::value`] without a default.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?;
        if let Some(v) = &v {
            self.record(key, v);
        }
        Ok(v)
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.optional(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required value '--{key}'")))
    }

    /// Adds a derived value to the echo.
    pub fn record(&mut self, key: &str, value: &impl Display) {
        self.echo.push((key.to_string(), value.to_string()));
    }

    /// Rejects config keys that the command never asked for.
    pub fn finish(&self) -> Result<()> {
        for (key, (_, line)) in &self.file.entries {
            if !self.used.iter().any(|u| u == key) {
                return Err(CliError::Usage(format!(
                    "{}:{line}: unknown key '{key}' for this command",
                    self.file.origin
                )));
            }
        }
        Ok(())
    }

    /// Writes the resolved values as a config file usable with `--config`.
    pub fn write_echo(&self, command: &str, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "# srm {command}: resolved configuration").unwrap();
        for (k, v) in &self.echo {
            writeln!(out, "{k} = {v}").unwrap();
        }
        std::fs::write(path, out).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let file = ConfigFile::parse("# top\nsigma = 0.3  # vol\n\nface_value=2\n", "t").unwrap();
        let mut r = Resolver::new(&file);
        assert_eq!(r.value("sigma", None, 0.1).unwrap(), 0.3);
        assert_eq!(r.value("sigma", Some(0.5), 0.1).unwrap(), 0.5);
        assert_eq!(r.value("face-value", None::<f64>, 1.0).unwrap(), 2.0);
        assert_eq!(r.value("mu", None, 0.0).unwrap(), 0.0);
        r.finish().unwrap();
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(ConfigFile::parse("sigma 0.3", "t").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2", "t").is_err());
        let file = ConfigFile::parse("sigmaa = 1", "t").unwrap();
        assert!(Resolver::new(&file).finish().is_err());
        let file = ConfigFile::parse("sigma = x", "t").unwrap();
        assert!(Resolver::new(&file).value("sigma", None, 0.1).is_err());
    }
}
