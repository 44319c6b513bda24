//! Layered `key=value` settings: command-line flags over a config file over
//! built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A setting a subcommand understands, with its default as text.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
}

pub const fn key(name: &'static str, default: &'static str) -> Key {
    Key { name, default }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Default,
    File { path: String, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

/// Manifest lines that describe a run rather than configure it.
fn is_record_only(name: &str) -> bool {
    matches!(name, "tool" | "version" | "command" | "sensors" | "truth")
        || name.starts_with("input.")
        || name.starts_with("output.")
}

fn normalize(name: &str) -> String {
    let name = name.trim();
    name.strip_prefix("config.")
        .unwrap_or(name)
        .replace('-', "_")
}

#[derive(Debug, Clone)]
pub struct Settings {
    values: BTreeMap<&'static str, (String, Origin)>,
}

impl Settings {
    /// Resolves every key: a flag wins over the file, the file over the default.
    pub fn resolve(
        keys: &[Key],
        file: Option<&Path>,
        flags: &[(&str, Option<String>)],
    ) -> Result<Self> {
        let mut values: BTreeMap<&'static str, (String, Origin)> = keys
            .iter()
            .map(|k| (k.name, (k.default.to_string(), Origin::Default)))
            .collect();
        if let Some(path) = file {
            for (name, value, origin) in read_config_file(path)? {
                let Some(k) = keys.iter().find(|k| k.name == name) else {
                    return Err(Error::invalid_config(format!(
                        "{origin}: unknown key {name:?}"
                    )));
                };
                values.insert(k.name, (value, origin));
            }
        }
        for (name, value) in flags {
            if let Some(v) = value {
                let k = keys
                    .iter()
                    .find(|k| k.name == *name)
                    .unwrap_or_else(|| panic!("flag {name} has no settings key"));
                values.insert(k.name, (v.clone(), Origin::Flag));
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, name: &str) -> &str {
        &self.entry(name).0
    }

    fn entry(&self, name: &str) -> &(String, Origin) {
        self.values
            .get(name)
            .unwrap_or_else(|| panic!("settings key {name} not registered"))
    }

    pub fn get<T: FromStr>(&self, name: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let (v, origin) = self.entry(name);
        v.trim()
            .parse::<T>()
            .map_err(|e| self.bad(name, v, origin, &e.to_string()))
    }

    /// Parses with a custom function, reporting failures against the key.
    pub fn parse_with<T>(
        &self,
        name: &str,
        f: impl FnOnce(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        let (v, origin) = self.entry(name);
        f(v.trim()).map_err(|e| self.bad(name, v, origin, &e))
    }

    /// Wraps a validation error so it names the key and where its value came from.
    pub fn context(&self, name: &str, err: Error) -> Error {
        let (v, origin) = self.entry(name);
        match err.root() {
            Error::InvalidConfig(msg) => self.bad(name, v, origin, msg),
            _ => err,
        }
    }

    fn bad(&self, name: &str, value: &str, origin: &Origin, msg: &str) -> Error {
        let flag = format!("--{}", name.replace('_', "-"));
        Error::invalid_config(format!("{name} = {value:?} ({origin}, flag {flag}): {msg}"))
    }

    /// Every resolved value as `config.<key>=<value>`, sorted by key.
    pub fn snapshot(&self) -> Vec<String> {
        self.values
            .iter()
            .map(|(k, (v, _))| format!("config.{k}={v}"))
            .collect()
    }
}

/// Reads `key=value` lines. Blank lines and `#` comments are skipped, as
/// are the record-only lines of a manifest, so a manifest can be fed back
/// in as a config file.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String, Origin)>> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::invalid_config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let shown = path.display().to_string();
    let mut out: Vec<(String, String, Origin)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let origin = Origin::File {
            path: shown.clone(),
            line: i + 1,
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::invalid_config(format!(
                "{origin}: expected key=value, got {line:?}"
            )));
        };
        let name = normalize(k);
        if name.is_empty() {
            return Err(Error::invalid_config(format!("{origin}: empty key")));
        }
        if is_record_only(&name) {
            continue;
        }
        if let Some((_, _, first)) = out.iter().find(|(n, _, _)| *n == name) {
            return Err(Error::invalid_config(format!(
                "{origin}: key {name:?} already set at {first}"
            )));
        }
        out.push((name, v.trim().to_string(), origin));
    }
    Ok(out)
}

/// `true`/`false` plus the usual spellings.
pub fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const KEYS: &[Key] = &[
        key("n", "500"),
        key("seed", "42"),
        key("noise_sensor", "false"),
    ];

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn precedence_is_flag_then_file_then_default() {
        let f = write("# comment\nn = 100\nseed=7\n");
        let s = Settings::resolve(
            KEYS,
            Some(f.path()),
            &[("seed", Some("9".into())), ("n", None)],
        )
        .unwrap();
        assert_eq!(s.get::<usize>("n").unwrap(), 100);
        assert_eq!(s.get::<u64>("seed").unwrap(), 9);
        assert_eq!(s.raw("noise_sensor"), "false");
    }

    #[test]
    fn manifest_lines_are_accepted() {
        let f = write("tool=manifuse\ncommand=gen-toy\nconfig.n=12\noutput.a.csv=sha256:00\nconfig.noise-sensor=true\n");
        let s = Settings::resolve(KEYS, Some(f.path()), &[]).unwrap();
        assert_eq!(s.get::<usize>("n").unwrap(), 12);
        assert!(s.parse_with("noise_sensor", parse_bool).unwrap());
    }

    #[test]
    fn unknown_key_names_the_line() {
        let f = write("n=3\n\nbogus=1\n");
        let err = Settings::resolve(KEYS, Some(f.path()), &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains(":3:"), "{err}");
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn duplicate_and_malformed_lines_fail() {
        let f = write("n=3\nn=4\n");
        assert!(Settings::resolve(KEYS, Some(f.path()), &[]).is_err());
        let f = write("n 3\n");
        assert!(Settings::resolve(KEYS, Some(f.path()), &[]).is_err());
    }

    #[test]
    fn bad_value_names_key_and_origin() {
        let s = Settings::resolve(KEYS, None, &[("n", Some("ten".into()))]).unwrap();
        let err = s.get::<usize>("n").unwrap_err().to_string();
        assert!(err.contains("--n") && err.contains("command line"), "{err}");
    }

    #[test]
    fn snapshot_round_trips() {
        let s = Settings::resolve(KEYS, None, &[("n", Some("8".into()))]).unwrap();
        let f = write(&s.snapshot().join("\n"));
        let again = Settings::resolve(KEYS, Some(f.path()), &[]).unwrap();
        assert_eq!(again.snapshot(), s.snapshot());
    }
}
