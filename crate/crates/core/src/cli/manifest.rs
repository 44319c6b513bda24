//! Run manifests and timing files.
//!
//! A manifest is itself a valid config file: the `config.*` lines replay
//! the run, the rest record what was read and written. Timings go to a
//! separate file so the manifest stays byte-identical across reruns.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::settings::Settings;

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(format!("sha256:{}", hex::encode(Sha256::digest(&bytes))))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug)]
pub struct Manifest {
    command: String,
    extra: Vec<String>,
    config: Vec<String>,
    inputs: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(command: &str, settings: &Settings) -> Self {
        Self {
            command: command.to_string(),
            extra: Vec::new(),
            config: settings.snapshot(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// A record-only `key=value` line (for example the sensor file list).
    pub fn record(&mut self, key: &str, value: impl Into<String>) {
        self.extra.push(format!("{key}={}", value.into()));
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.push((file_name(path), digest));
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Digests every output, then writes the manifest.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut lines = vec![
            format!("tool={}", env!("CARGO_PKG_NAME")),
            format!("version={}", env!("CARGO_PKG_VERSION")),
            format!("command={}", self.command),
        ];
        lines.extend(self.extra.iter().cloned());
        lines.extend(self.config.iter().cloned());
        for (name, digest) in &self.inputs {
            lines.push(format!("input.{name}={digest}"));
        }
        for p in &self.outputs {
            lines.push(format!("output.{}={}", file_name(p), sha256_file(p)?));
        }
        let mut f = fs::File::create(path)?;
        for l in lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Reads the record-only `key=value` lines of a manifest.
pub fn read_record(path: &Path, key: &str) -> Result<Option<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim().to_string()))
}

/// Wall-clock time per named stage.
#[derive(Debug, Default)]
pub struct Timing {
    stages: Vec<(String, Duration)>,
}

impl Timing {
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        self.stages.push((stage.to_string(), start.elapsed()));
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        for (stage, d) in &self.stages {
            writeln!(f, "{stage}={:.6}", d.as_secs_f64())?;
        }
        Ok(())
    }
}

/// `dir/stem.suffix` next to a primary output file.
pub fn sidecar(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    primary.with_file_name(format!("{stem}.{suffix}"))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::invalid_input(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })
}
