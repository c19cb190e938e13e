//! Manifests, CSV writing and config-file expansion.

use hpqa_core::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One manifest per run; re-running with its parameters reproduces the
/// primary outputs byte for byte (wall time aside).
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub threads: usize,
    pub parameters: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub extras: BTreeMap<String, String>,
    pub wall_time_ms: u128,
}

pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    threads: usize,
    parameters: BTreeMap<String, String>,
    outputs: Vec<PathBuf>,
    extras: BTreeMap<String, String>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str, threads: usize) -> ManifestBuilder {
        ManifestBuilder {
            command: command.to_string(),
            seed: None,
            threads,
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            extras: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self.param("seed", seed)
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn extra(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.extras.insert(key.to_string(), value.to_string());
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.to_path_buf());
        self
    }

    /// Write `<primary output>.manifest.json`.
    pub fn write(&self) -> Result<()> {
        let manifest = RunManifest {
            command: self.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            threads: self.threads,
            parameters: self.parameters.clone(),
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
            extras: self.extras.clone(),
            wall_time_ms: self.started.elapsed().as_millis(),
        };
        let primary = self
            .outputs
            .first()
            .ok_or_else(|| Error::Io("manifest without outputs".into()))?;
        let mut path = primary.as_os_str().to_owned();
        path.push(".manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        hpqa_core::io::write_string(Path::new(&path), &text)
    }
}

/// CSV with a fixed header; fields are written with `Display`, so floats use
/// the shortest round-trip form and '.' as the decimal separator.
pub struct CsvWriter {
    buf: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> CsvWriter {
        CsvWriter { buf: format!("{}\n", header.join(",")), columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "csv row width");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self, path: &Path) -> Result<()> {
        hpqa_core::io::write_string(path, &self.buf)
    }
}

/// Expand `--config FILE` into explicit flags: every `key=value` line maps
/// to `--key value` (booleans: `--key` for true, omitted for false) unless
/// the flag is already present on the command line.
pub fn expand_config_args(mut argv: Vec<String>) -> Result<Vec<String>> {
    let mut config_path: Option<String> = None;
    for (i, arg) in argv.iter().enumerate() {
        if arg == "--config" {
            config_path = argv.get(i + 1).cloned();
        } else if let Some(rest) = arg.strip_prefix("--config=") {
            config_path = Some(rest.to_string());
        }
    }
    let Some(path) = config_path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io(format!("config {path}: {e}")))?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse(format!("config line '{line}' is not key=value")));
        };
        let key = key.trim();
        let value = value.trim();
        let flag = format!("--{}", key.replace('_', "-"));
        let already = argv
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if already {
            continue;
        }
        match value {
            "true" => argv.push(flag),
            "false" => {}
            _ => {
                argv.push(flag);
                argv.push(value.to_string());
            }
        }
    }
    Ok(argv)
}

/// Seed resolution: flag, then the HPQA_SEED environment variable, then 0.
pub fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("HPQA_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0)
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{t}'")))
        })
        .collect()
}

pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer '{t}'")))
        })
        .collect()
}
