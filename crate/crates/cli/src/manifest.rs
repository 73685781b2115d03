//! Run manifests written beside every command's primary output.
//!
//! The config digest covers the tool version, the command, every parameter
//! that can influence output bytes and the digests of all inputs. Output
//! paths and `--jobs` are excluded, so two runs with equal digests must agree
//! byte for byte on their outputs, which are recorded too.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL: &str = "scootsim";

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub config_digest: String,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut f = BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?);
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Collects what a command read and how it was configured.
pub struct ManifestBuilder {
    command: &'static str,
    params: Vec<(String, String)>,
    seed: Option<u64>,
    inputs: Vec<FileDigest>,
    started_at: String,
}

impl ManifestBuilder {
    pub fn new(command: &'static str) -> Self {
        Self { command, params: Vec::new(), seed: None, inputs: Vec::new(), started_at: now() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self.param("seed", seed)
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self, CliError> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(FileDigest { path: path.display().to_string(), sha256 });
        Ok(self)
    }

    fn config_digest(&self) -> String {
        let mut h = Sha256::new();
        let mut field = |s: &str| {
            h.update((s.len() as u64).to_le_bytes());
            h.update(s.as_bytes());
        };
        field(TOOL);
        field(env!("CARGO_PKG_VERSION"));
        field(self.command);
        for (k, v) in &self.params {
            field(k);
            field(v);
        }
        for i in &self.inputs {
            field(&i.sha256);
        }
        hex::encode(h.finalize())
    }

    /// Hash the outputs and write `<primary>.manifest.json`.
    pub fn finish(self, primary: &Path, outputs: &[&Path]) -> Result<PathBuf, CliError> {
        let outputs = outputs
            .iter()
            .map(|p| Ok(FileDigest { path: p.display().to_string(), sha256: sha256_file(p)? }))
            .collect::<Result<Vec<_>, CliError>>()?;
        let manifest = RunManifest {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config_digest: self.config_digest(),
            params: self.params.into_iter().collect(),
            seed: self.seed,
            inputs: self.inputs,
            outputs,
            started_at: self.started_at,
            finished_at: now(),
        };
        let path = manifest_path(primary);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        write_file(&path, |w| w.write_all(text.as_bytes()).and_then(|_| w.write_all(b"\n")))?;
        Ok(path)
    }
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Create `path` and run `f` on a buffered writer, flushing at the end.
pub fn write_file<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut io::BufWriter<File>) -> io::Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = io::BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}
