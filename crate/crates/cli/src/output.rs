//! Output files and the `run.json` manifest written beside them.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// RFC 4180 field: quoted only when it has to be.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    args: &'a [String],
    config_sha256: String,
    config: serde_json::Value,
    version: &'static str,
    core_version: &'static str,
    /// Wall-clock seconds; the only field that changes between runs.
    elapsed_seconds: f64,
    outputs: &'a [FileEntry],
}

/// Collects the files of one command run and writes the manifest.
pub struct Run {
    dir: PathBuf,
    command: String,
    args: Vec<String>,
    config: String,
    started: Instant,
    files: Vec<FileEntry>,
}

impl Run {
    pub fn new(dir: &Path, command: &str, config: String) -> Result<Run, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            config,
            started: Instant::now(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.files.push(FileEntry { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(path)
    }

    pub fn finish(self) -> Result<(), Failure> {
        let m = Manifest {
            command: &self.command,
            args: &self.args,
            config_sha256: sha256_hex(self.config.as_bytes()),
            config: serde_json::from_str(&self.config).expect("canonical config is JSON"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: bulging::VERSION,
            elapsed_seconds: self.started.elapsed().as_secs_f64(),
            outputs: &self.files,
        };
        let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        text.push('\n');
        let path = self.dir.join("run.json");
        std::fs::write(&path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}
