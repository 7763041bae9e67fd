use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(64);
    for b in Sha256::digest(bytes) {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Writes command outputs into one directory and records each file.
pub struct Outputs {
    dir: PathBuf,
    format: Format,
    pub files: Vec<FileEntry>,
}

impl Outputs {
    pub fn new(dir: &Path, format: Format) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::config(format!(
                "cannot create output directory {}: {e}",
                dir.display()
            ))
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<(), CliError> {
        if !self.format.includes(Format::Csv) {
            return Ok(());
        }
        let mut text = String::from(header);
        text.push('\n');
        for r in rows {
            text.push_str(&r);
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.format.includes(Format::Json) {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::numeric(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Always written, whatever the format selection.
    pub fn report<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::numeric(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn svg(&mut self, name: &str, render: impl FnOnce() -> String) -> Result<(), CliError> {
        if !self.format.includes(Format::Svg) {
            return Ok(());
        }
        self.write(name, render().as_bytes())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub qreset: &'static str,
    pub qreset_cli: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub arguments: serde_json::Value,
    /// SHA-256 of the effective configuration and command arguments.
    pub inputs_sha256: String,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub versions: Versions,
    pub started_unix_s: u64,
    pub wall_time_s: f64,
    pub status: &'static str,
    pub files: Vec<FileEntry>,
}

/// Renders a float for CSV; NaN cells become empty fields.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}
