use std::fmt::Display;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Flat `key=value` run record written next to every output file.
#[derive(Debug, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.set("spdflow_version", env!("CARGO_PKG_VERSION"));
        m.set("command", command);
        m
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Records an input path, its digest, and the manifest that produced it
    /// (if any) under `source.`.
    pub fn input(&mut self, path: &Path) -> io::Result<()> {
        self.set("input", path.display());
        self.set("input_sha256", sha256_hex(&fs::read(path)?));
        if let Ok(text) = fs::read_to_string(sidecar(path)) {
            for line in text.lines() {
                if let Some((k, v)) = line.split_once('=') {
                    self.set(format!("source.{k}"), v);
                }
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write_for(&self, output: &Path) -> io::Result<()> {
        fs::write(sidecar(output), self.render())
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
