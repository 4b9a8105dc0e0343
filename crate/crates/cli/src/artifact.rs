//! Files written by a run.
//!
//! Every artifact starts with one `#` line carrying the SHA-256 of the spec
//! text and the seed; the core readers skip it.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use slipt_core::formats::format_f64;

use crate::HarnessError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Identifies the spec and seed an artifact came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub spec_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(spec_text: &str, seed: u64) -> Self {
        Self { spec_sha256: sha256_hex(spec_text.as_bytes()), seed }
    }

    pub fn header_line(&self) -> String {
        format!("# slipt spec_sha256={} seed={}\n", self.spec_sha256, self.seed)
    }

    /// Reads the header back from an artifact's first line.
    pub fn parse_header(text: &str) -> Option<Self> {
        let line = text.lines().next()?.strip_prefix("# slipt ")?;
        let mut hash = None;
        let mut seed = None;
        for kv in line.split_whitespace() {
            match kv.split_once('=')? {
                ("spec_sha256", v) => hash = Some(v.to_string()),
                ("seed", v) => seed = v.parse().ok(),
                _ => {}
            }
        }
        Some(Self { spec_sha256: hash?, seed: seed? })
    }
}

/// Optional number, empty when absent.
pub fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

/// In-memory CSV that gets the provenance header on write.
pub struct Table {
    wtr: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(header).expect("in-memory write");
        Self { wtr }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.wtr.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.wtr.into_inner().expect("in-memory flush")
    }
}

/// Output directory plus the header stamped on everything written to it.
#[derive(Debug, Clone)]
pub struct ArtifactSink {
    pub root: PathBuf,
    pub provenance: Provenance,
    written: Vec<PathBuf>,
}

impl ArtifactSink {
    pub fn new(root: impl Into<PathBuf>, provenance: Provenance) -> Self {
        Self { root: root.into(), provenance, written: Vec::new() }
    }

    /// Writes `body` after the header to `root/relative`.
    pub fn write(&mut self, relative: impl AsRef<Path>, body: &[u8]) -> Result<PathBuf, HarnessError> {
        let path = self.root.join(relative);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
        let mut bytes = self.provenance.header_line().into_bytes();
        bytes.extend_from_slice(body);
        fs::write(&path, bytes).map_err(|e| HarnessError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn table(&mut self, relative: impl AsRef<Path>, table: Table) -> Result<PathBuf, HarnessError> {
        self.write(relative, &table.into_bytes())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
