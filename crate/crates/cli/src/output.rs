//! Collect every artifact in memory, then write them all at once.

use std::fs;
use std::path::{Path, PathBuf};

use abc_shadow::mcmc::trace::ChainTrace;
use serde_json::Value;

use crate::error::CliError;

#[derive(Default, Debug)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_trace(&mut self, label: &str, trace: &ChainTrace) -> Result<(), CliError> {
        let mut csv = Vec::new();
        trace.write_csv(&mut csv)?;
        self.add(format!("trace_{label}.csv"), csv);
        self.add(format!("trace_{label}.json"), trace.sidecar_json()?.into_bytes());
        Ok(())
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes each file through a temporary sibling and a rename, then the manifest.
    pub fn commit(&self, dir: &Path, manifest: &Value) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        let mut written = Vec::new();
        let manifest = serde_json::to_vec_pretty(manifest).map_err(|e| CliError::io(e.to_string()))?;
        for (name, bytes) in self.files.iter().map(|(n, b)| (n.as_str(), b)).chain([("manifest.json", &manifest)]) {
            let path = dir.join(name);
            write_atomic(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| CliError::io(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(format!("cannot move {} into place: {e}", path.display()))
    })
}
