use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Diagnostics {
    pub n_moments: Option<usize>,
    pub scale: Option<f64>,
    pub resolution: Option<f64>,
    pub symmetry_residual: Option<f64>,
    pub max_truncation: Option<f64>,
    pub max_bond: Option<usize>,
    pub captured_weight: Option<f64>,
    pub delta: Option<f64>,
    pub svg_scale_max: Option<f64>,
    /// max_t |C − C_oracle| for a `dynamics --oracle` overlay.
    pub oracle_deviation: Option<f64>,
    pub refined_n_moments: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub schema_version: u32,
    pub backend: String,
    pub workers: usize,
    pub wall_time_s: f64,
    pub config: RunConfig,
    pub diagnostics: Diagnostics,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
    /// Set when the command stopped early; the manifest lists what was written before.
    pub error: Option<String>,
}

/// Collects outputs of one command; files are written immediately and
/// checksummed from the bytes written.
pub struct Outputs {
    pub dir: PathBuf,
    pub files: Vec<FileEntry>,
}

impl Outputs {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    /// Writes `report_<command>.json`. The report itself is the only file not
    /// listed in its own manifest.
    pub fn finish(self, mut report: RunReport) -> std::io::Result<PathBuf> {
        report.files = self.files;
        let path = self.dir.join(format!("report_{}.json", report.command.replace(' ', "_")));
        let text = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
