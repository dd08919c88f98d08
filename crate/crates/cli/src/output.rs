//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{Formats, Settings};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: &'static str,
    pub description: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    settings: &'a Settings,
    files: &'a [FileEntry],
    summary: &'a serde_json::Value,
    /// The only field that changes between identical runs.
    created_unix: u64,
}

pub struct RunOutput {
    pub dir: PathBuf,
    pub formats: Formats,
    files: Vec<FileEntry>,
}

pub const MANIFEST: &str = "manifest.json";

impl RunOutput {
    pub fn create(dir: &Path, formats: Formats) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::usage(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
        let probe = dir.join(".write-test");
        fs::write(&probe, b"")
            .map_err(|e| CliError::usage(anyhow::anyhow!("{} is not writable: {e}", dir.display())))?;
        fs::remove_file(&probe).ok();
        Ok(Self { dir: dir.to_path_buf(), formats, files: Vec::new() })
    }

    fn record(&mut self, name: &str, kind: &'static str, description: &str) {
        self.files.push(FileEntry { path: name.to_string(), kind, description: description.to_string() });
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T, description: &str) -> CliResult<()> {
        if !self.formats.json {
            return Ok(());
        }
        let text = serde_json::to_string_pretty(value).map_err(CliError::numerical)?;
        fs::write(self.dir.join(name), text + "\n")?;
        self.record(name, "json", description);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>, description: &str) -> CliResult<()> {
        if !self.formats.csv {
            return Ok(());
        }
        let mut w = csv::Writer::from_path(self.dir.join(name)).map_err(CliError::usage)?;
        w.write_record(header).map_err(CliError::usage)?;
        for row in rows {
            w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(CliError::usage)?;
        }
        w.flush()?;
        self.record(name, "csv", description);
        Ok(())
    }

    pub fn script(&mut self, name: &str, body: &str, description: &str) -> CliResult<()> {
        if !self.formats.plotscript {
            return Ok(());
        }
        fs::write(self.dir.join(name), body)?;
        self.record(name, "plotscript", description);
        Ok(())
    }

    /// Writes `manifest.json` referencing every file of the run.
    pub fn finish(self, command: &str, settings: &Settings, summary: &serde_json::Value) -> CliResult<PathBuf> {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let m = Manifest {
            tool: "hardy-ss",
            version: env!("CARGO_PKG_VERSION"),
            command,
            settings,
            files: &self.files,
            summary,
            created_unix,
        };
        let path = self.dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(&m).map_err(CliError::numerical)?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
