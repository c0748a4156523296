//! CSV and JSON sidecar emission.
//!
//! CSV files are first written under a `.partial` suffix and renamed once
//! complete, so a file without the suffix is always whole. Numbers carry 17
//! significant digits; absent values are empty fields.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct CsvOutput {
    path: PathBuf,
    partial: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvOutput {
    pub fn create(dir: &Path, name: &str, header: &[String]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let partial = dir.join(format!("{name}.partial"));
        let file = File::create(&partial).map_err(|e| CliError::io(&partial, e))?;
        let mut out = Self { path, partial, writer: csv::Writer::from_writer(file) };
        out.row(header)?;
        Ok(out)
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields).map_err(|e| self.csv_err(e))
    }

    /// Flushes and moves the file to its final name.
    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.partial, e))?;
        std::fs::rename(&self.partial, &self.path).map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }

    /// Flushes what was written and leaves the `.partial` file in place.
    pub fn abandon(mut self) {
        let _ = self.writer.flush();
    }

    fn csv_err(&self, e: csv::Error) -> CliError {
        CliError::io(&self.partial, std::io::Error::other(e))
    }
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `<stem>.json` next to a CSV: command, version, config echo and any
/// command-specific fields in `extra`.
pub fn write_sidecar(csv_path: &Path, command: &str, cfg: &RunConfig, extra: Value) -> Result<PathBuf, CliError> {
    let path = csv_path.with_extension("json");
    let mut doc = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "csv": csv_path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "tolerances": cfg.tolerances,
        "config": cfg,
    });
    if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
        doc.extend(extra);
    }
    let text = serde_json::to_string_pretty(&doc).expect("sidecar serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
