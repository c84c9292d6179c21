//! CSV and JSON files, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;

pub const CSV_HEADER: &str = "experiment,alpha,p_or_q,t,raw_error,scaled_error,extra";

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Failure(format!("writing {}: {e}", path.display()))
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| io(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io(path, e))
}

fn cell(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(v) if v.is_infinite() => if v > 0.0 { "inf" } else { "-inf" }.to_string(),
        Some(v) => format!("{v:e}"),
    }
}

/// Rows of the fixed seven-column table.
#[derive(Debug, Default)]
pub struct Csv {
    rows: Vec<String>,
}

impl Csv {
    #[allow(clippy::too_many_arguments)]
    pub fn row(
        &mut self,
        experiment: &str,
        alpha: f64,
        p_or_q: f64,
        t: f64,
        raw: f64,
        scaled: Option<f64>,
        extra: Option<f64>,
    ) {
        self.rows.push(format!(
            "{experiment},{},{},{},{},{},{}",
            cell(Some(alpha)),
            cell(Some(p_or_q)),
            cell(Some(t)),
            cell(Some(raw)),
            cell(scaled),
            cell(extra)
        ));
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

/// Where one command's files go.
#[derive(Debug, Clone)]
pub struct OutDir(pub PathBuf);

impl OutDir {
    pub fn csv(&self, name: &str, csv: &Csv) -> Result<PathBuf, CliError> {
        let path = self.0.join(format!("{name}.csv"));
        write_atomic(&path, csv.render().as_bytes())?;
        Ok(path)
    }

    pub fn json(&self, name: &str, report: &Value) -> Result<PathBuf, CliError> {
        let path = self.0.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Failure(e.to_string()))?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}
