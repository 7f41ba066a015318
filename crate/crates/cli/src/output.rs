//! CSV and JSON emission. Numbers carry 17 significant digits; every file is
//! written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// `{:.16e}`, the shortest fixed width that round-trips every double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a CSV body with a mandatory header row.
pub struct Csv {
    body: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { body: format!("{}\n", header.join(",")), columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        let _ = writeln!(self.body, "{}", fields.join(","));
    }

    pub fn into_string(self) -> String {
        self.body
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::Solver(format!("cannot create {}: {e}", dir.display())))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| CliError::Solver(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Solver(format!("cannot move {} into place: {e}", path.display()))
    })
}

/// Writes `value` as one line of JSON.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string(value).expect("json value serializes");
    s.push('\n');
    write_atomic(path, &s)
}

/// `--out`, then the scenario's `output_dir`, then `./out`.
pub fn output_dir(flag: Option<&Path>, scenario: Option<&Path>) -> PathBuf {
    flag.or(scenario).map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out"))
}
