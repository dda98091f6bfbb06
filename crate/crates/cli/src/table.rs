//! Column-oriented output tables and their CSV/JSON encodings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub const VERSION: &str = "cavity-duo v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn check_finite(&self) -> Result<(), CliError> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(CliError::NonFinite { column: self.columns[c].clone(), row: r, value: *v });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# {VERSION}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format!("{v:.16e}"),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(v) => v.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// `{"version": …, "columns": [names…], "<name>": [values…], …}`.
    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("version".into(), VERSION.into());
        obj.insert("columns".into(), self.columns.clone().into());
        for (c, name) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self
                .rows
                .iter()
                .map(|row| match &row[c] {
                    Cell::Num(v) => Value::from(*v),
                    Cell::Int(v) => Value::from(*v),
                    Cell::Text(v) => Value::from(v.as_str()),
                })
                .collect();
            obj.insert(name.clone(), col.into());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn encode(&self, format: Format) -> Result<String, CliError> {
        self.check_finite()?;
        Ok(match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        })
    }
}

/// Writes through a sibling temporary file and a rename, so a failed run
/// never leaves a truncated file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_owned(), source };
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents.as_bytes()).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Writes to `out`, or to standard output when no path is given.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(contents.as_bytes()).and_then(|_| stdout.flush()) {
                // A closed pipe (`| head`) is the reader's choice, not a failure.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io { path: "<stdout>".into(), source: e })
                }
                _ => Ok(()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["series", "j", "x"]);
        t.push(vec!["a".into(), 3_i64.into(), 0.1.into()]);
        assert_eq!(t.to_csv(), "# cavity-duo v1\nseries,j,x\na,3,1.0000000000000001e-1\n");
    }

    #[test]
    fn json_round_trips_values() {
        let mut t = Table::new(&["x"]);
        t.push(vec![(1.0_f64 / 3.0).into()]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["x"][0].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["version"], VERSION);
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut t = Table::new(&["x"]);
        t.push(vec![f64::NAN.into()]);
        assert!(matches!(t.encode(Format::Csv), Err(CliError::NonFinite { .. })));
    }
}
