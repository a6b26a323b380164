//! CSV input (header required, comma-separated, `.` decimal) and output.

use std::path::Path;

use despar::Dataset;
use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// A parsed input file: `y` in the first column, regressors after it.
#[derive(Debug, Clone)]
pub struct Table {
    pub response: String,
    pub regressors: Vec<String>,
    pub data: Dataset,
}

impl Table {
    pub fn column_index(&self, name: &str) -> CliResult<usize> {
        self.regressors
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::UnknownColumn(name.to_string()))
    }
}

/// Header plus numeric rows.
pub(crate) fn read_numeric(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let parse_err = |line: u64, column: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => parse_err(1, 1, format!("{other:?}")),
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(parse_err(1, 1, "empty file or missing header row".into()));
    }
    if let Some(col) = header.iter().position(|h| h.parse::<f64>().is_ok()) {
        return Err(parse_err(
            1,
            col + 1,
            format!("missing header row: '{}' is numeric", header[col]),
        ));
    }
    if let Some(col) = header.iter().position(|h| h.is_empty()) {
        return Err(parse_err(1, col + 1, "empty column name".into()));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(line, c + 1, format!("'{field}' is not a finite number"))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => CliError::Parse {
            path: path.to_path_buf(),
            line,
            column: (len.min(expected_len) + 1) as usize,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => CliError::Parse {
            path: path.to_path_buf(),
            line,
            column: 1,
            message: format!("{other:?}"),
        },
    }
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let (header, rows) = read_numeric(path)?;
    if header.len() < 2 {
        return Err(CliError::Input(format!(
            "{}: need a response column and at least one regressor",
            path.display()
        )));
    }
    if rows.len() < 2 {
        return Err(CliError::Input(format!(
            "{}: need at least two data rows",
            path.display()
        )));
    }
    for (i, name) in header.iter().enumerate() {
        if header[..i].contains(name) {
            return Err(CliError::Input(format!("duplicate column name '{name}'")));
        }
    }
    let y: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let x: Vec<Vec<f64>> = rows.iter().map(|r| r[1..].to_vec()).collect();
    let data = Dataset::from_rows(y, &x)?;
    Ok(Table {
        response: header[0].clone(),
        regressors: header[1..].to_vec(),
        data,
    })
}

/// Restriction file: header names the restricted regressors followed by `q`;
/// each row is one restriction.
pub fn read_restriction(path: &Path) -> CliResult<(Vec<String>, Array2<f64>, Array1<f64>)> {
    let (header, rows) = read_numeric(path)?;
    if header.last().map(String::as_str) != Some("q") || header.len() < 2 {
        return Err(CliError::Input(format!(
            "{}: restriction header must list regressors followed by 'q'",
            path.display()
        )));
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no restriction rows", path.display())));
    }
    let k = header.len() - 1;
    let r = Array2::from_shape_fn((rows.len(), k), |(i, j)| rows[i][j]);
    let q = rows.iter().map(|row| row[k]).collect();
    Ok((header[..k].to_vec(), r, q))
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Input(format!("CSV serialization failed: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Input(format!("CSV serialization failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
