//! Readers for the JSON and CSV input formats.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::discrete::JointPmf;
use crate::error::{Error, Result};
use crate::stability::DistributionMatrix;

/// Encoding of a matrix-valued input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Json,
    /// One row per line, comma separated, no header; `#` starts a comment line.
    Csv,
}

impl InputFormat {
    /// CSV for a `.csv` extension, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Json,
        }
    }
}

/// Deserializes any of the library's JSON documents.
pub fn from_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Rows of numbers from CSV.
pub fn matrix_from_csv(bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::Format(format!("row {}: {field:?} is not a number", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("no rows".into()));
    }
    Ok(rows)
}

pub fn distribution_matrix(bytes: &[u8], format: InputFormat) -> Result<DistributionMatrix> {
    match format {
        InputFormat::Json => from_json(bytes),
        InputFormat::Csv => DistributionMatrix::new(matrix_from_csv(bytes)?),
    }
}

/// A joint pmf as JSON `{alphabet_x, alphabet_y, mass}` or as a CSV mass table.
pub fn joint_pmf(bytes: &[u8], format: InputFormat) -> Result<JointPmf> {
    match format {
        InputFormat::Json => from_json(bytes),
        InputFormat::Csv => JointPmf::new(matrix_from_csv(bytes)?),
    }
}
