//! File formats: scan and tomography CSVs, result JSON documents.
//!
//! * scan CSV: `x_mm,counts,t_accum_s`
//! * tomography CSV: `proj1_index,proj2_index,counts`, 16 rows, indices 0–3
//!   into [`projector_basis`](crate::tomography::projector_basis)
//! * pattern CSV: `x_mm,value[,oracle_value]`
//! * JSON documents carry `"schema": 1` next to the payload fields.

use std::io::{Read, Write};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::inference::{CoincidenceScan, ScanPoint};
use crate::oracle::Plane;
use crate::tomography::{DensityMatrix2Q, TomoCounts};

pub const SCHEMA_VERSION: u64 = 1;
pub const SCAN_HEADER: [&str; 3] = ["x_mm", "counts", "t_accum_s"];
pub const TOMO_HEADER: [&str; 3] = ["proj1_index", "proj2_index", "counts"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema: {0}")]
    Schema(String),
}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        FormatError::Schema(e.to_string())
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Schema(e.to_string())
    }
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), FormatError> {
    let header = reader.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(FormatError::Schema(format!("header {:?}, expected {:?}", got, expected)));
    }
    Ok(())
}

pub fn read_scan<R: Read>(input: R, plane: Plane, theta_hint: Option<f64>) -> Result<CoincidenceScan, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, &SCAN_HEADER)?;
    let points = reader.deserialize::<ScanPoint>().collect::<Result<Vec<_>, _>>()?;
    CoincidenceScan::new(points, plane, theta_hint).map_err(|e| FormatError::Schema(e.to_string()))
}

pub fn write_scan<W: Write>(output: W, scan: &CoincidenceScan) -> Result<(), FormatError> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
    for p in &scan.points {
        writer.serialize(p)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct TomoRow {
    proj1_index: usize,
    proj2_index: usize,
    counts: u64,
}

pub fn read_tomo_counts<R: Read>(input: R) -> Result<TomoCounts, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, &TOMO_HEADER)?;
    let mut seen = [[false; 4]; 4];
    let mut out = TomoCounts::default();
    let mut rows = 0;
    for row in reader.deserialize::<TomoRow>() {
        let row = row?;
        if row.proj1_index > 3 || row.proj2_index > 3 {
            return Err(FormatError::Schema(format!(
                "projector index ({}, {}) outside 0..=3",
                row.proj1_index, row.proj2_index
            )));
        }
        if seen[row.proj1_index][row.proj2_index] {
            return Err(FormatError::Schema(format!("duplicate row for ({}, {})", row.proj1_index, row.proj2_index)));
        }
        seen[row.proj1_index][row.proj2_index] = true;
        out.counts[row.proj1_index][row.proj2_index] = row.counts;
        rows += 1;
    }
    if rows != 16 {
        return Err(FormatError::Schema(format!("{rows} rows, expected 16")));
    }
    Ok(out)
}

pub fn write_tomo_counts<W: Write>(output: W, counts: &TomoCounts) -> Result<(), FormatError> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
    for a in 0..4 {
        for b in 0..4 {
            writer.serialize(TomoRow { proj1_index: a, proj2_index: b, counts: counts.counts[a][b] })?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_pattern<W: Write>(
    output: W,
    xs: &[f64],
    values: &[f64],
    oracle: Option<&[f64]>,
) -> Result<(), FormatError> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
    match oracle {
        Some(o) => {
            writer.write_record(["x_mm", "value", "oracle_value"])?;
            for ((x, v), w) in xs.iter().zip(values).zip(o) {
                writer.write_record([x.to_string(), v.to_string(), w.to_string()])?;
            }
        }
        None => {
            writer.write_record(["x_mm", "value"])?;
            for (x, v) in xs.iter().zip(values) {
                writer.write_record([x.to_string(), v.to_string()])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// Serialises `value` as a JSON object with a leading `"schema": 1`.
pub fn to_document<T: Serialize>(value: &T) -> Result<Value, FormatError> {
    let mut map = Map::new();
    map.insert("schema".into(), Value::from(SCHEMA_VERSION));
    match serde_json::to_value(value)? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("value".into(), other);
        }
    }
    Ok(Value::Object(map))
}

/// Reads a document written by [`to_document`], checking the schema version.
pub fn from_document<T: for<'de> Deserialize<'de>>(doc: &Value) -> Result<T, FormatError> {
    let Value::Object(map) = doc else {
        return Err(FormatError::Schema("document is not a JSON object".into()));
    };
    match map.get("schema").and_then(Value::as_u64) {
        Some(SCHEMA_VERSION) => {}
        other => return Err(FormatError::Schema(format!("schema {other:?}, expected {SCHEMA_VERSION}"))),
    }
    let mut fields = map.clone();
    fields.remove("schema");
    Ok(serde_json::from_value(Value::Object(fields))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixDoc {
    pub real: [[f64; 4]; 4],
    pub imag: [[f64; 4]; 4],
}

impl From<&DensityMatrix2Q> for DensityMatrixDoc {
    fn from(rho: &DensityMatrix2Q) -> Self {
        let m = rho.entries();
        Self {
            real: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].re)),
            imag: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].im)),
        }
    }
}

impl DensityMatrixDoc {
    pub fn to_state(&self) -> Result<DensityMatrix2Q, FormatError> {
        let m = Matrix4::from_fn(|i, j| Complex64::new(self.real[i][j], self.imag[i][j]));
        DensityMatrix2Q::new(m).map_err(|e| FormatError::Schema(e.to_string()))
    }
}
