//! Column-oriented sweep results with CSV/JSON writers.
//!
//! CSV files start with a `# units: ...` comment line, followed by the
//! header. Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::ExperimentParams;

pub const TOOL_VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Float(Vec<f64>),
    Text(Vec<String>),
    Bool(Vec<bool>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Float(v) => v.len(),
            ColumnData::Text(v) => v.len(),
            ColumnData::Bool(v) => v.len(),
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            ColumnData::Float(v) => format_float(v[row]),
            ColumnData::Text(v) => csv_escape(&v[row]),
            ColumnData::Bool(v) => v[row].to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            ColumnData::Float(v) => Value::Array(v.iter().map(|&x| float_json(x)).collect()),
            ColumnData::Text(v) => json!(v),
            ColumnData::Bool(v) => json!(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

/// Where a result came from: enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ExperimentParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool_version: TOOL_VERSION.to_string(),
            params: None,
            seed: None,
            extra: BTreeMap::new(),
        }
    }
}

/// Tabular output of a 1-D or 2-D sweep (2-D sweeps are stored long-form).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    pub schema_version: u32,
    pub units: String,
    columns: Vec<Column>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn new(name: impl Into<String>, schema_version: u32, units: impl Into<String>) -> Self {
        SweepResult {
            name: name.into(),
            schema_version,
            units: units.into(),
            columns: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn with_params(mut self, params: ExperimentParams) -> Self {
        self.provenance.params = Some(params);
        self
    }

    pub fn with_extra(mut self, key: &str, value: Value) -> Self {
        self.provenance.extra.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, data: ColumnData) -> Result<()> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if first.data.len() != data.len() {
                return Err(Error::validation(
                    name,
                    format!(
                        "column has {} rows, table has {}",
                        data.len(),
                        first.data.len()
                    ),
                ));
            }
        }
        if self.column(&name).is_some() {
            return Err(Error::validation(name, "duplicate column"));
        }
        self.columns.push(Column { name, data });
        Ok(())
    }

    pub fn push_float(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        self.push(name, ColumnData::Float(values))
    }

    pub fn push_text(&mut self, name: impl Into<String>, values: Vec<String>) -> Result<()> {
        self.push(name, ColumnData::Text(values))
    }

    pub fn push_bool(&mut self, name: impl Into<String>, values: Vec<bool>) -> Result<()> {
        self.push(name, ColumnData::Bool(values))
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn floats(&self, name: &str) -> Option<&[f64]> {
        match &self.column(name)?.data {
            ColumnData::Float(v) => Some(v),
            _ => None,
        }
    }

    pub fn texts(&self, name: &str) -> Option<&[String]> {
        match &self.column(name)?.data {
            ColumnData::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn header(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        if !self.units.is_empty() {
            let _ = writeln!(out, "# units: {}", self.units);
        }
        out.push_str(&self.header().join(","));
        out.push('\n');
        for row in 0..self.n_rows() {
            let cells: Vec<String> = self.columns.iter().map(|c| c.data.cell(row)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let columns: serde_json::Map<String, Value> = self
            .columns
            .iter()
            .map(|c| (c.name.clone(), c.data.to_json()))
            .collect();
        json!({
            "name": self.name,
            "schema_version": self.schema_version,
            "units": self.units,
            "header": self.header(),
            "columns": columns,
            "provenance": self.provenance,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json_value())
            .map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON has no infinities; they are written as strings.
pub fn float_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_float(x))
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
