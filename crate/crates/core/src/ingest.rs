//! CSV loading, column typing, and missingness handling.
//!
//! A [`RawTable`] keeps one value array per column plus a per-cell missing
//! mask. Cells that are empty or the literal `NA` are missing; so is any
//! cell of a numeric column that fails to parse as a decimal number.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Date,
    Label,
}

/// Declared column names and kinds, in file order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<(String, ColumnKind)>,
}

impl Schema {
    pub fn new(columns: Vec<(String, ColumnKind)>) -> Self {
        Schema { columns }
    }

    /// The 23-column Australian weather export schema.
    pub fn weather_aus() -> Self {
        use ColumnKind::*;
        let cols = [
            ("Date", Date),
            ("Location", Categorical),
            ("MinTemp", Numeric),
            ("MaxTemp", Numeric),
            ("Rainfall", Numeric),
            ("Evaporation", Numeric),
            ("Sunshine", Numeric),
            ("WindGustDir", Categorical),
            ("WindGustSpeed", Numeric),
            ("WindDir9am", Categorical),
            ("WindDir3pm", Categorical),
            ("WindSpeed9am", Numeric),
            ("WindSpeed3pm", Numeric),
            ("Humidity9am", Numeric),
            ("Humidity3pm", Numeric),
            ("Pressure9am", Numeric),
            ("Pressure3pm", Numeric),
            ("Cloud9am", Numeric),
            ("Cloud3pm", Numeric),
            ("Temp9am", Numeric),
            ("Temp3pm", Numeric),
            ("RainToday", Categorical),
            ("RainTomorrow", Label),
        ];
        Schema {
            columns: cols
                .iter()
                .map(|(n, k)| (n.to_string(), *k))
                .collect(),
        }
    }
}

/// Per-column cell storage. Numeric cells at missing positions hold NaN;
/// text cells at missing positions hold the empty string.
#[derive(Debug, Clone)]
pub enum ColumnValues {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub values: ColumnValues,
    pub missing: Vec<bool>,
}

impl Column {
    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn numeric(&self) -> Option<&[f64]> {
        match &self.values {
            ColumnValues::Numeric(v) => Some(v),
            ColumnValues::Text(_) => None,
        }
    }

    pub fn text(&self) -> Option<&[String]> {
        match &self.values {
            ColumnValues::Text(v) => Some(v),
            ColumnValues::Numeric(_) => None,
        }
    }
}

/// A parsed table: typed columns, all of equal length, with a missing mask.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub rows: usize,
    pub columns: Vec<Column>,
}

impl RawTable {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut Column> {
        self.columns.iter_mut().find(|c| c.name == name)
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn total_missing(&self) -> usize {
        self.columns.iter().map(|c| c.missing_count()).sum()
    }

    fn check_invariants(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for col in &self.columns {
            if col.values.len() != self.rows || col.missing.len() != self.rows {
                return Err(Error::Schema(format!(
                    "column '{}' has {} cells, expected {}",
                    col.name,
                    col.values.len(),
                    self.rows
                )));
            }
            if !seen.insert(col.name.clone()) {
                return Err(Error::Schema(format!("duplicate column '{}'", col.name)));
            }
        }
        Ok(())
    }
}

/// Per-column missing fraction, in schema order.
#[derive(Debug, Clone, Serialize)]
pub struct MissingnessProfile {
    pub fractions: Vec<(String, f64)>,
}

impl MissingnessProfile {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.fractions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| *f)
    }
}

fn is_missing_marker(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

/// Load a CSV file against a declared schema.
///
/// The header must match the schema's column names in order. Numeric cells
/// that fail to parse are marked missing rather than rejected.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)?;

    let header = reader.headers()?.clone();
    if header.len() != schema.columns.len() {
        return Err(Error::Schema(format!(
            "header has {} columns, schema declares {}",
            header.len(),
            schema.columns.len()
        )));
    }
    for (got, (want, _)) in header.iter().zip(&schema.columns) {
        if got != want {
            return Err(Error::Schema(format!(
                "header column '{got}' does not match declared '{want}'"
            )));
        }
    }

    let n_cols = schema.columns.len();
    let mut values: Vec<ColumnValues> = schema
        .columns
        .iter()
        .map(|(_, kind)| match kind {
            ColumnKind::Numeric => ColumnValues::Numeric(Vec::new()),
            _ => ColumnValues::Text(Vec::new()),
        })
        .collect();
    let mut missing: Vec<Vec<bool>> = vec![Vec::new(); n_cols];

    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            match &mut values[j] {
                ColumnValues::Numeric(col) => {
                    if is_missing_marker(cell) {
                        col.push(f64::NAN);
                        missing[j].push(true);
                    } else {
                        match cell.parse::<f64>() {
                            Ok(x) => {
                                col.push(x);
                                missing[j].push(false);
                            }
                            Err(_) => {
                                col.push(f64::NAN);
                                missing[j].push(true);
                            }
                        }
                    }
                }
                ColumnValues::Text(col) => {
                    if is_missing_marker(cell) {
                        col.push(String::new());
                        missing[j].push(true);
                    } else {
                        col.push(cell.to_string());
                        missing[j].push(false);
                    }
                }
            }
        }
        rows += 1;
    }

    if rows == 0 {
        return Err(Error::EmptyInput(format!(
            "{} has a header but no data rows",
            path.display()
        )));
    }

    let columns = schema
        .columns
        .iter()
        .zip(values)
        .zip(missing)
        .map(|(((name, kind), values), missing)| Column {
            name: name.clone(),
            kind: *kind,
            values,
            missing,
        })
        .collect();

    let table = RawTable { rows, columns };
    table.check_invariants()?;
    Ok(table)
}

/// Missing count / row count for every column.
pub fn missingness_profile(table: &RawTable) -> MissingnessProfile {
    let fractions = table
        .columns
        .iter()
        .map(|c| (c.name.clone(), c.missing_count() as f64 / table.rows as f64))
        .collect();
    MissingnessProfile { fractions }
}

/// Remove columns whose missing fraction strictly exceeds `threshold`.
/// Surviving columns keep their order; row count is unchanged.
pub fn drop_high_missingness(table: &RawTable, threshold: f64) -> Result<RawTable> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "missingness threshold must be in (0, 1], got {threshold}"
        )));
    }
    let columns: Vec<Column> = table
        .columns
        .iter()
        .filter(|c| (c.missing_count() as f64 / table.rows as f64) <= threshold)
        .cloned()
        .collect();
    if columns.is_empty() {
        return Err(Error::Schema(
            "all columns exceeded the missingness threshold".into(),
        ));
    }
    Ok(RawTable {
        rows: table.rows,
        columns,
    })
}
