//! Feature construction, correlation analysis, and feature-set strategies.

use serde::{Deserialize, Serialize};

use crate::dimred::PcaModel;
use crate::error::{Error, Result};

/// Dense numeric observations with named columns and an aligned 0/1 label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub column_names: Vec<String>,
    data: Vec<f64>, // row-major
    pub labels: Vec<u8>,
    pub row_ids: Vec<u64>,
}

impl FeatureMatrix {
    pub fn new(
        column_names: Vec<String>,
        data: Vec<f64>,
        labels: Vec<u8>,
        row_ids: Vec<u64>,
    ) -> Result<Self> {
        let cols = column_names.len();
        if cols == 0 || data.len() % cols != 0 {
            return Err(Error::Schema("matrix shape mismatch".into()));
        }
        let rows = data.len() / cols;
        if labels.len() != rows || row_ids.len() != rows {
            return Err(Error::Schema(
                "labels/row ids not aligned to matrix rows".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &column_names {
            if !seen.insert(name) {
                return Err(Error::Schema(format!("duplicate feature column '{name}'")));
            }
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix contains non-finite entries".into()));
        }
        Ok(FeatureMatrix {
            column_names,
            data,
            labels,
            row_ids,
        })
    }

    /// Build from per-column vectors (all the same length).
    pub fn from_columns(
        columns: Vec<(String, Vec<f64>)>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        let rows = labels.len();
        for (name, values) in &columns {
            if values.len() != rows {
                return Err(Error::Schema(format!(
                    "column '{name}' has {} cells, expected {rows}",
                    values.len()
                )));
            }
        }
        let names: Vec<String> = columns.iter().map(|(n, _)| n.clone()).collect();
        let mut data = vec![0.0; rows * names.len()];
        for (j, (_, values)) in columns.iter().enumerate() {
            for (i, &x) in values.iter().enumerate() {
                data[i * names.len() + j] = x;
            }
        }
        FeatureMatrix::new(names, data, labels, (0..rows as u64).collect())
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_features();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_features() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let w = self.n_features();
        self.data[i * w + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|n| n == name)
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.rows() - self.positives()
    }

    /// New matrix containing the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let w = self.n_features();
        let mut data = Vec::with_capacity(indices.len() * w);
        let mut labels = Vec::with_capacity(indices.len());
        let mut row_ids = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
            row_ids.push(self.row_ids[i]);
        }
        FeatureMatrix {
            column_names: self.column_names.clone(),
            data,
            labels,
            row_ids,
        }
    }

    /// New matrix containing the named columns, in the given order.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureMatrix> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::Schema(format!("unknown feature column '{n}'")))
            })
            .collect::<Result<_>>()?;
        let w = names.len();
        let mut data = Vec::with_capacity(self.rows() * w);
        for i in 0..self.rows() {
            for &j in &idx {
                data.push(self.get(i, j));
            }
        }
        Ok(FeatureMatrix {
            column_names: names.to_vec(),
            data,
            labels: self.labels.clone(),
            row_ids: self.row_ids.clone(),
        })
    }

    pub fn drop_columns(&self, names: &[&str]) -> Result<FeatureMatrix> {
        let keep: Vec<String> = self
            .column_names
            .iter()
            .filter(|n| !names.contains(&n.as_str()))
            .cloned()
            .collect();
        self.select_columns(&keep)
    }

    pub fn push_column(&mut self, name: &str, values: &[f64]) -> Result<()> {
        if values.len() != self.rows() {
            return Err(Error::Schema(format!(
                "column '{name}' has {} cells, expected {}",
                values.len(),
                self.rows()
            )));
        }
        if self.column_index(name).is_some() {
            return Err(Error::Schema(format!("duplicate feature column '{name}'")));
        }
        let w = self.n_features();
        let rows = self.rows();
        let mut data = Vec::with_capacity(rows * (w + 1));
        for i in 0..rows {
            data.extend_from_slice(&self.data[i * w..(i + 1) * w]);
            data.push(values[i]);
        }
        self.data = data;
        self.column_names.push(name.to_string());
        Ok(())
    }

    pub fn labels_f64(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| l as f64).collect()
    }
}

/// Symmetric Pearson coefficient matrix with its column names.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub column_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// The four feature-set strategies the evaluation sweeps over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureStrategy {
    Original,
    SelectedConstructed,
    SelectedConstructedPc2,
    SelectedConstructedPc8,
}

impl FeatureStrategy {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "original" => Ok(FeatureStrategy::Original),
            "selected_constructed" => Ok(FeatureStrategy::SelectedConstructed),
            "selected_constructed_pc2" => Ok(FeatureStrategy::SelectedConstructedPc2),
            "selected_constructed_pc8" => Ok(FeatureStrategy::SelectedConstructedPc8),
            other => Err(Error::Config(format!("unknown feature strategy '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureStrategy::Original => "original",
            FeatureStrategy::SelectedConstructed => "selected_constructed",
            FeatureStrategy::SelectedConstructedPc2 => "selected_constructed_pc2",
            FeatureStrategy::SelectedConstructedPc8 => "selected_constructed_pc8",
        }
    }

    pub fn pca_components(&self) -> Option<usize> {
        match self {
            FeatureStrategy::SelectedConstructedPc2 => Some(2),
            FeatureStrategy::SelectedConstructedPc8 => Some(8),
            _ => None,
        }
    }
}

/// Replace the temperature and humidity pairs with their differences:
/// `MaxDifferenceTemp = MaxTemp - MinTemp` and
/// `MaxDifferenceHumidity = Humidity9am - Humidity3pm`.
pub fn construct_diffs(matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
    for required in ["MaxTemp", "MinTemp", "Humidity9am", "Humidity3pm"] {
        if matrix.column_index(required).is_none() {
            return Err(Error::Schema(format!(
                "construct_diffs requires column '{required}'"
            )));
        }
    }
    let max_t = matrix.column(matrix.column_index("MaxTemp").unwrap());
    let min_t = matrix.column(matrix.column_index("MinTemp").unwrap());
    let hum_9 = matrix.column(matrix.column_index("Humidity9am").unwrap());
    let hum_3 = matrix.column(matrix.column_index("Humidity3pm").unwrap());

    let diff_t: Vec<f64> = max_t.iter().zip(&min_t).map(|(a, b)| a - b).collect();
    let diff_h: Vec<f64> = hum_9.iter().zip(&hum_3).map(|(a, b)| a - b).collect();

    let mut out = matrix.drop_columns(&["MaxTemp", "MinTemp", "Humidity9am", "Humidity3pm"])?;
    out.push_column("MaxDifferenceTemp", &diff_t)?;
    out.push_column("MaxDifferenceHumidity", &diff_h)?;
    Ok(out)
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        cov += (xi - mx) * (yi - my);
        vx += (xi - mx) * (xi - mx);
        vy += (yi - my) * (yi - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::ConstantColumn("(zero variance in pearson)".into()));
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

/// Pairwise Pearson coefficients of all feature columns.
pub fn pearson_matrix(matrix: &FeatureMatrix) -> Result<CorrelationMatrix> {
    if matrix.rows() < 2 {
        return Err(Error::EmptyInput("pearson needs at least 2 rows".into()));
    }
    let m = matrix.n_features();
    let cols: Vec<Vec<f64>> = (0..m).map(|j| matrix.column(j)).collect();
    for (j, col) in cols.iter().enumerate() {
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        if col.iter().all(|&x| (x - mean).abs() < 1e-300) {
            return Err(Error::ConstantColumn(matrix.column_names[j].clone()));
        }
    }
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        values[i][i] = 1.0;
        for j in (i + 1)..m {
            let r = pearson(&cols[i], &cols[j])?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        column_names: matrix.column_names.clone(),
        values,
    })
}

/// Greedy correlation filter: scanning in column order, drop a column whose
/// absolute correlation with any earlier retained column exceeds `threshold`.
pub fn drop_correlated(
    matrix: &FeatureMatrix,
    corr: &CorrelationMatrix,
    threshold: f64,
) -> Result<FeatureMatrix> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!(
            "correlation threshold must be in (0, 1), got {threshold}"
        )));
    }
    if corr.column_names != matrix.column_names {
        return Err(Error::Schema(
            "correlation matrix does not match feature columns".into(),
        ));
    }
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..matrix.n_features() {
        let redundant = kept.iter().any(|&i| corr.get(i, j).abs() > threshold);
        if !redundant {
            kept.push(j);
        }
    }
    let names: Vec<String> = kept
        .iter()
        .map(|&j| matrix.column_names[j].clone())
        .collect();
    matrix.select_columns(&names)
}

/// Assemble the feature matrix for one strategy. `matrix` is the strategy's
/// base matrix (post-encoding columns for `Original`, the selected +
/// constructed columns otherwise); PC variants append PCA scores computed
/// with a model fitted on those same columns.
pub fn assemble(
    strategy: FeatureStrategy,
    matrix: &FeatureMatrix,
    pca: Option<&PcaModel>,
) -> Result<FeatureMatrix> {
    match strategy.pca_components() {
        None => Ok(matrix.clone()),
        Some(k) => {
            let model = pca.ok_or_else(|| {
                Error::Config(format!(
                    "strategy '{}' requires a fitted PCA model",
                    strategy.name()
                ))
            })?;
            if model.feature_names != matrix.column_names {
                return Err(Error::Schema(
                    "PCA model was not fitted on this strategy's columns".into(),
                ));
            }
            if k > model.n_features() {
                return Err(Error::Config(format!(
                    "strategy '{}' needs {k} components but the model has {}",
                    strategy.name(),
                    model.n_features()
                )));
            }
            let scores = model.transform(matrix, k)?;
            let mut out = matrix.clone();
            for c in 0..k {
                let col: Vec<f64> = (0..matrix.rows()).map(|i| scores.score(i, c)).collect();
                out.push_column(&format!("PC{}", c + 1), &col)?;
            }
            Ok(out)
        }
    }
}

/// Absolute label correlation per feature, normalized to sum to one.
pub fn rain_correlation_weights(matrix: &FeatureMatrix) -> Result<Vec<(String, f64)>> {
    let labels = matrix.labels_f64();
    let mut raw = Vec::with_capacity(matrix.n_features());
    for j in 0..matrix.n_features() {
        let col = matrix.column(j);
        let r = pearson(&col, &labels)?;
        raw.push(r.abs());
    }
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return Err(Error::DegenerateLabels(
            "all features are uncorrelated with the label".into(),
        ));
    }
    Ok(matrix
        .column_names
        .iter()
        .cloned()
        .zip(raw.into_iter().map(|r| r / total))
        .collect())
}
