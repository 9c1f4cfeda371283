//! Imputation, outlier capping, date handling, encoding, balancing, and
//! z-score normalization.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::ingest::{Column, ColumnKind, ColumnValues, RawTable};

#[derive(Debug, Clone, PartialEq)]
pub enum FillValue {
    Mean(f64),
    Mode(String),
}

/// Fitted per-column fill values: means for numeric columns, modes for the
/// rest, computed from non-missing cells only.
#[derive(Debug, Clone)]
pub struct ImputePlan {
    pub fills: BTreeMap<String, FillValue>,
}

/// Cap a numeric column from above.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapRule {
    pub column: String,
    pub cap: f64,
}

impl CapRule {
    pub fn new(column: &str, cap: f64) -> Self {
        CapRule {
            column: column.into(),
            cap,
        }
    }

    /// The three caps named for the weather export: Rainfall 3.2,
    /// WindSpeed9am 55, WindSpeed3pm 57.
    pub fn weather_defaults() -> Vec<CapRule> {
        vec![
            CapRule::new("Rainfall", 3.2),
            CapRule::new("WindSpeed9am", 55.0),
            CapRule::new("WindSpeed3pm", 57.0),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingKind {
    Label,
    BinaryIndicator,
}

/// Ordered category lists per categorical column. Category order is the
/// lexicographic sort of observed categories; label codes are 0..k-1.
#[derive(Debug, Clone)]
pub struct EncodingMap {
    pub columns: BTreeMap<String, (EncodingKind, Vec<String>)>,
}

impl EncodingMap {
    pub fn code(&self, column: &str, category: &str) -> Option<usize> {
        self.columns
            .get(column)
            .and_then(|(_, cats)| cats.iter().position(|c| c == category))
    }

    pub fn category(&self, column: &str, code: usize) -> Option<&str> {
        self.columns
            .get(column)
            .and_then(|(_, cats)| cats.get(code))
            .map(|s| s.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceMode {
    UndersampleNegative,
    UpsamplePositive,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BalancePlan {
    pub mode: BalanceMode,
    pub seed: u64,
}

/// Fit mean/mode fill values from the non-missing cells of each column.
/// Mode ties break toward the lexicographically smallest category.
pub fn fit_impute(table: &RawTable) -> Result<ImputePlan> {
    let mut fills = BTreeMap::new();
    for col in &table.columns {
        let fill = match &col.values {
            ColumnValues::Numeric(values) => {
                let present: Vec<f64> = values
                    .iter()
                    .zip(&col.missing)
                    .filter(|(_, &m)| !m)
                    .map(|(&v, _)| v)
                    .collect();
                if present.is_empty() {
                    return Err(Error::UnimputableColumn(col.name.clone()));
                }
                FillValue::Mean(present.iter().sum::<f64>() / present.len() as f64)
            }
            ColumnValues::Text(values) => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for (v, &m) in values.iter().zip(&col.missing) {
                    if !m {
                        *counts.entry(v.as_str()).or_insert(0) += 1;
                    }
                }
                // BTreeMap iteration is lexicographic, so the first max is
                // the smallest category among ties.
                let mode = counts
                    .iter()
                    .max_by_key(|(_, &n)| n)
                    .map(|(c, _)| c.to_string())
                    .ok_or_else(|| Error::UnimputableColumn(col.name.clone()))?;
                FillValue::Mode(mode)
            }
        };
        fills.insert(col.name.clone(), fill);
    }
    Ok(ImputePlan { fills })
}

/// Fill every missing cell from the plan. Non-missing cells are untouched.
pub fn apply_impute(table: &RawTable, plan: &ImputePlan) -> Result<RawTable> {
    let mut out = table.clone();
    for col in &mut out.columns {
        if col.missing_count() == 0 {
            continue;
        }
        let fill = plan
            .fills
            .get(&col.name)
            .ok_or_else(|| Error::PlanMismatch(col.name.clone()))?;
        match (&mut col.values, fill) {
            (ColumnValues::Numeric(values), FillValue::Mean(mean)) => {
                for (v, m) in values.iter_mut().zip(&col.missing) {
                    if *m {
                        *v = *mean;
                    }
                }
            }
            (ColumnValues::Text(values), FillValue::Mode(mode)) => {
                for (v, m) in values.iter_mut().zip(&col.missing) {
                    if *m {
                        *v = mode.clone();
                    }
                }
            }
            _ => {
                return Err(Error::PlanMismatch(format!(
                    "{} (strategy does not match column type)",
                    col.name
                )))
            }
        }
        col.missing = vec![false; out.rows];
    }
    Ok(out)
}

/// Replace values above each rule's cap with the cap itself.
pub fn cap_outliers(table: &RawTable, rules: &[CapRule]) -> Result<RawTable> {
    let mut out = table.clone();
    for rule in rules {
        if !rule.cap.is_finite() {
            return Err(Error::Config(format!(
                "cap for '{}' must be finite",
                rule.column
            )));
        }
        let col = out
            .column_mut(&rule.column)
            .ok_or_else(|| Error::Schema(format!("cap rule names unknown column '{}'", rule.column)))?;
        match &mut col.values {
            ColumnValues::Numeric(values) => {
                for (v, &m) in values.iter_mut().zip(&col.missing) {
                    if !m && *v > rule.cap {
                        *v = rule.cap;
                    }
                }
            }
            ColumnValues::Text(_) => {
                return Err(Error::Type(format!(
                    "cap rule on non-numeric column '{}'",
                    rule.column
                )))
            }
        }
    }
    Ok(out)
}

fn parse_date(cell: &str, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(cell, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(cell, "%d/%m/%Y"))
        .map_err(|_| Error::Parse {
            row,
            message: format!("cannot parse date '{cell}'"),
        })
}

/// Replace the date column with a numeric `Month` column (1..12), in place.
pub fn extract_month(table: &RawTable) -> Result<RawTable> {
    let date_idx = table
        .columns
        .iter()
        .position(|c| c.kind == ColumnKind::Date)
        .ok_or_else(|| Error::Schema("no date column to extract month from".into()))?;
    let col = &table.columns[date_idx];
    let cells = col.text().ok_or_else(|| {
        Error::Type(format!("date column '{}' is not text-valued", col.name))
    })?;
    let mut months = Vec::with_capacity(table.rows);
    for (row, (cell, &m)) in cells.iter().zip(&col.missing).enumerate() {
        if m {
            return Err(Error::Parse {
                row,
                message: "missing date cell".into(),
            });
        }
        months.push(parse_date(cell, row)?.month() as f64);
    }
    let mut out = table.clone();
    out.columns[date_idx] = Column {
        name: "Month".into(),
        kind: ColumnKind::Numeric,
        values: ColumnValues::Numeric(months),
        missing: vec![false; table.rows],
    };
    Ok(out)
}

/// Fit the encoding for every non-numeric column: binary indicators for
/// `RainToday`, label codes (lexicographic category order) elsewhere.
pub fn fit_encoding(table: &RawTable) -> Result<EncodingMap> {
    let mut columns = BTreeMap::new();
    for col in &table.columns {
        if matches!(col.kind, ColumnKind::Numeric) {
            continue;
        }
        if col.kind == ColumnKind::Date {
            return Err(Error::Schema(format!(
                "date column '{}' must be converted before encoding",
                col.name
            )));
        }
        let cells = col
            .text()
            .ok_or_else(|| Error::Type(format!("column '{}' is not text-valued", col.name)))?;
        if col.missing.iter().any(|&m| m) {
            return Err(Error::Encoding(format!(
                "column '{}' still has missing cells; impute before encoding",
                col.name
            )));
        }
        let mut cats: Vec<String> = cells.to_vec();
        cats.sort();
        cats.dedup();
        let kind = if col.name == "RainToday" {
            EncodingKind::BinaryIndicator
        } else {
            EncodingKind::Label
        };
        if kind == EncodingKind::BinaryIndicator && cats.len() != 2 {
            return Err(Error::Encoding(format!(
                "binary-indicator column '{}' has {} categories, expected 2",
                col.name,
                cats.len()
            )));
        }
        if col.kind == ColumnKind::Label && cats.len() != 2 {
            return Err(Error::DegenerateLabels(format!(
                "label column '{}' has {} categories, expected 2",
                col.name,
                cats.len()
            )));
        }
        columns.insert(col.name.clone(), (kind, cats));
    }
    Ok(EncodingMap { columns })
}

/// Encode a fully-imputed table into a numeric feature matrix. The label
/// column becomes the 0/1 label vector (categories in sorted order, so
/// "No" -> 0 and "Yes" -> 1); `RainToday` becomes two complementary
/// indicator columns.
pub fn encode(table: &RawTable, map: &EncodingMap) -> Result<FeatureMatrix> {
    if table.total_missing() > 0 {
        return Err(Error::Encoding(
            "table still has missing cells; impute before encoding".into(),
        ));
    }
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut labels: Option<Vec<u8>> = None;

    for col in &table.columns {
        match (&col.values, col.kind) {
            (ColumnValues::Numeric(values), _) => {
                columns.push((col.name.clone(), values.clone()));
            }
            (ColumnValues::Text(cells), ColumnKind::Label) => {
                let mut out = Vec::with_capacity(table.rows);
                for cell in cells {
                    let code = map.code(&col.name, cell).ok_or_else(|| {
                        Error::Encoding(format!(
                            "unseen category '{cell}' in label column '{}'",
                            col.name
                        ))
                    })?;
                    out.push(code as u8);
                }
                labels = Some(out);
            }
            (ColumnValues::Text(cells), _) => {
                let (kind, _) = map.columns.get(&col.name).ok_or_else(|| {
                    Error::Encoding(format!("no encoding fitted for column '{}'", col.name))
                })?;
                match kind {
                    EncodingKind::Label => {
                        let mut out = Vec::with_capacity(table.rows);
                        for cell in cells {
                            let code = map.code(&col.name, cell).ok_or_else(|| {
                                Error::Encoding(format!(
                                    "unseen category '{cell}' in column '{}'",
                                    col.name
                                ))
                            })?;
                            out.push(code as f64);
                        }
                        columns.push((col.name.clone(), out));
                    }
                    EncodingKind::BinaryIndicator => {
                        let mut zero = Vec::with_capacity(table.rows);
                        let mut one = Vec::with_capacity(table.rows);
                        for cell in cells {
                            let code = map.code(&col.name, cell).ok_or_else(|| {
                                Error::Encoding(format!(
                                    "unseen category '{cell}' in column '{}'",
                                    col.name
                                ))
                            })?;
                            zero.push(if code == 0 { 1.0 } else { 0.0 });
                            one.push(if code == 1 { 1.0 } else { 0.0 });
                        }
                        columns.push((format!("{}_0", col.name), zero));
                        columns.push((format!("{}_1", col.name), one));
                    }
                }
            }
        }
    }

    let labels = labels.ok_or_else(|| Error::Schema("table has no label column".into()))?;
    FeatureMatrix::from_columns(columns, labels)
}

/// Equalize class counts: undersample the negatives (keeping every
/// positive) or upsample the positives by seeded duplication.
pub fn balance(matrix: &FeatureMatrix, plan: &BalancePlan) -> Result<FeatureMatrix> {
    let pos: Vec<usize> = (0..matrix.rows()).filter(|&i| matrix.labels[i] == 1).collect();
    let neg: Vec<usize> = (0..matrix.rows()).filter(|&i| matrix.labels[i] == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateLabels(
            "balancing requires both classes present".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    match plan.mode {
        BalanceMode::UndersampleNegative => {
            if neg.len() < pos.len() {
                return Err(Error::DegenerateLabels(
                    "negative class is already smaller than positive".into(),
                ));
            }
            let mut shuffled = neg.clone();
            shuffled.shuffle(&mut rng);
            let mut keep: Vec<usize> = pos.iter().chain(shuffled[..pos.len()].iter()).copied().collect();
            keep.sort_unstable();
            Ok(matrix.select_rows(&keep))
        }
        BalanceMode::UpsamplePositive => {
            if pos.len() > neg.len() {
                return Err(Error::DegenerateLabels(
                    "positive class is already larger than negative".into(),
                ));
            }
            let mut indices: Vec<usize> = (0..matrix.rows()).collect();
            for _ in 0..(neg.len() - pos.len()) {
                indices.push(pos[rng.random_range(0..pos.len())]);
            }
            Ok(matrix.select_rows(&indices))
        }
    }
}

/// Standardize every column to mean 0, population std 1. Returns the
/// per-column statistics used.
pub fn zscore(matrix: &FeatureMatrix) -> Result<(FeatureMatrix, Vec<(f64, f64)>)> {
    let n = matrix.rows() as f64;
    let mut out = matrix.clone();
    let mut stats = Vec::with_capacity(matrix.n_features());
    for j in 0..matrix.n_features() {
        let col = matrix.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        if std == 0.0 {
            return Err(Error::ConstantColumn(matrix.column_names[j].clone()));
        }
        for i in 0..matrix.rows() {
            out.set(i, j, (matrix.get(i, j) - mean) / std);
        }
        stats.push((mean, std));
    }
    Ok((out, stats))
}

/// Standardize with statistics fitted elsewhere (e.g. on the training split).
pub fn zscore_with(matrix: &FeatureMatrix, stats: &[(f64, f64)]) -> Result<FeatureMatrix> {
    if stats.len() != matrix.n_features() {
        return Err(Error::Schema(
            "z-score statistics do not match feature count".into(),
        ));
    }
    let mut out = matrix.clone();
    for (j, &(mean, std)) in stats.iter().enumerate() {
        if std == 0.0 {
            return Err(Error::ConstantColumn(matrix.column_names[j].clone()));
        }
        for i in 0..matrix.rows() {
            out.set(i, j, (matrix.get(i, j) - mean) / std);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Schema;
    use std::io::Write;

    fn table_from_csv(content: &str, schema: &Schema) -> RawTable {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        crate::ingest::load_csv(f.path(), schema).unwrap()
    }

    fn num_cat_schema() -> Schema {
        Schema::new(vec![
            ("X".into(), ColumnKind::Numeric),
            ("C".into(), ColumnKind::Categorical),
            ("RainTomorrow".into(), ColumnKind::Label),
        ])
    }

    #[test]
    fn mean_and_mode_fills() {
        let t = table_from_csv(
            "X,C,RainTomorrow\n1,A,No\n,A,No\n3,B,Yes\n2,,Yes\n",
            &num_cat_schema(),
        );
        let plan = fit_impute(&t).unwrap();
        assert_eq!(plan.fills["X"], FillValue::Mean(2.0));
        assert_eq!(plan.fills["C"], FillValue::Mode("A".into()));
    }

    #[test]
    fn mode_tie_breaks_lexicographically() {
        let t = table_from_csv(
            "X,C,RainTomorrow\n1,B,No\n2,A,Yes\n",
            &num_cat_schema(),
        );
        let plan = fit_impute(&t).unwrap();
        assert_eq!(plan.fills["C"], FillValue::Mode("A".into()));
    }

    #[test]
    fn all_missing_column_is_unimputable() {
        let t = table_from_csv("X,C,RainTomorrow\n,A,No\nNA,B,Yes\n", &num_cat_schema());
        assert!(matches!(
            fit_impute(&t),
            Err(Error::UnimputableColumn(_))
        ));
    }

    #[test]
    fn impute_fills_all_missing() {
        let t = table_from_csv(
            "X,C,RainTomorrow\n1,A,No\n,A,No\n3,,Yes\n",
            &num_cat_schema(),
        );
        let plan = fit_impute(&t).unwrap();
        let out = apply_impute(&t, &plan).unwrap();
        assert_eq!(out.total_missing(), 0);
        assert_eq!(out.column("X").unwrap().numeric().unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(out.column("C").unwrap().text().unwrap()[2], "A");
    }

    #[test]
    fn impute_without_missing_is_identity() {
        let t = table_from_csv("X,C,RainTomorrow\n1,A,No\n3,B,Yes\n", &num_cat_schema());
        let plan = fit_impute(&t).unwrap();
        let out = apply_impute(&t, &plan).unwrap();
        assert_eq!(out.column("X").unwrap().numeric().unwrap(), &[1.0, 3.0]);
        assert_eq!(out.column("C").unwrap().text().unwrap(), &["A", "B"]);
    }

    #[test]
    fn uncovered_column_is_plan_mismatch() {
        let t = table_from_csv("X,C,RainTomorrow\n,A,No\n2,B,Yes\n", &num_cat_schema());
        let plan = ImputePlan {
            fills: BTreeMap::new(),
        };
        assert!(matches!(
            apply_impute(&t, &plan),
            Err(Error::PlanMismatch(_))
        ));
    }

    #[test]
    fn caps_clip_from_above_only() {
        let t = table_from_csv(
            "X,C,RainTomorrow\n5.0,A,No\n1.0,B,Yes\n3.2,A,No\n",
            &num_cat_schema(),
        );
        let out = cap_outliers(&t, &[CapRule::new("X", 3.2)]).unwrap();
        assert_eq!(out.column("X").unwrap().numeric().unwrap(), &[3.2, 1.0, 3.2]);
    }

    #[test]
    fn cap_on_categorical_is_type_error() {
        let t = table_from_csv("X,C,RainTomorrow\n1,A,No\n2,B,Yes\n", &num_cat_schema());
        assert!(matches!(
            cap_outliers(&t, &[CapRule::new("C", 1.0)]),
            Err(Error::Type(_))
        ));
    }

    fn date_schema() -> Schema {
        Schema::new(vec![
            ("Date".into(), ColumnKind::Date),
            ("X".into(), ColumnKind::Numeric),
            ("RainTomorrow".into(), ColumnKind::Label),
        ])
    }

    #[test]
    fn month_from_iso_and_dmy() {
        let t = table_from_csv(
            "Date,X,RainTomorrow\n2010-06-15,1,No\n01/12/2010,2,Yes\n",
            &date_schema(),
        );
        let out = extract_month(&t).unwrap();
        assert_eq!(out.column_names(), vec!["Month", "X", "RainTomorrow"]);
        assert_eq!(out.column("Month").unwrap().numeric().unwrap(), &[6.0, 12.0]);
    }

    #[test]
    fn bad_date_reports_row() {
        let t = table_from_csv(
            "Date,X,RainTomorrow\n2010-06-15,1,No\nnot-a-date,2,Yes\n",
            &date_schema(),
        );
        match extract_month(&t) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    fn rain_schema() -> Schema {
        Schema::new(vec![
            ("W".into(), ColumnKind::Categorical),
            ("RainToday".into(), ColumnKind::Categorical),
            ("X".into(), ColumnKind::Numeric),
            ("RainTomorrow".into(), ColumnKind::Label),
        ])
    }

    #[test]
    fn encoding_codes_follow_sorted_categories() {
        let t = table_from_csv(
            "W,RainToday,X,RainTomorrow\nS,Yes,1,No\nE,No,2,Yes\nN,No,3,Yes\n",
            &rain_schema(),
        );
        let map = fit_encoding(&t).unwrap();
        assert_eq!(map.code("W", "E"), Some(0));
        assert_eq!(map.code("W", "N"), Some(1));
        assert_eq!(map.code("W", "S"), Some(2));
        let m = encode(&t, &map).unwrap();
        assert_eq!(
            m.column_names,
            vec!["W", "RainToday_0", "RainToday_1", "X"]
        );
        // RainToday "Yes" -> (0, 1), "No" -> (1, 0)
        assert_eq!(m.column(1), vec![0.0, 1.0, 1.0]);
        assert_eq!(m.column(2), vec![1.0, 0.0, 0.0]);
        assert_eq!(m.labels, vec![0, 1, 1]);
    }

    #[test]
    fn indicator_columns_sum_to_one() {
        let t = table_from_csv(
            "W,RainToday,X,RainTomorrow\nE,Yes,1,No\nE,No,2,Yes\n",
            &rain_schema(),
        );
        let map = fit_encoding(&t).unwrap();
        let m = encode(&t, &map).unwrap();
        for i in 0..m.rows() {
            assert_eq!(m.get(i, 1) + m.get(i, 2), 1.0);
        }
    }

    #[test]
    fn unseen_category_is_encoding_error() {
        let t = table_from_csv(
            "W,RainToday,X,RainTomorrow\nE,Yes,1,No\nE,No,2,Yes\n",
            &rain_schema(),
        );
        let map = fit_encoding(&t).unwrap();
        let t2 = table_from_csv(
            "W,RainToday,X,RainTomorrow\nS,Yes,1,No\nE,No,2,Yes\n",
            &rain_schema(),
        );
        assert!(matches!(encode(&t2, &map), Err(Error::Encoding(_))));
    }

    #[test]
    fn label_round_trip() {
        let t = table_from_csv(
            "W,RainToday,X,RainTomorrow\nE,Yes,1,No\nW,No,2,Yes\n",
            &rain_schema(),
        );
        let map = fit_encoding(&t).unwrap();
        for cat in ["E", "W"] {
            let code = map.code("W", cat).unwrap();
            assert_eq!(map.category("W", code), Some(cat));
        }
    }

    fn labeled_matrix(n_pos: usize, n_neg: usize) -> FeatureMatrix {
        let mut labels = vec![1u8; n_pos];
        labels.extend(vec![0u8; n_neg]);
        let col: Vec<f64> = (0..n_pos + n_neg).map(|i| i as f64).collect();
        FeatureMatrix::from_columns(vec![("x".into(), col)], labels).unwrap()
    }

    #[test]
    fn undersample_equalizes_counts() {
        let m = labeled_matrix(100, 300);
        let out = balance(
            &m,
            &BalancePlan {
                mode: BalanceMode::UndersampleNegative,
                seed: 7,
            },
        )
        .unwrap();
        assert_eq!(out.positives(), 100);
        assert_eq!(out.negatives(), 100);
    }

    #[test]
    fn upsample_equalizes_counts() {
        let m = labeled_matrix(100, 300);
        let out = balance(
            &m,
            &BalancePlan {
                mode: BalanceMode::UpsamplePositive,
                seed: 7,
            },
        )
        .unwrap();
        assert_eq!(out.positives(), 300);
        assert_eq!(out.negatives(), 300);
    }

    #[test]
    fn balanced_input_is_unchanged_multiset() {
        let m = labeled_matrix(50, 50);
        let out = balance(
            &m,
            &BalancePlan {
                mode: BalanceMode::UndersampleNegative,
                seed: 3,
            },
        )
        .unwrap();
        let mut got: Vec<u64> = out.row_ids.clone();
        got.sort_unstable();
        let mut want: Vec<u64> = m.row_ids.clone();
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn balance_is_seed_reproducible() {
        let m = labeled_matrix(40, 160);
        let plan = BalancePlan {
            mode: BalanceMode::UndersampleNegative,
            seed: 99,
        };
        let a = balance(&m, &plan).unwrap();
        let b = balance(&m, &plan).unwrap();
        assert_eq!(a.row_ids, b.row_ids);
    }

    #[test]
    fn single_class_is_degenerate() {
        let m = labeled_matrix(10, 0);
        assert!(matches!(
            balance(
                &m,
                &BalancePlan {
                    mode: BalanceMode::UndersampleNegative,
                    seed: 0
                }
            ),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn zscore_standardizes_with_population_std() {
        let m = FeatureMatrix::from_columns(
            vec![("x".into(), vec![1.0, 2.0, 3.0])],
            vec![0, 1, 0],
        )
        .unwrap();
        let (out, stats) = zscore(&m).unwrap();
        let sigma = (2.0_f64 / 3.0).sqrt();
        assert!((out.get(0, 0) + 1.0 / sigma).abs() < 1e-12);
        assert!((out.get(1, 0)).abs() < 1e-12);
        assert!((out.get(2, 0) - 1.0 / sigma).abs() < 1e-12);
        assert!((out.get(2, 0) - 1.2247).abs() < 1e-4);
        assert_eq!(stats[0].0, 2.0);
    }

    #[test]
    fn zscore_is_a_fixed_point() {
        let m = FeatureMatrix::from_columns(
            vec![("x".into(), vec![1.0, 5.0, 2.0, 9.0])],
            vec![0, 1, 0, 1],
        )
        .unwrap();
        let (once, _) = zscore(&m).unwrap();
        let (twice, _) = zscore(&once).unwrap();
        for i in 0..m.rows() {
            assert!((once.get(i, 0) - twice.get(i, 0)).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_column_is_named_in_error() {
        let m = FeatureMatrix::from_columns(
            vec![("flat".into(), vec![5.0, 5.0])],
            vec![0, 1],
        )
        .unwrap();
        match zscore(&m) {
            Err(Error::ConstantColumn(name)) => assert_eq!(name, "flat"),
            other => panic!("expected constant-column error, got {other:?}"),
        }
    }
}
