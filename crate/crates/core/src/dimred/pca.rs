//! PCA on the correlation matrix of standardized data.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::linalg;

/// Fitted PCA: standardization statistics, unit-norm loading vectors,
/// eigenvalues (descending), and explained-variance ratios.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub feature_names: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// `loadings[k]` is the k-th component's coefficient vector.
    pub loadings: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub variance_ratios: Vec<f64>,
}

/// Projected coordinates plus per-observation representation quality on
/// the first two components.
#[derive(Debug, Clone)]
pub struct PcaScores {
    pub coords: Vec<Vec<f64>>,
    pub cos2: Vec<f64>,
}

impl PcaScores {
    pub fn score(&self, row: usize, component: usize) -> f64 {
        self.coords[row][component]
    }

    pub fn rows(&self) -> usize {
        self.coords.len()
    }
}

/// Per-feature loading entries for the first two components.
#[derive(Debug, Clone)]
pub struct FeatureLoadings {
    pub entries: Vec<(String, f64, f64)>,
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn cumulative_ratio(&self, k: usize) -> f64 {
        self.variance_ratios.iter().take(k).sum()
    }

    /// Project onto the first `k` components and compute cos2 from the
    /// first two (all of them when fewer exist).
    pub fn transform(&self, matrix: &FeatureMatrix, k: usize) -> Result<PcaScores> {
        let m = self.n_features();
        if k > m {
            return Err(Error::Config(format!(
                "requested {k} components from a {m}-feature model"
            )));
        }
        if matrix.column_names != self.feature_names {
            return Err(Error::Schema(
                "matrix columns do not match the fitted PCA features".into(),
            ));
        }
        let mut coords = Vec::with_capacity(matrix.rows());
        let mut cos2 = Vec::with_capacity(matrix.rows());
        let lead = m.min(2);
        for i in 0..matrix.rows() {
            let standardized: Vec<f64> = (0..m)
                .map(|j| (matrix.get(i, j) - self.means[j]) / self.stds[j])
                .collect();
            let norm_sq: f64 = standardized.iter().map(|x| x * x).sum();
            let row: Vec<f64> = (0..k)
                .map(|c| {
                    standardized
                        .iter()
                        .zip(&self.loadings[c])
                        .map(|(x, l)| x * l)
                        .sum()
                })
                .collect();
            let lead_sq: f64 = (0..lead)
                .map(|c| {
                    let s: f64 = standardized
                        .iter()
                        .zip(&self.loadings[c])
                        .map(|(x, l)| x * l)
                        .sum();
                    s * s
                })
                .sum();
            cos2.push(if norm_sq > 0.0 {
                (lead_sq / norm_sq).min(1.0)
            } else {
                1.0
            });
            coords.push(row);
        }
        Ok(PcaScores { coords, cos2 })
    }

    /// Loading entries for components 1-2 in feature order.
    pub fn loadings_report(&self) -> FeatureLoadings {
        let entries = self
            .feature_names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let pc1 = self.loadings[0][j];
                let pc2 = if self.n_features() > 1 {
                    self.loadings[1][j]
                } else {
                    0.0
                };
                (name.clone(), pc1, pc2)
            })
            .collect();
        FeatureLoadings { entries }
    }
}

/// Fit PCA: standardize (population std), eigendecompose the correlation
/// matrix, and fix each component's sign so its largest-magnitude loading
/// is positive.
pub fn pca_fit(matrix: &FeatureMatrix) -> Result<PcaModel> {
    let n = matrix.rows();
    let m = matrix.n_features();
    if n <= m {
        return Err(Error::Schema(format!(
            "PCA needs more rows ({n}) than features ({m})"
        )));
    }

    let mut means = Vec::with_capacity(m);
    let mut stds = Vec::with_capacity(m);
    let mut standardized = vec![vec![0.0; n]; m];
    for j in 0..m {
        let col = matrix.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        if var == 0.0 {
            return Err(Error::ConstantColumn(matrix.column_names[j].clone()));
        }
        let std = var.sqrt();
        for i in 0..n {
            standardized[j][i] = (col[i] - mean) / std;
        }
        means.push(mean);
        stds.push(std);
    }

    // correlation matrix of the standardized data
    let mut corr = vec![vec![0.0; m]; m];
    for a in 0..m {
        corr[a][a] = 1.0;
        for b in (a + 1)..m {
            let dot: f64 = standardized[a]
                .iter()
                .zip(&standardized[b])
                .map(|(x, y)| x * y)
                .sum();
            let r = dot / n as f64;
            corr[a][b] = r;
            corr[b][a] = r;
        }
    }

    let (mut eigenvalues, loadings) = linalg::symmetric_eigen(&corr)?;
    for v in eigenvalues.iter_mut() {
        if *v < 0.0 {
            // correlation matrices are PSD; tiny negatives are round-off
            if *v < -1e-8 {
                return Err(Error::Numeric(format!(
                    "negative eigenvalue {v} from correlation matrix"
                )));
            }
            *v = 0.0;
        }
    }
    let total: f64 = eigenvalues.iter().sum();
    let variance_ratios = eigenvalues.iter().map(|v| v / total).collect();

    Ok(PcaModel {
        feature_names: matrix.column_names.clone(),
        means,
        stds,
        loadings,
        eigenvalues,
        variance_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(cols: Vec<(&str, Vec<f64>)>, labels: Vec<u8>) -> FeatureMatrix {
        FeatureMatrix::from_columns(
            cols.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
            labels,
        )
        .unwrap()
    }

    /// Two exactly-orthogonal standardized columns combined so their sample
    /// correlation is exactly 0.6.
    fn rho_06_matrix() -> FeatureMatrix {
        let u = [1.0, -1.0, 1.0, -1.0];
        let v = [1.0, 1.0, -1.0, -1.0];
        let x: Vec<f64> = u.to_vec();
        let y: Vec<f64> = u
            .iter()
            .zip(&v)
            .map(|(a, b)| 0.6 * a + 0.8 * b)
            .collect();
        matrix(vec![("x", x), ("y", y)], vec![0, 1, 0, 1])
    }

    #[test]
    fn correlated_pair_closed_form() {
        let model = pca_fit(&rho_06_matrix()).unwrap();
        assert!((model.eigenvalues[0] - 1.6).abs() < 1e-9);
        assert!((model.eigenvalues[1] - 0.4).abs() < 1e-9);
        assert!((model.variance_ratios[0] - 0.8).abs() < 1e-9);
        assert!((model.variance_ratios[1] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn collinear_pair_is_rank_one() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let model = pca_fit(&matrix(vec![("x", x), ("y", y)], vec![0, 1, 0, 1, 0])).unwrap();
        assert!((model.variance_ratios[0] - 1.0).abs() < 1e-9);
        assert!(model.variance_ratios[1].abs() < 1e-9);
    }

    #[test]
    fn ratios_sum_to_one_and_loadings_are_orthonormal() {
        let m = matrix(
            vec![
                ("a", vec![1.0, 2.0, 4.0, 3.0, 6.0]),
                ("b", vec![2.0, 1.0, 3.0, 5.0, 4.0]),
                ("c", vec![0.5, 2.5, 1.0, 4.0, 3.0]),
            ],
            vec![0, 1, 0, 1, 0],
        );
        let model = pca_fit(&m).unwrap();
        let total: f64 = model.variance_ratios.iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = model.loadings[i]
                    .iter()
                    .zip(&model.loadings[j])
                    .map(|(x, y)| x * y)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-8);
            }
        }
        // unit norm per component, squared
        for k in 0..3 {
            let sq: f64 = model.loadings[k].iter().map(|x| x * x).sum();
            assert!((sq - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn full_rank_transform_reconstructs() {
        let m = matrix(
            vec![
                ("a", vec![1.0, 2.0, 4.0, 3.0, 6.0]),
                ("b", vec![2.0, 1.0, 3.0, 5.0, 4.0]),
            ],
            vec![0, 1, 0, 1, 0],
        );
        let model = pca_fit(&m).unwrap();
        let scores = model.transform(&m, 2).unwrap();
        for i in 0..m.rows() {
            for j in 0..2 {
                let standardized = (m.get(i, j) - model.means[j]) / model.stds[j];
                let reconstructed: f64 = (0..2)
                    .map(|k| scores.score(i, k) * model.loadings[k][j])
                    .sum();
                assert!((standardized - reconstructed).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn point_at_means_scores_zero() {
        let m = matrix(
            vec![
                ("a", vec![1.0, 2.0, 3.0, 4.0]),
                ("b", vec![4.0, 2.0, 1.0, 3.0]),
            ],
            vec![0, 1, 0, 1],
        );
        let model = pca_fit(&m).unwrap();
        let probe = matrix(
            vec![("a", vec![2.5]), ("b", vec![2.5])],
            vec![0],
        );
        let scores = model.transform(&probe, 2).unwrap();
        assert!(scores.score(0, 0).abs() < 1e-12);
        assert!(scores.score(0, 1).abs() < 1e-12);
    }

    #[test]
    fn cos2_is_one_for_two_features() {
        let m = matrix(
            vec![
                ("a", vec![1.0, 2.0, 4.0, 3.0, 6.0]),
                ("b", vec![2.0, 1.0, 3.0, 5.0, 4.0]),
            ],
            vec![0, 1, 0, 1, 0],
        );
        let model = pca_fit(&m).unwrap();
        let scores = model.transform(&m, 2).unwrap();
        for &c in &scores.cos2 {
            assert!((c - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cos2_stays_in_unit_interval() {
        let m = matrix(
            vec![
                ("a", vec![1.0, 2.0, 4.0, 3.0, 6.0, 2.2]),
                ("b", vec![2.0, 1.0, 3.0, 5.0, 4.0, 0.4]),
                ("c", vec![0.5, 2.5, 1.0, 4.0, 3.0, 5.0]),
                ("d", vec![1.5, 0.5, 2.0, 1.0, 2.5, 3.0]),
            ],
            vec![0, 1, 0, 1, 0, 1],
        );
        let model = pca_fit(&m).unwrap();
        let scores = model.transform(&m, 4).unwrap();
        for &c in &scores.cos2 {
            assert!((0.0..=1.0).contains(&c));
        }
    }

    #[test]
    fn score_variance_matches_eigenvalue() {
        let m = matrix(
            vec![
                ("a", vec![1.0, 2.0, 4.0, 3.0, 6.0, 2.2, 0.1]),
                ("b", vec![2.0, 1.0, 3.0, 5.0, 4.0, 0.4, 1.3]),
                ("c", vec![0.5, 2.5, 1.0, 4.0, 3.0, 5.0, 2.0]),
            ],
            vec![0, 1, 0, 1, 0, 1, 0],
        );
        let model = pca_fit(&m).unwrap();
        let scores = model.transform(&m, 3).unwrap();
        let n = m.rows() as f64;
        for k in 0..3 {
            let mean: f64 = (0..m.rows()).map(|i| scores.score(i, k)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-8);
            let var: f64 = (0..m.rows())
                .map(|i| scores.score(i, k).powi(2))
                .sum::<f64>()
                / n;
            assert!((var - model.eigenvalues[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn single_feature_scores_are_standardized_values() {
        let m = matrix(vec![("a", vec![1.0, 2.0, 3.0])], vec![0, 1, 0]);
        let model = pca_fit(&m).unwrap();
        let scores = model.transform(&m, 1).unwrap();
        let sigma = (2.0_f64 / 3.0).sqrt();
        assert!((scores.score(0, 0) + 1.0 / sigma).abs() < 1e-9);
        assert!((scores.score(2, 0) - 1.0 / sigma).abs() < 1e-9);
    }

    #[test]
    fn constant_column_rejected() {
        let m = matrix(
            vec![("a", vec![1.0, 1.0, 1.0]), ("b", vec![1.0, 2.0, 3.0])],
            vec![0, 1, 0],
        );
        assert!(matches!(pca_fit(&m), Err(Error::ConstantColumn(_))));
    }

    #[test]
    fn column_mismatch_rejected() {
        let m = matrix(
            vec![("a", vec![1.0, 2.0, 3.0]), ("b", vec![3.0, 1.0, 2.0])],
            vec![0, 1, 0],
        );
        let model = pca_fit(&m).unwrap();
        let other = matrix(
            vec![("a", vec![1.0, 2.0, 3.0]), ("z", vec![3.0, 1.0, 2.0])],
            vec![0, 1, 0],
        );
        assert!(model.transform(&other, 2).is_err());
    }
}
