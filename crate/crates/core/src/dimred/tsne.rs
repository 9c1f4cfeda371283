//! Exact O(M^2) t-SNE: perplexity-calibrated Gaussian affinities in the
//! input space, Student-t similarities in the plane, KL divergence
//! minimized by gradient descent with momentum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomentumSchedule {
    pub initial: f64,
    pub switched: f64,
    /// Fraction of iterations after which momentum switches.
    pub switch_at: f64,
}

impl Default for MomentumSchedule {
    fn default() -> Self {
        MomentumSchedule {
            initial: 0.5,
            switched: 0.8,
            switch_at: 0.25,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub output_dim: usize,
    pub learning_rate: f64,
    pub iterations: usize,
    pub momentum: MomentumSchedule,
    pub seed: u64,
    /// Multiply affinities by 12 for the first 15% of iterations.
    pub early_exaggeration: bool,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            output_dim: 2,
            learning_rate: 200.0,
            iterations: 500,
            momentum: MomentumSchedule::default(),
            seed: 0,
            early_exaggeration: true,
        }
    }
}

impl TsneConfig {
    fn validate(&self, n_points: usize) -> Result<()> {
        if n_points < 3 {
            return Err(Error::EmptyInput("t-SNE needs at least 3 points".into()));
        }
        if !(self.perplexity > 0.0 && self.perplexity < n_points as f64) {
            return Err(Error::Config(format!(
                "perplexity {} must be positive and below the point count {n_points}",
                self.perplexity
            )));
        }
        if self.output_dim != 2 {
            return Err(Error::Config("t-SNE output dimension must be 2".into()));
        }
        Ok(())
    }
}

/// Low-dimensional points with the KL value reached and its per-iteration
/// trace.
#[derive(Debug, Clone)]
pub struct TsneEmbedding {
    pub points: Vec<[f64; 2]>,
    pub final_kl: f64,
    pub kl_trace: Vec<f64>,
}

fn squared_distances(matrix: &FeatureMatrix) -> Vec<Vec<f64>> {
    let n = matrix.rows();
    let mut d = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let dist: f64 = matrix
                .row(a)
                .iter()
                .zip(matrix.row(b))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            d[a][b] = dist;
            d[b][a] = dist;
        }
    }
    d
}

/// Conditional affinity row for one point at the given precision
/// `beta = 1/(2 sigma^2)`, plus its perplexity `2^H`.
fn conditional_row(distances: &[f64], a: usize, beta: f64) -> (Vec<f64>, f64) {
    let n = distances.len();
    let mut row = vec![0.0; n];
    // subtract the min distance inside exp for stability; cancels in the ratio
    let min_d = distances
        .iter()
        .enumerate()
        .filter(|&(b, _)| b != a)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for b in 0..n {
        if b == a {
            continue;
        }
        let p = (-beta * (distances[b] - min_d)).exp();
        row[b] = p;
        sum += p;
    }
    let mut entropy_bits = 0.0;
    for b in 0..n {
        if b == a {
            continue;
        }
        row[b] /= sum;
        if row[b] > 0.0 {
            entropy_bits -= row[b] * row[b].log2();
        }
    }
    (row, entropy_bits.exp2())
}

/// Per-point bisection on the Gaussian bandwidth so each conditional
/// distribution's perplexity matches the target within 1e-4 relative.
/// Returns the conditional affinity matrix and the fitted sigmas.
pub fn tsne_conditional_affinities(
    matrix: &FeatureMatrix,
    config: &TsneConfig,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    config.validate(matrix.rows())?;
    let n = matrix.rows();
    let distances = squared_distances(matrix);
    let target = config.perplexity;
    let tol = 1e-4 * target;

    let rows: Vec<Result<(Vec<f64>, f64)>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut beta = 1.0;
            let mut beta_min = 0.0_f64;
            let mut beta_max = f64::INFINITY;
            let mut row = Vec::new();
            let mut perp = 0.0;
            let mut converged = false;
            for _ in 0..200 {
                let (r, p) = conditional_row(&distances[a], a, beta);
                row = r;
                perp = p;
                if (perp - target).abs() <= tol {
                    converged = true;
                    break;
                }
                if perp > target {
                    // distribution too spread out: sharpen
                    beta_min = beta;
                    beta = if beta_max.is_infinite() {
                        beta * 2.0
                    } else {
                        0.5 * (beta + beta_max)
                    };
                } else {
                    beta_max = beta;
                    beta = 0.5 * (beta + beta_min);
                }
            }
            if !converged {
                return Err(Error::Calibration(format!(
                    "point {a}: perplexity {perp:.6} did not reach target {target} in 200 bisection steps"
                )));
            }
            let sigma = (1.0 / (2.0 * beta)).sqrt();
            Ok((row, sigma))
        })
        .collect();

    let mut conditional = Vec::with_capacity(n);
    let mut sigmas = Vec::with_capacity(n);
    for r in rows {
        let (row, sigma) = r?;
        conditional.push(row);
        sigmas.push(sigma);
    }
    Ok((conditional, sigmas))
}

/// Symmetrized joint affinities: `(q(b|a) + q(a|b)) / 2M`, zero diagonal,
/// total sum one.
pub fn tsne_affinities(matrix: &FeatureMatrix, config: &TsneConfig) -> Result<Vec<Vec<f64>>> {
    let (conditional, _) = tsne_conditional_affinities(matrix, config)?;
    let n = conditional.len();
    let scale = 2.0 * n as f64;
    let mut joint = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                joint[a][b] = (conditional[a][b] + conditional[b][a]) / scale;
            }
        }
    }
    Ok(joint)
}

/// Student-t similarities of the embedding, normalized over all pairs.
fn student_t_q(points: &[[f64; 2]]) -> (Vec<Vec<f64>>, f64) {
    let n = points.len();
    let mut weights = vec![vec![0.0; n]; n];
    let mut row_sums = vec![0.0; n];
    for a in 0..n {
        let mut acc = 0.0;
        for b in 0..n {
            if a == b {
                continue;
            }
            let dx = points[a][0] - points[b][0];
            let dy = points[a][1] - points[b][1];
            let w = 1.0 / (1.0 + dx * dx + dy * dy);
            weights[a][b] = w;
            acc += w;
        }
        row_sums[a] = acc;
    }
    // combine per-row sums in index order so the total is thread-count
    // independent
    let total: f64 = row_sums.iter().sum();
    (weights, total)
}

/// KL(P || Q(points)), the embedding objective.
pub(crate) fn kl_objective(p: &[Vec<f64>], points: &[[f64; 2]]) -> f64 {
    let (weights, total) = student_t_q(points);
    let n = points.len();
    let mut kl = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let pij = p[a][b];
            if pij > 0.0 {
                let qij = (weights[a][b] / total).max(1e-300);
                kl += pij * (pij / qij).ln();
            }
        }
    }
    kl
}

/// Analytic gradient of `kl_objective` with respect to each point.
pub(crate) fn kl_gradient(p: &[Vec<f64>], points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (weights, total) = student_t_q(points);
    let n = points.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut g = [0.0, 0.0];
            for b in 0..n {
                if a == b {
                    continue;
                }
                let q = weights[a][b] / total;
                let factor = 4.0 * (p[a][b] - q) * weights[a][b];
                g[0] += factor * (points[a][0] - points[b][0]);
                g[1] += factor * (points[a][1] - points[b][1]);
            }
            g
        })
        .collect()
}

/// Gradient descent with momentum on the KL objective. The returned trace
/// holds KL against the unexaggerated affinities at the start of every
/// iteration; `final_kl` is the value for the returned points.
pub fn tsne_embed(affinities: &[Vec<f64>], config: &TsneConfig) -> Result<TsneEmbedding> {
    let n = affinities.len();
    config.validate(n)?;
    if affinities.iter().any(|row| row.len() != n) {
        return Err(Error::Schema("affinity matrix is not square".into()));
    }
    let total: f64 = affinities.iter().flat_map(|r| r.iter()).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Schema(format!(
            "affinity matrix sums to {total}, expected 1"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = Normal::new(0.0, 1e-4).unwrap();
    let mut points: Vec<[f64; 2]> = (0..n)
        .map(|_| [init.sample(&mut rng), init.sample(&mut rng)])
        .collect();
    let mut velocity = vec![[0.0_f64; 2]; n];

    let exaggeration_end = if config.early_exaggeration {
        ((config.iterations as f64) * 0.15).ceil() as usize
    } else {
        0
    };
    let exaggerated: Vec<Vec<f64>> = affinities
        .iter()
        .map(|row| row.iter().map(|&p| p * 12.0).collect())
        .collect();
    let switch_iter = ((config.iterations as f64) * config.momentum.switch_at) as usize;

    let mut kl_trace = Vec::with_capacity(config.iterations);
    for iter in 0..config.iterations {
        kl_trace.push(kl_objective(affinities, &points));
        let p = if iter < exaggeration_end {
            &exaggerated
        } else {
            affinities
        };
        let gradient = kl_gradient(p, &points);
        for (a, g) in gradient.iter().enumerate() {
            if !g[0].is_finite() || !g[1].is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite t-SNE gradient at iteration {iter}"
                )));
            }
            let momentum = if iter < switch_iter {
                config.momentum.initial
            } else {
                config.momentum.switched
            };
            for d in 0..2 {
                velocity[a][d] = momentum * velocity[a][d] - config.learning_rate * g[d];
                points[a][d] += velocity[a][d];
            }
        }
        // recenter to keep coordinates bounded
        let mut mean = [0.0, 0.0];
        for p in &points {
            mean[0] += p[0];
            mean[1] += p[1];
        }
        mean[0] /= n as f64;
        mean[1] /= n as f64;
        for p in points.iter_mut() {
            p[0] -= mean[0];
            p[1] -= mean[1];
        }
    }

    let final_kl = kl_objective(affinities, &points);
    Ok(TsneEmbedding {
        points,
        final_kl,
        kl_trace,
    })
}

/// Discrete KL divergence `sum p ln(p/q)`; terms with `p = 0` contribute 0.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Domain("distributions differ in support size".into()));
    }
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::Domain(
                    "q has zero mass where p is positive".into(),
                ));
            }
            kl += pi * (pi / qi).ln();
        }
    }
    Ok(kl)
}
