//! Small dense linear algebra used by PCA, LDA, and the linear models.
//!
//! The matrices here are at most a few dozen columns wide, so simple dense
//! routines (cyclic Jacobi for symmetric eigenproblems, Gaussian elimination
//! with partial pivoting for solves) are accurate and fast enough.

use crate::error::{Error, Result};

/// Dense symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue;
/// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`. Each
/// eigenvector is sign-fixed so its largest-magnitude entry is positive.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::Numeric("empty matrix".into()));
    }
    for row in matrix {
        if row.len() != n {
            return Err(Error::Numeric("matrix is not square".into()));
        }
    }

    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = identity(n);

    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let tol = 1e-14 * scale;

    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let off = off_diagonal_norm(&a);
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < tol * 1e-3 {
                    continue;
                }
                let (c, s) = jacobi_rotation(a[p][p], a[q][q], a[p][q]);
                apply_rotation(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if off_diagonal_norm(&a) >= tol * 10.0 {
        return Err(Error::Numeric(
            "Jacobi eigensolver did not converge".into(),
        ));
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| (a[k][k], (0..n).map(|i| v[i][k]).collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for (value, mut vector) in pairs {
        fix_sign(&mut vector);
        values.push(value);
        vectors.push(vector);
    }
    Ok((values, vectors))
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += a[i][j] * a[i][j];
        }
    }
    sum.sqrt()
}

fn jacobi_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        1.0 / (theta - (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    (c, s)
}

fn apply_rotation(a: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let n = a.len();
    for k in 0..n {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    for row in v.iter_mut() {
        let vp = row[p];
        let vq = row[q];
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

/// Flip `vector` so that its largest-magnitude entry is positive.
pub fn fix_sign(vector: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in vector.iter().enumerate() {
        if x.abs() > vector[best].abs() {
            best = i;
        }
    }
    if vector[best] < 0.0 {
        for x in vector.iter_mut() {
            *x = -*x;
        }
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Numeric("solve: dimension mismatch".into()));
    }
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() < 1e-12 {
            return Err(Error::Numeric("solve: singular matrix".into()));
        }
        m.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }

    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = m[col][n];
        for k in (col + 1)..n {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

/// Sum values in a canonical order so the result is independent of the
/// order the inputs were produced in (used where permutation invariance
/// of a reduction must hold bitwise).
pub fn stable_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.iter().sum()
}
