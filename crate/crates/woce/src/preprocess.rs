//! Feature decorrelation and pairwise-constraint projection.
//!
//! The mapping stage centers the data, diagonalizes its covariance and
//! rotates onto the eigenbasis (optionally truncated to the top `d`
//! directions). The projection stage turns must-link/cannot-link pairs into
//! scatter matrices and keeps the directions along which cannot-linked pairs
//! spread more than gamma times the must-linked ones.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::eigendecompose_sym;
use crate::types::{ConstraintSet, DataMatrix};

/// Threshold above which a projection eigenvalue counts as positive; absorbs
/// round-off instead of testing `> 0` exactly.
pub const POSITIVE_EIGENVALUE_THRESHOLD: f64 = 1e-10;

/// Diagnostics from a non-trivial constraint projection.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// Projection matrix, one column per retained direction.
    pub w: Array2<f64>,
    /// All eigenvalues of `S_C - gamma * S_M`, descending.
    pub zetas: Vec<f64>,
    /// Scale balancing the cannot-link and must-link terms.
    pub gamma: f64,
    pub s_cannot: Array2<f64>,
    pub s_must: Array2<f64>,
    /// Objective value of the retained projection.
    pub objective: f64,
}

/// Subtracts the per-feature mean; the result has zero column means.
pub fn center_data(xhat: &DataMatrix) -> DataMatrix {
    let x = xhat.values();
    let (n, m) = x.dim();
    let mut means = vec![0.0f64; m];
    for row in x.rows() {
        for (j, &v) in row.iter().enumerate() {
            means[j] += v;
        }
    }
    for mj in &mut means {
        *mj /= n as f64;
    }
    let mut centered = x.clone();
    for mut row in centered.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v -= means[j];
        }
    }
    DataMatrix::with_names(centered, xhat.feature_names().map(|s| s.to_vec()))
        .expect("centering preserves validity")
}

/// Covariance `R = (1/n) X^T X` of centered data; `m x m`, symmetric.
pub fn covariance(x: &DataMatrix) -> Array2<f64> {
    let v = x.values();
    let (n, m) = v.dim();
    let mut r = v.t().dot(v);
    r.mapv_inplace(|e| e / n as f64);
    // Round-off can leave asymmetry at machine precision; average it away.
    for i in 0..m {
        for j in (i + 1)..m {
            let s = 0.5 * (r[(i, j)] + r[(j, i)]);
            r[(i, j)] = s;
            r[(j, i)] = s;
        }
    }
    r
}

/// Centers the data and rotates it onto the covariance eigenbasis sorted by
/// descending eigenvalue, keeping the first `d` directions (`d = 0` keeps
/// all). The output covariance is diagonal.
pub fn map_independent(xhat: &DataMatrix, d: usize) -> Result<DataMatrix> {
    let m = xhat.n_features();
    if d > m {
        return Err(Error::FeatureCountOutOfRange { d, m });
    }
    let keep = if d == 0 { m } else { d };
    let x = center_data(xhat);
    let r = covariance(&x);
    let dec = eigendecompose_sym(&r)?;
    let q_d = dec.vectors.slice(ndarray::s![.., 0..keep]);
    let y = x.values().dot(&q_d);
    DataMatrix::new(y)
}

/// Cannot-link and must-link scatter matrices `(S_C, S_M)`:
/// `S_C = (1/(2 n_C)) sum (y_i - y_j)(y_i - y_j)^T` over cannot pairs, and
/// the analogous sum over must pairs.
pub fn scatter_matrices(y: &DataMatrix, cs: &ConstraintSet) -> Result<(Array2<f64>, Array2<f64>)> {
    if cs.n_must() == 0 || cs.n_cannot() == 0 {
        return Err(Error::InvalidConstraints(
            "scatter matrices need both must-link and cannot-link pairs".into(),
        ));
    }
    let m = y.n_features();
    let accumulate = |pairs: &[(usize, usize)]| -> Array2<f64> {
        let mut s = Array2::zeros((m, m));
        for &(i, j) in pairs {
            let yi = y.row(i);
            let yj = y.row(j);
            for a in 0..m {
                let da = yi[a] - yj[a];
                for b in 0..m {
                    s[(a, b)] += da * (yi[b] - yj[b]);
                }
            }
        }
        let denom = 2.0 * pairs.len() as f64;
        s.mapv_inplace(|v| v / denom);
        s
    };
    Ok((accumulate(cs.cannot()), accumulate(cs.must())))
}

fn squared_distance(y: &DataMatrix, i: usize, j: usize) -> f64 {
    y.row(i)
        .iter()
        .zip(y.row(j).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Ratio of mean squared cannot-link distance to mean squared must-link
/// distance; balances the two objective terms.
pub fn estimate_gamma(y: &DataMatrix, cs: &ConstraintSet) -> Result<f64> {
    if cs.n_must() == 0 || cs.n_cannot() == 0 {
        return Err(Error::InvalidConstraints(
            "gamma needs both must-link and cannot-link pairs".into(),
        ));
    }
    let mean_sq = |pairs: &[(usize, usize)]| -> f64 {
        pairs.iter().map(|&(i, j)| squared_distance(y, i, j)).sum::<f64>() / pairs.len() as f64
    };
    let must_mean = mean_sq(cs.must());
    if must_mean == 0.0 {
        return Err(Error::DegenerateConstraints(
            "all must-link pairs have zero distance".into(),
        ));
    }
    Ok(mean_sq(cs.cannot()) / must_mean)
}

/// Objective `J(W)`, computed through two algebraically equal routes: the
/// pairwise distance sum and `trace(W^T (S_C - gamma S_M) W)`. Disagreement
/// beyond tolerance means an implementation bug and is reported as an error.
/// Returns the trace form.
pub fn objective_value(
    w: &Array2<f64>,
    y: &DataMatrix,
    cs: &ConstraintSet,
    gamma: f64,
) -> Result<f64> {
    if w.ncols() == 0 {
        return Err(Error::InvalidData("projection has no columns".into()));
    }
    let (s_cannot, s_must) = scatter_matrices(y, cs)?;

    let projected_sq = |i: usize, j: usize| -> f64 {
        let yi = y.row(i);
        let yj = y.row(j);
        let mut acc = 0.0;
        for col in w.columns() {
            let mut dot = 0.0;
            for (a, &wa) in col.iter().enumerate() {
                dot += wa * (yi[a] - yj[a]);
            }
            acc += dot * dot;
        }
        acc
    };
    let cannot_term: f64 = cs.cannot().iter().map(|&(i, j)| projected_sq(i, j)).sum::<f64>()
        / (2.0 * cs.n_cannot() as f64);
    let must_term: f64 = cs.must().iter().map(|&(i, j)| projected_sq(i, j)).sum::<f64>()
        / (2.0 * cs.n_must() as f64);
    let pairwise = cannot_term - gamma * must_term;

    let m = y.n_features();
    let mut diff = Array2::zeros((m, m));
    for a in 0..m {
        for b in 0..m {
            diff[(a, b)] = s_cannot[(a, b)] - gamma * s_must[(a, b)];
        }
    }
    let dw = diff.dot(w);
    let trace: f64 = (0..w.ncols())
        .map(|c| (0..m).map(|a| w[(a, c)] * dw[(a, c)]).sum::<f64>())
        .sum();

    let tol = 1e-8 * pairwise.abs().max(trace.abs()).max(1.0);
    if (pairwise - trace).abs() > tol {
        return Err(Error::ObjectiveMismatch { pairwise, trace });
    }
    Ok(trace)
}

/// Full transformation: decorrelating map followed by the constraint
/// projection. With no constraints the mapped data is returned untouched.
pub fn constraint_projection(
    xhat: &DataMatrix,
    cs: &ConstraintSet,
    d: usize,
) -> Result<DataMatrix> {
    Ok(constraint_projection_detailed(xhat, cs, d)?.0)
}

/// Like [`constraint_projection`] but also returns projection diagnostics
/// (`None` on the unconstrained path).
pub fn constraint_projection_detailed(
    xhat: &DataMatrix,
    cs: &ConstraintSet,
    d: usize,
) -> Result<(DataMatrix, Option<ProjectionResult>)> {
    let y = map_independent(xhat, d)?;
    if cs.is_empty() {
        return Ok((y, None));
    }
    let (s_cannot, s_must) = scatter_matrices(&y, cs)?;
    let gamma = estimate_gamma(&y, cs)?;

    let m = y.n_features();
    let mut diff = Array2::zeros((m, m));
    for a in 0..m {
        for b in 0..m {
            diff[(a, b)] = s_cannot[(a, b)] - gamma * s_must[(a, b)];
        }
    }
    let dec = eigendecompose_sym(&diff)?;
    let positive = dec
        .values
        .iter()
        .take_while(|&&z| z > POSITIVE_EIGENVALUE_THRESHOLD)
        .count();
    let keep = if positive == 0 {
        log::warn!(
            "no positive projection eigenvalue (largest {:.3e}); keeping the single largest direction",
            dec.values.first().copied().unwrap_or(f64::NAN)
        );
        1
    } else {
        positive
    };
    let w = dec.vectors.slice(ndarray::s![.., 0..keep]).to_owned();
    let z = DataMatrix::new(y.values().dot(&w))?;
    let objective = objective_value(&w, &y, cs, gamma)?;
    Ok((
        z,
        Some(ProjectionResult {
            w,
            zetas: dec.values,
            gamma,
            s_cannot,
            s_must,
            objective,
        }),
    ))
}

/// Minimum eigenvalue of a symmetric matrix; used to check positive
/// semidefiniteness in tests and diagnostics.
pub fn min_eigenvalue(s: &Array2<f64>) -> Result<f64> {
    let dec = eigendecompose_sym(s)?;
    Ok(*dec.values.last().expect("non-empty spectrum"))
}

/// Column means of a data matrix.
pub fn column_means(x: &DataMatrix) -> Array1<f64> {
    let v = x.values();
    let n = v.nrows() as f64;
    let mut means = Array1::zeros(v.ncols());
    for row in v.rows() {
        for (j, &val) in row.iter().enumerate() {
            means[j] += val;
        }
    }
    means.mapv_inplace(|s| s / n);
    means
}
