//! Deterministic symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit-shift
//! QL iteration, the classic EISPACK `tred2`/`tql2` pair. Output order and
//! eigenvector signs are fixed so repeated runs are bit-identical:
//! eigenvalues sort descending (stable, so exact ties keep their reduction
//! order) and each eigenvector is flipped so its largest-magnitude entry is
//! non-negative.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Maximum QL iterations per eigenvalue before giving up.
const MAX_QL_ITER: usize = 50;

/// Eigenvectors (columns of `vectors`), eigenvalues sorted descending, and
/// the symmetrized matrix they decompose.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub vectors: Array2<f64>,
    pub values: Vec<f64>,
    pub source: Array2<f64>,
}

impl EigenDecomposition {
    /// Largest absolute residual `|R q - lambda q|` over all pairs.
    pub fn max_residual(&self) -> f64 {
        let n = self.values.len();
        let mut worst = 0.0f64;
        for (idx, &lambda) in self.values.iter().enumerate() {
            for i in 0..n {
                let mut rq = 0.0;
                for j in 0..n {
                    rq += self.source[(i, j)] * self.vectors[(j, idx)];
                }
                worst = worst.max((rq - lambda * self.vectors[(i, idx)]).abs());
            }
        }
        worst
    }

    /// Largest deviation of `Q^T Q` from the identity.
    pub fn max_orthogonality_defect(&self) -> f64 {
        let n = self.values.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| self.vectors[(i, a)] * self.vectors[(i, b)]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Decomposes a symmetric matrix into orthonormal eigenvectors and
/// descending eigenvalues.
///
/// The input is symmetrized by averaging with its transpose; asymmetry
/// beyond `1e-10` is rejected as a caller bug.
pub fn eigendecompose_sym(r: &Array2<f64>) -> Result<EigenDecomposition> {
    let (rows, cols) = r.dim();
    if rows != cols {
        return Err(Error::InvalidData(format!(
            "matrix is {rows}x{cols}, not square"
        )));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigendecomposition input"));
    }
    for i in 0..rows {
        for j in (i + 1)..rows {
            if (r[(i, j)] - r[(j, i)]).abs() > 1e-10 {
                return Err(Error::NonSymmetric { i, j });
            }
        }
    }
    let n = rows;
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (r[(i, j)] + r[(j, i)]);
        }
    }
    let source = a.clone();

    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    tred2(&mut a, &mut d, &mut e);
    tql2(&mut a, &mut d, &mut e)?;

    // Stable descending sort; ties keep reduction (column) order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap());

    let mut vectors = Array2::zeros((n, n));
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(d[src]);
        // Sign convention: largest-magnitude entry non-negative (first such
        // entry wins on magnitude ties).
        let mut best = 0usize;
        for i in 1..n {
            if a[(i, src)].abs() > a[(best, src)].abs() {
                best = i;
            }
        }
        let flip = if a[(best, src)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, dst)] = flip * a[(i, src)];
        }
    }

    Ok(EigenDecomposition {
        vectors,
        values,
        source,
    })
}

/// Householder reduction of `a` to tridiagonal form, accumulating the
/// transform in `a`. On exit `d` holds the diagonal and `e` the
/// subdiagonal (with `e[0] = 0`).
fn tred2(a: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g_acc += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let delta = f * e[k] + g * a[(i, k)];
                        a[(j, k)] -= delta;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 0..i {
                    let delta = g * a[(k, i)];
                    a[(k, j)] -= delta;
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 0..i {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
}

/// Implicit-shift QL iteration on the tridiagonal `(d, e)`, rotating the
/// accumulated transform `z` so its columns become eigenvectors.
fn tql2(z: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(Error::EigenNonConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
