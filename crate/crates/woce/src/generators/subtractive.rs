//! Subtractive clustering: density potentials on the unit hypercube.
//!
//! Deterministic; the seed parameter is accepted for interface uniformity and
//! ignored.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::types::{DataMatrix, Partition, validate_partition};

const RADIUS_A: f64 = 0.5;
const RADIUS_B: f64 = 1.5 * RADIUS_A;

/// Picks the `k_t` highest-potential points as centers, squashing potentials
/// around each chosen center, then assigns every point to its nearest center.
pub fn run_subtractive(z: &DataMatrix, k_t: usize, _seed: u64) -> Result<Partition> {
    let n = z.n_instances();
    let m = z.n_features();
    if k_t == 0 || k_t > n {
        return Err(Error::ClusterCountOutOfRange { k: k_t, n });
    }

    // rescale features onto [0, 1]; constant features collapse to zero
    let mut scaled = Array2::<f64>::zeros((n, m));
    for j in 0..m {
        let col = z.values().column(j);
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            let span = hi - lo;
            for i in 0..n {
                scaled[(i, j)] = (col[i] - lo) / span;
            }
        }
    }

    let mut d2 = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = (0..m)
                .map(|f| {
                    let diff = scaled[(i, f)] - scaled[(j, f)];
                    diff * diff
                })
                .sum();
            d2[i * n + j] = d;
            d2[j * n + i] = d;
        }
    }

    let alpha = 4.0 / (RADIUS_A * RADIUS_A);
    let beta = 4.0 / (RADIUS_B * RADIUS_B);
    let mut potential: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| (-alpha * d2[i * n + j]).exp()).sum())
        .collect();

    let mut centers: Vec<usize> = Vec::with_capacity(k_t);
    for _ in 0..k_t {
        let mut pick = None;
        let mut best = f64::NEG_INFINITY;
        'candidates: for i in 0..n {
            if potential[i] <= best {
                continue;
            }
            for &c in &centers {
                let same = (0..m).all(|f| scaled[(i, f)] == scaled[(c, f)]);
                if same {
                    continue 'candidates;
                }
            }
            best = potential[i];
            pick = Some(i);
        }
        let center = pick.ok_or_else(|| {
            Error::InvalidData(format!("fewer than {k_t} distinct points for subtractive centers"))
        })?;
        let peak = potential[center];
        for i in 0..n {
            potential[i] -= peak * (-beta * d2[i * n + center]).exp();
        }
        centers.push(center);
    }

    let mut labels = vec![0usize; n];
    for i in 0..n {
        let mut best_c = 0usize;
        let mut best_d = f64::INFINITY;
        for (c, &center) in centers.iter().enumerate() {
            let d = d2[i * n + center];
            if d < best_d {
                best_d = d;
                best_c = c;
            }
        }
        labels[i] = best_c;
    }
    validate_partition(&labels, n)
}
