//! External evaluation metrics: optimal-relabeling accuracy and NMI.

use crate::error::{Error, Result};
use crate::types::Partition;

/// Classification accuracy after optimally matching predicted clusters to
/// ground-truth classes (maximum-weight assignment on the contingency
/// matrix, padded square).
pub fn accuracy_hungarian(pred: &Partition, truth: &[usize]) -> Result<f64> {
    let n = truth.len();
    if pred.n_instances() != n {
        return Err(Error::LengthMismatch {
            what: "accuracy inputs",
            expected: n,
            got: pred.n_instances(),
        });
    }
    let k_pred = pred.n_clusters();
    let k_true = truth.iter().max().map_or(0, |&m| m + 1);
    let side = k_pred.max(k_true);
    let mut contingency = vec![0i64; side * side];
    for (i, &t) in truth.iter().enumerate() {
        contingency[pred.labels()[i] * side + t] += 1;
    }
    let cost: Vec<i64> = contingency.iter().map(|&c| -c).collect();
    let assignment = hungarian_min(&cost, side);
    let matched: i64 = assignment
        .iter()
        .enumerate()
        .map(|(row, &col)| contingency[row * side + col])
        .sum();
    Ok(matched as f64 / n as f64)
}

/// Minimum-cost perfect assignment on a square cost matrix; returns the
/// column assigned to each row. Standard potentials formulation, O(n^3).
pub(crate) fn hungarian_min(cost: &[i64], side: usize) -> Vec<usize> {
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; side + 1];
    let mut v = vec![0i64; side + 1];
    let mut assigned_row = vec![0usize; side + 1]; // column -> row (1-based)
    let mut way = vec![0usize; side + 1];

    for row in 1..=side {
        assigned_row[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![inf; side + 1];
        let mut used = vec![false; side + 1];
        loop {
            used[j0] = true;
            let i0 = assigned_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=side {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * side + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=side {
                if used[j] {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; side];
    for j in 1..=side {
        if assigned_row[j] > 0 {
            row_to_col[assigned_row[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Normalized mutual information between two partitions, in `[0, 1]`.
/// Both-single-cluster inputs define the 0/0 case as `1`.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    let n = a.n_instances();
    if b.n_instances() != n {
        return Err(Error::LengthMismatch {
            what: "nmi inputs",
            expected: n,
            got: b.n_instances(),
        });
    }
    let ka = a.n_clusters();
    let kb = b.n_clusters();
    let mut joint = vec![0usize; ka * kb];
    for i in 0..n {
        joint[a.labels()[i] * kb + b.labels()[i]] += 1;
    }
    let sizes_a = a.cluster_sizes();
    let sizes_b = b.cluster_sizes();
    let nf = n as f64;

    let mut numerator = 0.0;
    for ia in 0..ka {
        for ib in 0..kb {
            let nab = joint[ia * kb + ib];
            if nab == 0 {
                continue;
            }
            let nab = nab as f64;
            numerator += nab * (nab * nf / (sizes_a[ia] as f64 * sizes_b[ib] as f64)).ln();
        }
    }
    numerator *= -2.0;

    let entropy_term = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .map(|&s| s as f64 * (s as f64 / nf).ln())
            .sum::<f64>()
    };
    let denominator = entropy_term(&sizes_a) + entropy_term(&sizes_b);
    if denominator == 0.0 {
        // both partitions single-cluster
        return Ok(1.0);
    }
    Ok(numerator / denominator)
}
