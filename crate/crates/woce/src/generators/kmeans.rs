//! Lloyd's algorithm with k-means++ seeding.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{DataMatrix, Partition, validate_partition};

const MAX_ITER: usize = 300;
const CENTER_MOVEMENT_TOL: f64 = 1e-6;

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first center uniform, the rest sampled proportionally
/// to squared distance from the nearest chosen center. When every remaining
/// point coincides with a chosen center, the first unchosen index is taken.
pub(crate) fn kmeanspp_centers(data: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let (n, m) = data.dim();
    let mut centers = Array2::zeros((k, m));
    let mut chosen = vec![false; n];
    let first = rng.gen_range(0..n);
    centers.row_mut(0).assign(&data.row(first));
    chosen[first] = true;

    let mut min_d2 = vec![0.0f64; n];
    for (i, slot) in min_d2.iter_mut().enumerate() {
        *slot = squared_distance(
            data.row(i).as_slice().unwrap(),
            centers.row(0).as_slice().unwrap(),
        );
    }
    for c in 1..k {
        let total: f64 = min_d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in min_d2.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        } else {
            (0..n).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[pick] = true;
        centers.row_mut(c).assign(&data.row(pick));
        for (i, slot) in min_d2.iter_mut().enumerate() {
            let d2 = squared_distance(
                data.row(i).as_slice().unwrap(),
                centers.row(c).as_slice().unwrap(),
            );
            if d2 < *slot {
                *slot = d2;
            }
        }
    }
    centers
}

/// Nearest-center assignment; ties go to the lowest center index.
pub(crate) fn assign(data: &Array2<f64>, centers: &Array2<f64>) -> Vec<usize> {
    let n = data.nrows();
    let k = centers.nrows();
    let mut labels = vec![0usize; n];
    for (i, label) in labels.iter_mut().enumerate() {
        let row = data.row(i);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let d = squared_distance(row.as_slice().unwrap(), centers.row(c).as_slice().unwrap());
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        *label = best;
    }
    labels
}

/// Moves the point farthest from its center into each empty cluster, so every
/// cluster index in `0..k` ends up populated. Donor clusters keep at least
/// one member.
pub(crate) fn repair_empty_clusters(
    data: &Array2<f64>,
    labels: &mut [usize],
    centers: &mut Array2<f64>,
    k: usize,
) {
    let n = data.nrows();
    for c in 0..k {
        if labels.contains(&c) {
            continue;
        }
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let mut far_idx = None;
        let mut far_d = -1.0;
        for i in 0..n {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let d = squared_distance(
                data.row(i).as_slice().unwrap(),
                centers.row(labels[i]).as_slice().unwrap(),
            );
            if d > far_d {
                far_d = d;
                far_idx = Some(i);
            }
        }
        if let Some(i) = far_idx {
            labels[i] = c;
            centers.row_mut(c).assign(&data.row(i));
        }
    }
}

/// Full Lloyd loop on a raw array; exposed for the spectral embedding step.
pub(crate) fn lloyd(data: &Array2<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = data.nrows();
    if k == 0 || k > n {
        return Err(Error::ClusterCountOutOfRange { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = kmeanspp_centers(data, k, &mut rng);
    let mut labels = vec![0usize; n];
    for _ in 0..MAX_ITER {
        labels = assign(data, &centers);
        repair_empty_clusters(data, &mut labels, &mut centers, k);
        let mut next = Array2::<f64>::zeros(centers.dim());
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            let mut row = next.row_mut(l);
            for (j, &v) in data.row(i).iter().enumerate() {
                row[j] += v;
            }
        }
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                let inv = 1.0 / count as f64;
                next.row_mut(c).mapv_inplace(|v| v * inv);
            } else {
                next.row_mut(c).assign(&centers.row(c));
            }
        }
        let movement = centers
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        centers = next;
        if movement < CENTER_MOVEMENT_TOL {
            break;
        }
    }
    labels = assign(data, &centers);
    repair_empty_clusters(data, &mut labels, &mut centers, k);
    Ok(labels)
}

/// Seeded k-means returning a validated partition with exactly `k_t`
/// clusters.
pub fn run_kmeans(z: &DataMatrix, k_t: usize, seed: u64) -> Result<Partition> {
    let labels = lloyd(z.values(), k_t, seed)?;
    let p = validate_partition(&labels, z.n_instances())?;
    debug_assert_eq!(p.n_clusters(), k_t);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::testutil::{blobs, co_membership_matches};

    #[test]
    fn recovers_separated_blobs() {
        let (x, truth) = blobs(15, 2);
        let p = run_kmeans(&x, 2, 0).unwrap();
        assert!(co_membership_matches(&p, &truth));
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let (x, _) = blobs(4, 3);
        let p = run_kmeans(&x, 8, 1).unwrap();
        assert_eq!(p.n_clusters(), 8);
        assert!(p.cluster_sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn duplicated_rows_stay_together() {
        let x = DataMatrix::from_rows(&[
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[5.0, 5.0],
            &[5.0, 5.0],
            &[9.0, 0.0],
        ])
        .unwrap();
        let p = run_kmeans(&x, 3, 4).unwrap();
        assert!(p.co_clustered(0, 1));
        assert!(p.co_clustered(2, 3));
    }

    #[test]
    fn rejects_k_above_n() {
        let (x, _) = blobs(3, 0);
        assert!(run_kmeans(&x, 7, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let (x, _) = blobs(10, 8);
        let a = run_kmeans(&x, 3, 42).unwrap();
        let b = run_kmeans(&x, 3, 42).unwrap();
        assert_eq!(a.labels(), b.labels());
    }

    #[test]
    fn always_fills_every_cluster() {
        let (x, _) = blobs(6, 9);
        for k in 2..=12 {
            for seed in 0..4 {
                let p = run_kmeans(&x, k, seed).unwrap();
                assert_eq!(p.n_clusters(), k, "k={k} seed={seed}");
            }
        }
    }
}
