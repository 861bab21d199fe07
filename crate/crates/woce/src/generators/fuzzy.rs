//! Fuzzy c-means with fuzzifier 2, hardened by maximum membership.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kmeans::{kmeanspp_centers, repair_empty_clusters, squared_distance};
use crate::error::{Error, Result};
use crate::types::{DataMatrix, Partition, validate_partition};

const MAX_ITER: usize = 200;
const MEMBERSHIP_TOL: f64 = 1e-5;

/// Seeded fuzzy c-means. Memberships use the fuzzifier-2 closed form; a point
/// coinciding with a center gets full membership in the first such center.
/// Hard labels take the maximum membership, ties to the lowest cluster index.
pub fn run_fuzzy_cmeans(z: &DataMatrix, k_t: usize, seed: u64) -> Result<Partition> {
    let data = z.values();
    let n = data.nrows();
    let m = data.ncols();
    if k_t == 0 || k_t > n {
        return Err(Error::ClusterCountOutOfRange { k: k_t, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = kmeanspp_centers(data, k_t, &mut rng);
    let mut memberships = Array2::<f64>::zeros((n, k_t));
    update_memberships(data, &centers, &mut memberships);

    for _ in 0..MAX_ITER {
        // fuzzifier 2: weights are squared memberships
        let mut next = Array2::<f64>::zeros((k_t, m));
        let mut mass = vec![0.0f64; k_t];
        for i in 0..n {
            for c in 0..k_t {
                let w = memberships[(i, c)] * memberships[(i, c)];
                mass[c] += w;
                for (j, &v) in data.row(i).iter().enumerate() {
                    next[(c, j)] += w * v;
                }
            }
        }
        for (c, &m_c) in mass.iter().enumerate() {
            if m_c > 0.0 {
                let inv = 1.0 / m_c;
                next.row_mut(c).mapv_inplace(|v| v * inv);
            } else {
                next.row_mut(c).assign(&centers.row(c));
            }
        }
        centers = next;

        let mut updated = Array2::<f64>::zeros((n, k_t));
        update_memberships(data, &centers, &mut updated);
        let delta = memberships
            .iter()
            .zip(updated.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        memberships = updated;
        if delta < MEMBERSHIP_TOL {
            break;
        }
    }

    let mut labels = vec![0usize; n];
    for i in 0..n {
        let mut best = 0usize;
        let mut best_u = f64::NEG_INFINITY;
        for c in 0..k_t {
            if memberships[(i, c)] > best_u {
                best_u = memberships[(i, c)];
                best = c;
            }
        }
        labels[i] = best;
    }
    repair_empty_clusters(data, &mut labels, &mut centers, k_t);
    let p = validate_partition(&labels, n)?;
    debug_assert_eq!(p.n_clusters(), k_t);
    Ok(p)
}

fn update_memberships(data: &Array2<f64>, centers: &Array2<f64>, out: &mut Array2<f64>) {
    let n = data.nrows();
    let k = centers.nrows();
    for i in 0..n {
        let row = data.row(i);
        let mut d2 = vec![0.0f64; k];
        let mut exact = None;
        for (c, slot) in d2.iter_mut().enumerate() {
            *slot = squared_distance(row.as_slice().unwrap(), centers.row(c).as_slice().unwrap());
            if *slot == 0.0 && exact.is_none() {
                exact = Some(c);
            }
        }
        match exact {
            Some(hit) => {
                for c in 0..k {
                    out[(i, c)] = if c == hit { 1.0 } else { 0.0 };
                }
            }
            None => {
                let total: f64 = d2.iter().map(|d| 1.0 / d).sum();
                for c in 0..k {
                    out[(i, c)] = (1.0 / d2[c]) / total;
                }
            }
        }
    }
}
