//! Diagonal-covariance Gaussian mixture fitted by EM.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kmeans::{kmeanspp_centers, repair_empty_clusters};
use crate::error::{Error, Result};
use crate::types::{DataMatrix, Partition, validate_partition};

const MAX_ITER: usize = 100;
const LOG_LIKELIHOOD_TOL: f64 = 1e-6;
const VARIANCE_FLOOR: f64 = 1e-6;
const EMPTY_COMPONENT_MASS: f64 = 1e-10;

pub(crate) struct GmmFit {
    pub labels: Vec<usize>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub log_likelihoods: Vec<f64>,
}

/// EM on a diagonal Gaussian mixture. Components start at k-means++ centers
/// with per-feature global variance; a component whose responsibility mass
/// vanishes is re-seeded from a random point.
pub(crate) fn fit_gmm(data: &Array2<f64>, k: usize, seed: u64) -> Result<GmmFit> {
    let (n, m) = data.dim();
    if k == 0 || k > n {
        return Err(Error::ClusterCountOutOfRange { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = kmeanspp_centers(data, k, &mut rng);

    let mut global_var = vec![0.0f64; m];
    {
        let mut mean = vec![0.0f64; m];
        for row in data.rows() {
            for (j, &v) in row.iter().enumerate() {
                mean[j] += v;
            }
        }
        for v in &mut mean {
            *v /= n as f64;
        }
        for row in data.rows() {
            for (j, &v) in row.iter().enumerate() {
                global_var[j] += (v - mean[j]) * (v - mean[j]);
            }
        }
        for v in &mut global_var {
            *v = (*v / n as f64).max(VARIANCE_FLOOR);
        }
    }

    let mut vars = Array2::<f64>::zeros((k, m));
    for c in 0..k {
        for j in 0..m {
            vars[(c, j)] = global_var[j];
        }
    }
    let mut mix = vec![1.0 / k as f64; k];

    let mut responsibilities = Array2::<f64>::zeros((n, k));
    let mut log_likelihoods = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;

    for _ in 0..MAX_ITER {
        // E step in log space
        let mut ll = 0.0;
        for i in 0..n {
            let row = data.row(i);
            let mut logp = vec![0.0f64; k];
            for c in 0..k {
                let mut acc = mix[c].ln();
                for j in 0..m {
                    let var = vars[(c, j)];
                    let diff = row[j] - means[(c, j)];
                    acc += -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + diff * diff / var);
                }
                logp[c] = acc;
            }
            let mx = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = mx + logp.iter().map(|l| (l - mx).exp()).sum::<f64>().ln();
            ll += lse;
            for c in 0..k {
                responsibilities[(i, c)] = (logp[c] - lse).exp();
            }
        }
        log_likelihoods.push(ll);

        // M step
        for c in 0..k {
            let mass: f64 = (0..n).map(|i| responsibilities[(i, c)]).sum();
            if mass < EMPTY_COMPONENT_MASS {
                let pick = rng.gen_range(0..n);
                means.row_mut(c).assign(&data.row(pick));
                for j in 0..m {
                    vars[(c, j)] = global_var[j];
                }
                mix[c] = 1.0 / n as f64;
                continue;
            }
            for j in 0..m {
                let mu: f64 = (0..n)
                    .map(|i| responsibilities[(i, c)] * data[(i, j)])
                    .sum::<f64>()
                    / mass;
                means[(c, j)] = mu;
            }
            for j in 0..m {
                let v: f64 = (0..n)
                    .map(|i| {
                        let d = data[(i, j)] - means[(c, j)];
                        responsibilities[(i, c)] * d * d
                    })
                    .sum::<f64>()
                    / mass;
                vars[(c, j)] = v.max(VARIANCE_FLOOR);
            }
            mix[c] = mass / n as f64;
        }
        let total: f64 = mix.iter().sum();
        for w in &mut mix {
            *w /= total;
        }

        if (ll - prev_ll).abs() < LOG_LIKELIHOOD_TOL {
            break;
        }
        prev_ll = ll;
    }

    let mut labels = vec![0usize; n];
    for i in 0..n {
        let mut best = 0usize;
        let mut best_r = f64::NEG_INFINITY;
        for c in 0..k {
            if responsibilities[(i, c)] > best_r {
                best_r = responsibilities[(i, c)];
                best = c;
            }
        }
        labels[i] = best;
    }
    repair_empty_clusters(data, &mut labels, &mut means, k);
    Ok(GmmFit {
        labels,
        log_likelihoods,
    })
}

/// Seeded diagonal-covariance Gaussian mixture, hardened by maximum
/// responsibility.
pub fn run_gmm(z: &DataMatrix, k_t: usize, seed: u64) -> Result<Partition> {
    let fit = fit_gmm(z.values(), k_t, seed)?;
    let p = validate_partition(&fit.labels, z.n_instances())?;
    debug_assert_eq!(p.n_clusters(), k_t);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::testutil::{blobs, co_membership_matches};

    #[test]
    fn recovers_separated_blobs() {
        let (x, truth) = blobs(15, 20);
        let p = run_gmm(&x, 2, 0).unwrap();
        assert!(co_membership_matches(&p, &truth));
    }

    #[test]
    fn log_likelihood_non_decreasing_on_blobs() {
        let (x, _) = blobs(15, 21);
        let fit = fit_gmm(x.values(), 2, 1).unwrap();
        for w in fit.log_likelihoods.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-7,
                "log-likelihood decreased: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let (x, _) = blobs(10, 22);
        let a = run_gmm(&x, 3, 5).unwrap();
        let b = run_gmm(&x, 3, 5).unwrap();
        assert_eq!(a.labels(), b.labels());
    }

    #[test]
    fn rejects_k_above_n() {
        let (x, _) = blobs(2, 0);
        assert!(run_gmm(&x, 9, 0).is_err());
    }

    #[test]
    fn fills_every_component() {
        let (x, _) = blobs(6, 23);
        for k in 2..=6 {
            let p = run_gmm(&x, k, 3).unwrap();
            assert_eq!(p.n_clusters(), k);
        }
    }
}
