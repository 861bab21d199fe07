//! Agglomerative base clusterers over three dissimilarity metrics.
//!
//! Hamming on real-valued data binarizes each feature by sign after
//! z-scoring (non-negative maps to one); cosine treats all-zero vectors as
//! maximally distant from everything. Ward runs the Lance-Williams update on
//! squared dissimilarities, a formal extension for the non-euclidean metrics.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linkage::{linkage, LinkageMethod};
use crate::types::{DataMatrix, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Euclidean,
    Hamming,
    Cosine,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Euclidean => "euclidean",
            Self::Hamming => "hamming",
            Self::Cosine => "cosine",
        })
    }
}

/// Full pairwise dissimilarity matrix (flat row-major) under the metric.
pub(crate) fn distance_matrix(z: &DataMatrix, metric: Metric) -> Vec<f64> {
    let data = z.values();
    let n = data.nrows();
    let m = data.ncols();
    let mut d = vec![0.0f64; n * n];
    match metric {
        Metric::Euclidean => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let dist: f64 = (0..m)
                        .map(|f| {
                            let diff = data[(i, f)] - data[(j, f)];
                            diff * diff
                        })
                        .sum::<f64>()
                        .sqrt();
                    d[i * n + j] = dist;
                    d[j * n + i] = dist;
                }
            }
        }
        Metric::Hamming => {
            let bits = binarize_by_sign(data);
            let denom = m as f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    let differing = (0..m).filter(|&f| bits[(i, f)] != bits[(j, f)]).count();
                    let dist = differing as f64 / denom;
                    d[i * n + j] = dist;
                    d[j * n + i] = dist;
                }
            }
        }
        Metric::Cosine => {
            let norms: Vec<f64> = (0..n)
                .map(|i| data.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
                .collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    let dist = if norms[i] > 0.0 && norms[j] > 0.0 {
                        let dot: f64 = (0..m).map(|f| data[(i, f)] * data[(j, f)]).sum();
                        1.0 - dot / (norms[i] * norms[j])
                    } else {
                        1.0
                    };
                    d[i * n + j] = dist;
                    d[j * n + i] = dist;
                }
            }
        }
    }
    d
}

/// Sign bits after a per-feature z-score; constant features z-score to zero
/// and therefore read as all-ones.
fn binarize_by_sign(data: &Array2<f64>) -> Array2<bool> {
    let (n, m) = data.dim();
    let mut bits = Array2::from_elem((n, m), false);
    for j in 0..m {
        let col = data.column(j);
        let mean: f64 = col.iter().sum::<f64>() / n as f64;
        let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        for i in 0..n {
            let z = if std > 0.0 { (col[i] - mean) / std } else { 0.0 };
            bits[(i, j)] = z >= 0.0;
        }
    }
    bits
}

/// Lance-Williams merging under the chosen linkage and metric, stopped at
/// `k_t` clusters.
pub fn run_agglomerative(
    z: &DataMatrix,
    k_t: usize,
    method: LinkageMethod,
    metric: Metric,
) -> Result<Partition> {
    let n = z.n_instances();
    if k_t == 0 || k_t > n {
        return Err(Error::ClusterCountOutOfRange { k: k_t, n });
    }
    let mut d = distance_matrix(z, metric);
    if method == LinkageMethod::Ward {
        for v in &mut d {
            *v *= *v;
        }
    }
    let dend = linkage(&d, n, method)?;
    dend.cut(k_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::testutil::blobs;

    #[test]
    fn single_linkage_isolates_outlier() {
        let x = DataMatrix::from_rows(&[
            &[0.0, 0.0],
            &[0.1, 0.0],
            &[0.2, 0.0],
            &[0.3, 0.0],
            &[10.0, 0.0],
        ])
        .unwrap();
        let p = run_agglomerative(&x, 2, LinkageMethod::Single, Metric::Euclidean).unwrap();
        assert_eq!(p.cluster_sizes(), vec![4, 1]);
        assert_ne!(p.labels()[0], p.labels()[4]);
    }

    #[test]
    fn k_equals_n_means_no_merges() {
        let (x, _) = blobs(4, 40);
        let p = run_agglomerative(&x, 8, LinkageMethod::Average, Metric::Euclidean).unwrap();
        assert_eq!(p.n_clusters(), 8);
    }

    #[test]
    fn complete_and_single_differ_on_bridged_blobs() {
        // two blobs connected by a thin bridge of points
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..6 {
            rows.push(vec![i as f64 * 0.05, 0.0]);
        }
        for i in 0..6 {
            rows.push(vec![3.0 + i as f64 * 0.05, 0.0]);
        }
        for i in 1..5 {
            rows.push(vec![0.3 + i as f64 * 0.54, 0.0]);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let x = DataMatrix::from_rows(&refs).unwrap();
        let single = run_agglomerative(&x, 2, LinkageMethod::Single, Metric::Euclidean).unwrap();
        let complete =
            run_agglomerative(&x, 2, LinkageMethod::Complete, Metric::Euclidean).unwrap();
        let same = single
            .labels()
            .iter()
            .zip(complete.labels())
            .all(|(a, b)| a == b);
        assert!(!same, "bridged blobs should split differently");
    }

    #[test]
    fn all_metric_linkage_combinations_run() {
        let (x, _) = blobs(6, 41);
        for method in [
            LinkageMethod::Single,
            LinkageMethod::Average,
            LinkageMethod::Complete,
            LinkageMethod::Ward,
        ] {
            for metric in [Metric::Euclidean, Metric::Hamming, Metric::Cosine] {
                let p = run_agglomerative(&x, 3, method, metric).unwrap();
                assert_eq!(p.n_clusters(), 3, "{method} {metric}");
            }
        }
    }

    #[test]
    fn hamming_separates_sign_patterns() {
        let x = DataMatrix::from_rows(&[
            &[1.0, 1.0],
            &[2.0, 2.0],
            &[-1.0, -1.0],
            &[-2.0, -2.0],
        ])
        .unwrap();
        let p = run_agglomerative(&x, 2, LinkageMethod::Single, Metric::Hamming).unwrap();
        assert!(p.co_clustered(0, 1));
        assert!(p.co_clustered(2, 3));
        assert!(!p.co_clustered(0, 2));
    }

    #[test]
    fn cosine_handles_zero_vectors() {
        let x = DataMatrix::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[0.0, 3.0]])
            .unwrap();
        let p = run_agglomerative(&x, 3, LinkageMethod::Average, Metric::Cosine).unwrap();
        assert_eq!(p.n_clusters(), 3);
        // rows 1 and 2 are parallel: cosine distance zero, merged first
        assert!(p.co_clustered(1, 2));
    }
}
