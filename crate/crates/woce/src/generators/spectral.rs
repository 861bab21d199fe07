//! Spectral clustering on a sparse Gaussian-weighted neighbor graph.
//!
//! Symmetric k-nearest-neighbor graph with bandwidth equal to the median
//! neighbor distance, normalized Laplacian, bottom eigenvectors,
//! row-normalized embedding, seeded k-means. When the graph splits into at
//! least `k_t` connected components the components are returned directly.

use ndarray::Array2;

use super::kmeans::lloyd;
use crate::error::{Error, Result};
use crate::linalg::eigendecompose_sym;
use crate::types::{DataMatrix, Partition, validate_partition};

const MAX_NEIGHBORS: usize = 15;
const DEGREE_FLOOR: f64 = 1e-300;

/// Seeded sparse spectral clustering.
pub fn run_spectral_sparse(z: &DataMatrix, k_t: usize, seed: u64) -> Result<Partition> {
    let data = z.values();
    let n = data.nrows();
    if k_t == 0 || k_t > n {
        return Err(Error::ClusterCountOutOfRange { k: k_t, n });
    }
    if n == 1 {
        return validate_partition(&[0], 1);
    }
    let k_nn = MAX_NEIGHBORS.min(n - 1);

    // pairwise distances once; n is desk-scale here
    let mut dist = vec![0.0f64; n * n];
    let m = data.ncols();
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = (0..m)
                .map(|f| {
                    let diff = data[(i, f)] - data[(j, f)];
                    diff * diff
                })
                .sum::<f64>()
                .sqrt();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    // k nearest neighbors per point, ties broken by index
    let mut neighbor_lists: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut neighbor_dists: Vec<f64> = Vec::with_capacity(n * k_nn);
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| {
            dist[i * n + a]
                .partial_cmp(&dist[i * n + b])
                .unwrap()
                .then(a.cmp(&b))
        });
        order.truncate(k_nn);
        for &j in &order {
            neighbor_dists.push(dist[i * n + j]);
        }
        neighbor_lists.push(order);
    }
    neighbor_dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = neighbor_dists.len() / 2;
    let mut sigma = if neighbor_dists.len() % 2 == 1 {
        neighbor_dists[mid]
    } else {
        0.5 * (neighbor_dists[mid - 1] + neighbor_dists[mid])
    };
    if sigma <= 0.0 {
        sigma = 1.0;
    }

    // symmetric (union) weighted adjacency
    let mut weights = Array2::<f64>::zeros((n, n));
    for (i, nbrs) in neighbor_lists.iter().enumerate() {
        for &j in nbrs {
            let d = dist[i * n + j];
            let w = (-d * d / (2.0 * sigma * sigma)).exp();
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
    }

    // connected components over the neighbor structure
    let components = connected_components(&neighbor_lists, n);
    let n_components = components.iter().max().map_or(0, |&c| c + 1);
    if n_components >= k_t {
        return validate_partition(&components, n);
    }

    // normalized Laplacian L = I - D^{-1/2} W D^{-1/2}
    let mut inv_sqrt_degree = vec![0.0f64; n];
    for (i, slot) in inv_sqrt_degree.iter_mut().enumerate() {
        let deg: f64 = weights.row(i).sum();
        *slot = 1.0 / deg.max(DEGREE_FLOOR).sqrt();
    }
    let mut laplacian = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        laplacian[(i, i)] = 1.0;
        for j in 0..n {
            if weights[(i, j)] != 0.0 {
                laplacian[(i, j)] -= inv_sqrt_degree[i] * weights[(i, j)] * inv_sqrt_degree[j];
            }
        }
    }

    // bottom k_t eigenvectors (values come out descending)
    let dec = eigendecompose_sym(&laplacian)?;
    let mut embedding = Array2::<f64>::zeros((n, k_t));
    for (col, src) in (n - k_t..n).rev().enumerate() {
        for i in 0..n {
            embedding[(i, col)] = dec.vectors[(i, src)];
        }
    }
    for mut row in embedding.rows_mut() {
        let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|v| v / norm);
        }
    }

    let labels = lloyd(&embedding, k_t, seed)?;
    validate_partition(&labels, n)
}

fn connected_components(neighbors: &[Vec<usize>], n: usize) -> Vec<usize> {
    // union adjacency: i~j when either lists the other
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, nbrs) in neighbors.iter().enumerate() {
        for &j in nbrs {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut next = 0usize;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = next;
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if component[v] == usize::MAX {
                    component[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    component
}
