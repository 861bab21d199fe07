//! Agglomerative merging over a precomputed dissimilarity matrix.
//!
//! One engine serves both the base clusterers (all four linkages) and the
//! consensus stage (average linkage on the co-association distances).
//! Clusters carry scipy-style identifiers: originals are `0..n`, the cluster
//! born in merge step `s` is `n + s`. Ties on dissimilarity break toward the
//! lexicographically smallest identifier pair, which pins the merge order.

use crate::error::{Error, Result};
use crate::types::{Partition, validate_partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkageMethod {
    Single,
    Complete,
    Average,
    /// Lance-Williams ward update; callers feed squared dissimilarities.
    Ward,
}

impl std::fmt::Display for LinkageMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Single => "single",
            Self::Complete => "complete",
            Self::Average => "average",
            Self::Ward => "ward",
        })
    }
}

/// One merge step: the two cluster ids joined and the dissimilarity at which
/// they merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// A full merge history over `n_leaves` observations.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn new(n_leaves: usize, merges: Vec<Merge>) -> Result<Self> {
        if merges.len() + 1 != n_leaves.max(1) {
            return Err(Error::InvalidData(format!(
                "dendrogram over {n_leaves} leaves needs {} merges, got {}",
                n_leaves.saturating_sub(1),
                merges.len()
            )));
        }
        Ok(Self { n_leaves, merges })
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Applies the first `n - k` merges and returns the resulting `k`
    /// clusters, canonicalized.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.n_leaves;
        if k < 1 || k > n {
            return Err(Error::ClusterCountOutOfRange { k, n });
        }
        // cluster id -> representative leaf set id via union-find over ids
        let total = n + self.merges.len();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (step, m) in self.merges.iter().take(n - k).enumerate() {
            let new_id = n + step;
            let ra = find(&mut parent, m.a);
            let rb = find(&mut parent, m.b);
            parent[ra] = new_id;
            parent[rb] = new_id;
        }
        let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        validate_partition(&labels, n)
    }
}

/// Runs agglomerative clustering on a symmetric dissimilarity matrix given as
/// a flat row-major `n x n` buffer. Heights are the dissimilarities at merge
/// time (squared units for ward when the input is squared).
pub fn linkage(dist: &[f64], n: usize, method: LinkageMethod) -> Result<Dendrogram> {
    if dist.len() != n * n {
        return Err(Error::LengthMismatch {
            what: "dissimilarity matrix",
            expected: n * n,
            got: dist.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidData("no observations".into()));
    }
    if dist.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("dissimilarity matrix"));
    }

    // Active slots hold current distances; slot i starts as observation i.
    let mut d = dist.to_vec();
    let mut active: Vec<bool> = vec![true; n];
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<f64> = vec![1.0; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        // smallest (distance, id_lo, id_hi) over active pairs
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let dij = d[i * n + j];
                let (lo, hi) = if ids[i] < ids[j] {
                    (ids[i], ids[j])
                } else {
                    (ids[j], ids[i])
                };
                let better = match &best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => {
                        (dij, lo, hi) < (*bd, *blo, *bhi)
                    }
                };
                if better {
                    best = Some((dij, lo, hi, i, j));
                }
            }
        }
        let (height, id_lo, id_hi, si, sj) = best.expect("at least two active clusters");
        merges.push(Merge {
            a: id_lo,
            b: id_hi,
            height,
        });

        // merge slot sj into slot si
        let (sa, sb) = (sizes[si], sizes[sj]);
        let dab = d[si * n + sj];
        for x in 0..n {
            if !active[x] || x == si || x == sj {
                continue;
            }
            let dax = d[si * n + x];
            let dbx = d[sj * n + x];
            let updated = match method {
                LinkageMethod::Single => dax.min(dbx),
                LinkageMethod::Complete => dax.max(dbx),
                LinkageMethod::Average => (sa * dax + sb * dbx) / (sa + sb),
                LinkageMethod::Ward => {
                    let sx = sizes[x];
                    ((sa + sx) * dax + (sb + sx) * dbx - sx * dab) / (sa + sb + sx)
                }
            };
            d[si * n + x] = updated;
            d[x * n + si] = updated;
        }
        active[sj] = false;
        sizes[si] = sa + sb;
        ids[si] = n + step;
    }

    Dendrogram::new(n, merges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_from(points: &[f64]) -> (Vec<f64>, usize) {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = (points[i] - points[j]).abs();
            }
        }
        (d, n)
    }

    #[test]
    fn chain_isolates_outlier_under_single_linkage() {
        let (d, n) = dist_from(&[0.0, 0.1, 0.2, 0.3, 10.0]);
        let dend = linkage(&d, n, LinkageMethod::Single).unwrap();
        let p = dend.cut(2).unwrap();
        assert_eq!(p.labels()[0], p.labels()[3]);
        assert_ne!(p.labels()[0], p.labels()[4]);
    }

    #[test]
    fn cut_extremes() {
        let (d, n) = dist_from(&[0.0, 1.0, 5.0, 6.0]);
        let dend = linkage(&d, n, LinkageMethod::Average).unwrap();
        assert_eq!(dend.cut(n).unwrap().n_clusters(), n);
        assert_eq!(dend.cut(1).unwrap().n_clusters(), 1);
        assert!(dend.cut(0).is_err());
        assert!(dend.cut(n + 1).is_err());
    }

    #[test]
    fn complete_and_single_differ_on_chained_points() {
        // a slowly widening chain: single linkage chains through it and only
        // isolates the far end, complete linkage splits it into two compact
        // halves
        let pts = [0.0, 1.0, 2.1, 3.3, 4.6];
        let (d, n) = dist_from(&pts);
        let single = linkage(&d, n, LinkageMethod::Single).unwrap().cut(2).unwrap();
        let complete = linkage(&d, n, LinkageMethod::Complete)
            .unwrap()
            .cut(2)
            .unwrap();
        assert_eq!(single.labels(), &[0, 0, 0, 0, 1]);
        assert_eq!(complete.labels(), &[0, 0, 1, 1, 1]);
    }

    #[test]
    fn average_heights_non_decreasing() {
        let pts = [0.3, 1.7, 0.9, 4.2, 4.4, 0.1, 3.9, 2.5];
        let (d, n) = dist_from(&pts);
        let dend = linkage(&d, n, LinkageMethod::Average).unwrap();
        for w in dend.merges().windows(2) {
            assert!(w[0].height <= w[1].height + 1e-12);
        }
    }

    #[test]
    fn tie_break_follows_smallest_ids() {
        // all pairwise distances equal: merges follow id order
        let n = 4;
        let mut d = vec![1.0; n * n];
        for i in 0..n {
            d[i * n + i] = 0.0;
        }
        let dend = linkage(&d, n, LinkageMethod::Average).unwrap();
        assert_eq!((dend.merges()[0].a, dend.merges()[0].b), (0, 1));
        assert_eq!((dend.merges()[1].a, dend.merges()[1].b), (2, 3));
        // third merge joins the two size-2 clusters (ids 4 and 5)
        assert_eq!((dend.merges()[2].a, dend.merges()[2].b), (4, 5));
    }

    #[test]
    fn ward_merges_squared_scale() {
        let (mut d, n) = dist_from(&[0.0, 1.0, 10.0, 11.0]);
        for v in &mut d {
            *v *= *v;
        }
        let p = linkage(&d, n, LinkageMethod::Ward).unwrap().cut(2).unwrap();
        assert_eq!(p.labels()[0], p.labels()[1]);
        assert_eq!(p.labels()[2], p.labels()[3]);
        assert_ne!(p.labels()[0], p.labels()[2]);
    }
}
