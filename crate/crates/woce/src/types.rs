//! Fundamental data types shared by every stage of the pipeline.
//!
//! All types validate their invariants on construction and are immutable
//! afterwards, so they can be shared read-only across worker threads.

use ndarray::Array2;

use crate::error::{Error, Result};

/// A dense matrix of `n` instances (rows) by `m` features (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
    feature_names: Option<Vec<String>>,
}

impl DataMatrix {
    /// Validates shape (`n >= 2`, `m >= 1`) and finiteness of every entry.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        Self::with_names(values, None)
    }

    pub fn with_names(values: Array2<f64>, feature_names: Option<Vec<String>>) -> Result<Self> {
        let (n, m) = values.dim();
        if n < 2 {
            return Err(Error::InvalidData(format!(
                "need at least 2 instances, got {n}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidData("need at least 1 feature".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        if let Some(names) = &feature_names {
            if names.len() != m {
                return Err(Error::LengthMismatch {
                    what: "feature names",
                    expected: m,
                    got: names.len(),
                });
            }
        }
        Ok(Self {
            values,
            feature_names,
        })
    }

    /// Builds a matrix from row slices; convenient in tests.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut values = Array2::zeros((n, m));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidData(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                values[(i, j)] = v;
            }
        }
        Self::new(values)
    }

    pub fn n_instances(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Row `i` as a slice (rows are contiguous in standard layout).
    pub fn row(&self, i: usize) -> ndarray::ArrayView1<'_, f64> {
        self.values.row(i)
    }
}

/// An assignment of `n` instances to `k` non-empty clusters.
///
/// Labels are canonical: consecutive integers `0..k` numbered by first
/// appearance. Downstream metrics depend only on co-membership and cluster
/// sizes, so renumbering is lossless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Canonicalizes `labels` (renumbering by first appearance) and checks
    /// that the length matches `n`.
    pub fn new(labels: &[usize], n: usize) -> Result<Self> {
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                what: "partition labels",
                expected: n,
                got: labels.len(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidPartition("empty partition".into()));
        }
        let mut remap: Vec<(usize, usize)> = Vec::new();
        let mut canonical = Vec::with_capacity(n);
        for &raw in labels {
            let id = match remap.iter().find(|(orig, _)| *orig == raw) {
                Some(&(_, id)) => id,
                None => {
                    let id = remap.len();
                    remap.push((raw, id));
                    id
                }
            };
            canonical.push(id);
        }
        Ok(Self {
            labels: canonical,
            k: remap.len(),
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.k
    }

    /// Cluster cardinalities; element `i` is the size of cluster `i`.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// True when `i` and `j` share a cluster.
    pub fn co_clustered(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }
}

/// Renumbers raw cluster labels to the canonical form and computes `k`.
pub fn validate_partition(labels: &[usize], n: usize) -> Result<Partition> {
    Partition::new(labels, n)
}

/// Cluster cardinalities of a partition.
pub fn cluster_sizes(p: &Partition) -> Vec<usize> {
    p.cluster_sizes()
}

/// Must-link and cannot-link instance pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    must: Vec<(usize, usize)>,
    cannot: Vec<(usize, usize)>,
}

impl ConstraintSet {
    /// Validates that all indices are in `[0, n)`, no pair is degenerate
    /// (`i == j`), and no pair appears in both lists.
    pub fn new(must: Vec<(usize, usize)>, cannot: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        let norm = |&(i, j): &(usize, usize)| (i.min(j), i.max(j));
        for &(i, j) in must.iter().chain(cannot.iter()) {
            if i >= n || j >= n {
                return Err(Error::InvalidConstraints(format!(
                    "pair ({i},{j}) out of range for {n} instances"
                )));
            }
            if i == j {
                return Err(Error::InvalidConstraints(format!(
                    "degenerate pair ({i},{i})"
                )));
            }
        }
        for m in must.iter().map(norm) {
            if cannot.iter().map(norm).any(|c| c == m) {
                return Err(Error::InvalidConstraints(format!(
                    "pair ({},{}) appears in both lists",
                    m.0, m.1
                )));
            }
        }
        Ok(Self { must, cannot })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn must(&self) -> &[(usize, usize)] {
        &self.must
    }

    pub fn cannot(&self) -> &[(usize, usize)] {
        &self.cannot
    }

    pub fn n_must(&self) -> usize {
        self.must.len()
    }

    pub fn n_cannot(&self) -> usize {
        self.cannot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.must.is_empty() && self.cannot.is_empty()
    }
}

/// The ordered committee of base partitions plus their uniformity scores.
#[derive(Debug, Clone)]
pub struct ReferenceSet {
    partitions: Vec<Partition>,
    uniformities: Vec<f64>,
}

impl ReferenceSet {
    /// Requires at least one partition, all over the same instance count.
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        let n = match partitions.first() {
            Some(p) => p.n_instances(),
            None => return Err(Error::InvalidData("reference set must be non-empty".into())),
        };
        if let Some(p) = partitions.iter().find(|p| p.n_instances() != n) {
            return Err(Error::LengthMismatch {
                what: "reference set partition",
                expected: n,
                got: p.n_instances(),
            });
        }
        Ok(Self {
            partitions,
            uniformities: Vec::new(),
        })
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn n_instances(&self) -> usize {
        self.partitions[0].n_instances()
    }

    /// Per-partition uniformity values; empty until the diversity stage runs.
    pub fn uniformities(&self) -> &[f64] {
        &self.uniformities
    }

    pub fn set_uniformities(&mut self, uniformities: Vec<f64>) -> Result<()> {
        if uniformities.len() != self.partitions.len() {
            return Err(Error::LengthMismatch {
                what: "uniformities",
                expected: self.partitions.len(),
                got: uniformities.len(),
            });
        }
        self.uniformities = uniformities;
        Ok(())
    }
}

/// Symmetric co-association matrix with the partition count used as the
/// normalizing denominator.
#[derive(Debug, Clone)]
pub struct CoAssociationMatrix {
    entries: Array2<f64>,
    beta: usize,
}

impl CoAssociationMatrix {
    /// Accepts a square matrix, rejecting asymmetry beyond `1e-12`.
    pub fn new(entries: Array2<f64>, beta: usize) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c {
            return Err(Error::InvalidData(format!("matrix is {r}x{c}, not square")));
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 {
                    return Err(Error::NonSymmetric { i, j });
                }
            }
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("co-association matrix"));
        }
        Ok(Self { entries, beta })
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn n_instances(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renumbers_by_first_appearance() {
        let p = validate_partition(&[5, 5, 9, 9], 4).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 1]);
        assert_eq!(p.n_clusters(), 2);

        let p = validate_partition(&[0, 1, 2], 3).unwrap();
        assert_eq!(p.labels(), &[0, 1, 2]);
        assert_eq!(p.n_clusters(), 3);

        let p = validate_partition(&[2, 0, 2, 1], 4).unwrap();
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.n_clusters(), 3);
    }

    #[test]
    fn validate_partition_is_idempotent() {
        let raw = [7usize, 3, 7, 1, 3, 7];
        let once = validate_partition(&raw, 6).unwrap();
        let twice = validate_partition(once.labels(), 6).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rejects_length_mismatch() {
        assert!(validate_partition(&[0, 1], 3).is_err());
    }

    #[test]
    fn sizes_count_members() {
        let p = validate_partition(&[0, 0, 1, 1], 4).unwrap();
        assert_eq!(cluster_sizes(&p), vec![2, 2]);
        let p = validate_partition(&[0, 1, 1, 1], 4).unwrap();
        assert_eq!(cluster_sizes(&p), vec![1, 3]);
        let p = validate_partition(&[0, 1, 0, 2, 2], 5).unwrap();
        assert_eq!(cluster_sizes(&p), vec![2, 1, 2]);
    }

    #[test]
    fn sizes_sum_to_n() {
        for labels in [vec![0usize, 0, 0], vec![0, 1, 2], vec![1, 0, 1]] {
            let n = labels.len();
            let p = validate_partition(&labels, n).unwrap();
            assert_eq!(cluster_sizes(&p).iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn renumbering_preserves_co_membership() {
        let raw = [9usize, 2, 9, 4, 2];
        let p = validate_partition(&raw, 5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(raw[i] == raw[j], p.co_clustered(i, j));
            }
        }
    }

    #[test]
    fn data_matrix_rejects_bad_input() {
        assert!(DataMatrix::from_rows(&[&[1.0, 2.0]]).is_err());
        assert!(DataMatrix::from_rows(&[&[1.0], &[f64::NAN]]).is_err());
        assert!(DataMatrix::from_rows(&[&[1.0], &[2.0]]).is_ok());
    }

    #[test]
    fn constraints_reject_overlap_and_bounds() {
        assert!(ConstraintSet::new(vec![(0, 1)], vec![(1, 0)], 3).is_err());
        assert!(ConstraintSet::new(vec![(0, 5)], vec![], 3).is_err());
        assert!(ConstraintSet::new(vec![(1, 1)], vec![], 3).is_err());
        let cs = ConstraintSet::new(vec![(0, 1)], vec![(1, 2)], 3).unwrap();
        assert_eq!(cs.n_must(), 1);
        assert_eq!(cs.n_cannot(), 1);
    }

    #[test]
    fn reference_set_requires_consistent_n() {
        let a = validate_partition(&[0, 1], 2).unwrap();
        let b = validate_partition(&[0, 1, 1], 3).unwrap();
        assert!(ReferenceSet::new(vec![a.clone(), b]).is_err());
        assert!(ReferenceSet::new(vec![]).is_err());
        assert!(ReferenceSet::new(vec![a]).is_ok());
    }
}
