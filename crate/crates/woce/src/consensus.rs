//! Weighted evidence accumulation and final-partition extraction.
//!
//! Each base partition votes its weight for every co-clustered pair; the
//! votes, divided by the partition count, form the co-association matrix.
//! Average-linkage merging on the complemented matrix produces a dendrogram
//! that is cut at the requested cluster count.

use ndarray::Array2;

use crate::diversity::{self, UniformityMode, WeightMode, WeightVector};
use crate::error::{Error, Result};
use crate::generators::{build_schedule, generate_reference_set};
use crate::linkage::{linkage, Dendrogram, LinkageMethod};
use crate::preprocess::constraint_projection;
use crate::types::{
    CoAssociationMatrix, ConstraintSet, DataMatrix, Partition, ReferenceSet,
};

/// Weighted co-association: entry `(i, j)` is the weight sum over partitions
/// that co-cluster `i` and `j`, divided by the partition count. Every
/// partition covers every instance here, so the denominator is uniformly `T`.
pub fn weac_matrix(e: &ReferenceSet, w: &WeightVector) -> Result<CoAssociationMatrix> {
    if w.len() != e.len() {
        return Err(Error::LengthMismatch {
            what: "weight vector",
            expected: e.len(),
            got: w.len(),
        });
    }
    let n = e.n_instances();
    let t = e.len() as f64;
    let mut acc = Array2::<f64>::zeros((n, n));
    for (p, &weight) in e.partitions().iter().zip(w.weights()) {
        for members in clusters_of(p) {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    acc[(i, j)] += weight;
                }
            }
        }
    }
    let diagonal: f64 = w.weights().iter().sum::<f64>() / t;
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        entries[(i, i)] = diagonal;
        for j in (i + 1)..n {
            let c = acc[(i, j)] / t;
            entries[(i, j)] = c;
            entries[(j, i)] = c;
        }
    }
    CoAssociationMatrix::new(entries, e.len())
}

/// Unweighted evidence accumulation: co-occurrence counts over the partition
/// count. Kept as an independent integer-counting route so it can
/// cross-check the weighted path.
pub fn eac_matrix(e: &ReferenceSet) -> Result<CoAssociationMatrix> {
    let n = e.n_instances();
    let t = e.len() as f64;
    let mut counts = vec![0u32; n * n];
    for p in e.partitions() {
        for members in clusters_of(p) {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        entries[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let c = f64::from(counts[i * n + j]) / t;
            entries[(i, j)] = c;
            entries[(j, i)] = c;
        }
    }
    CoAssociationMatrix::new(entries, e.len())
}

fn clusters_of(p: &Partition) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); p.n_clusters()];
    for (i, &l) in p.labels().iter().enumerate() {
        members[l].push(i);
    }
    members
}

/// Average-linkage dendrogram over the co-association matrix, with distance
/// `maxweight - c(i, j)`. Under weight modes confined to `[0, 1]` the offset
/// is exactly `1`; raw-mode weights beyond that raise it so distances stay
/// non-negative. The uniform shift leaves merge order unchanged.
pub fn average_linkage(pi: &CoAssociationMatrix) -> Result<Dendrogram> {
    let n = pi.n_instances();
    let maxweight = pi.max_entry().max(1.0);
    let mut dist = vec![0.0f64; n * n];
    let entries = pi.entries();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i * n + j] = maxweight - entries[(i, j)];
            }
        }
    }
    linkage(&dist, n, LinkageMethod::Average)
}

/// Applies the first `n - k` merges of the dendrogram, yielding exactly `k`
/// non-empty clusters.
pub fn cut_dendrogram(d: &Dendrogram, k: usize) -> Result<Partition> {
    d.cut(k)
}

/// Knobs for a full pipeline run.
#[derive(Debug, Clone)]
pub struct WoceConfig {
    /// Final cluster count.
    pub k: usize,
    /// Retained feature count for the decorrelating map; `0` keeps all.
    pub d: usize,
    /// Committee size.
    pub ensemble_size: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    pub uniformity_mode: UniformityMode,
}

impl WoceConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            d: 0,
            ensemble_size: 20,
            seed: 0,
            weight_mode: WeightMode::default(),
            uniformity_mode: UniformityMode::default(),
        }
    }
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct WoceOutcome {
    pub partition: Partition,
    pub reference: ReferenceSet,
    pub coassoc: CoAssociationMatrix,
    pub weights: WeightVector,
}

/// End-to-end pipeline: transform, generate the committee, score uniformity,
/// accumulate weighted evidence, merge, cut.
pub fn run_woce(xhat: &DataMatrix, cs: &ConstraintSet, cfg: &WoceConfig) -> Result<WoceOutcome> {
    if cfg.k < 2 {
        return Err(Error::ClusterCountOutOfRange {
            k: cfg.k,
            n: xhat.n_instances(),
        });
    }
    let z = constraint_projection(xhat, cs, cfg.d)?;
    let schedule = build_schedule(cfg.k, cfg.ensemble_size, cfg.seed)?;
    let mut reference = generate_reference_set(&z, &schedule)?;
    let raws = diversity::uniformities(&reference, cfg.uniformity_mode)?;
    reference.set_uniformities(raws)?;
    let weights = diversity::weight_vector(&reference, cfg.weight_mode)?;
    let coassoc = weac_matrix(&reference, &weights)?;
    let dendrogram = average_linkage(&coassoc)?;
    let partition = cut_dendrogram(&dendrogram, cfg.k)?;
    Ok(WoceOutcome {
        partition,
        reference,
        coassoc,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_partition;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn refset(parts: &[&[usize]]) -> ReferenceSet {
        let n = parts[0].len();
        ReferenceSet::new(
            parts
                .iter()
                .map(|l| validate_partition(l, n).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn weac_worked_example() {
        // P1 = {{0,1},{2}}, P2 = {{0},{1,2}}, weights (0.8, 0.4)
        let e = refset(&[&[0, 0, 1], &[0, 1, 1]]);
        let w = WeightVector::from_raw(vec![0.8, 0.4], WeightMode::Raw);
        let pi = weac_matrix(&e, &w).unwrap();
        let c = pi.entries();
        assert_abs_diff_eq!(c[(0, 1)], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(c[(1, 2)], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(c[(0, 2)], 0.0, epsilon = 1e-15);
        for i in 0..3 {
            assert_abs_diff_eq!(c[(i, i)], 0.6, epsilon = 1e-15);
        }
    }

    #[test]
    fn eac_worked_example() {
        let e = refset(&[&[0, 0, 1], &[0, 1, 1]]);
        let pi = eac_matrix(&e).unwrap();
        let c = pi.entries();
        assert_abs_diff_eq!(c[(0, 1)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c[(1, 2)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c[(0, 2)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn single_partition_gives_binary_matrix() {
        let e = refset(&[&[0, 0, 1, 1]]);
        let pi = eac_matrix(&e).unwrap();
        for v in pi.entries().iter() {
            assert!(*v == 0.0 || *v == 1.0);
        }
    }

    #[test]
    fn identical_partitions_offdiagonal_equals_weight() {
        let e = refset(&[&[0, 0, 1], &[0, 0, 1], &[0, 0, 1]]);
        let w = WeightVector::from_raw(vec![0.7, 0.7, 0.7], WeightMode::Raw);
        let pi = weac_matrix(&e, &w).unwrap();
        assert_abs_diff_eq!(pi.entries()[(0, 1)], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(pi.entries()[(0, 2)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_weac_equals_eac_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let n = rng.gen_range(2..=20);
            let t = rng.gen_range(1..=8);
            let parts: Vec<Vec<usize>> = (0..t)
                .map(|_| {
                    let k = rng.gen_range(1..=n);
                    (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect()
                })
                .collect();
            let refs: Vec<&[usize]> = parts.iter().map(|p| p.as_slice()).collect();
            let e = refset(&refs);
            let weighted = weac_matrix(&e, &WeightVector::uniform(t)).unwrap();
            let plain = eac_matrix(&e).unwrap();
            for (a, b) in weighted.entries().iter().zip(plain.entries().iter()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn weight_length_mismatch_rejected() {
        let e = refset(&[&[0, 0, 1], &[0, 1, 1]]);
        let w = WeightVector::from_raw(vec![1.0], WeightMode::Raw);
        assert!(weac_matrix(&e, &w).is_err());
    }

    #[test]
    fn partition_order_does_not_change_matrix() {
        let e1 = refset(&[&[0, 0, 1, 2], &[0, 1, 1, 1], &[0, 1, 2, 2]]);
        let e2 = refset(&[&[0, 1, 2, 2], &[0, 0, 1, 2], &[0, 1, 1, 1]]);
        let w1 = WeightVector::from_raw(vec![0.2, 0.5, 0.9], WeightMode::Raw);
        let w2 = WeightVector::from_raw(vec![0.9, 0.2, 0.5], WeightMode::Raw);
        let p1 = weac_matrix(&e1, &w1).unwrap();
        let p2 = weac_matrix(&e2, &w2).unwrap();
        for (a, b) in p1.entries().iter().zip(p2.entries().iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn linkage_merges_strongest_association_first() {
        let mut entries = Array2::from_elem((3, 3), 0.1);
        entries[(0, 1)] = 0.9;
        entries[(1, 0)] = 0.9;
        for i in 0..3 {
            entries[(i, i)] = 1.0;
        }
        let pi = CoAssociationMatrix::new(entries, 10).unwrap();
        let dend = average_linkage(&pi).unwrap();
        let first = dend.merges()[0];
        assert_eq!((first.a, first.b), (0, 1));
        assert_abs_diff_eq!(first.height, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn linkage_on_equal_matrix_uses_index_tie_break() {
        let mut entries = Array2::from_elem((4, 4), 0.5);
        for i in 0..4 {
            entries[(i, i)] = 1.0;
        }
        let pi = CoAssociationMatrix::new(entries, 4).unwrap();
        let dend = average_linkage(&pi).unwrap();
        assert_eq!((dend.merges()[0].a, dend.merges()[0].b), (0, 1));
    }

    #[test]
    fn block_matrix_recovers_blocks() {
        let n = 6;
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let same = (i < 3) == (j < 3);
                entries[(i, j)] = if same { 1.0 } else { 0.0 };
            }
        }
        let pi = CoAssociationMatrix::new(entries, 5).unwrap();
        let dend = average_linkage(&pi).unwrap();
        // last merge joins the two blocks at the largest height
        let last = dend.merges().last().unwrap();
        assert_abs_diff_eq!(last.height, 1.0, epsilon = 1e-12);
        let p = cut_dendrogram(&dend, 2).unwrap();
        assert_eq!(p.labels(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn weight_scaling_leaves_merge_order_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..20 {
            let n = rng.gen_range(4..=12);
            let t = rng.gen_range(2..=6);
            let parts: Vec<Vec<usize>> = (0..t)
                .map(|_| {
                    let k = rng.gen_range(1..=n.min(4));
                    (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect()
                })
                .collect();
            let refs: Vec<&[usize]> = parts.iter().map(|p| p.as_slice()).collect();
            let e = refset(&refs);
            let base: Vec<f64> = (0..t).map(|_| rng.gen_range(0.1..1.0)).collect();
            let scaled: Vec<f64> = base.iter().map(|w| w * 3.5).collect();
            let pa = weac_matrix(&e, &WeightVector::from_raw(base, WeightMode::Raw)).unwrap();
            let pb = weac_matrix(&e, &WeightVector::from_raw(scaled, WeightMode::Raw)).unwrap();
            for (a, b) in pa.entries().iter().zip(pb.entries().iter()) {
                assert_abs_diff_eq!(*b, 3.5 * *a, epsilon = 1e-12);
            }
            let da = average_linkage(&pa).unwrap();
            let db = average_linkage(&pb).unwrap();
            for k in 1..=n {
                assert_eq!(
                    da.cut(k).unwrap().labels(),
                    db.cut(k).unwrap().labels(),
                    "cut at k={k} changed under weight scaling"
                );
            }
        }
    }

    #[test]
    fn cut_always_yields_k_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let n = rng.gen_range(2..=15);
            let mut entries = Array2::zeros((n, n));
            for i in 0..n {
                for j in i..n {
                    let v = if i == j { 1.0 } else { rng.gen_range(0.0..1.0) };
                    entries[(i, j)] = v;
                    entries[(j, i)] = v;
                }
            }
            let pi = CoAssociationMatrix::new(entries, 7).unwrap();
            let dend = average_linkage(&pi).unwrap();
            for k in 1..=n {
                assert_eq!(cut_dendrogram(&dend, k).unwrap().n_clusters(), k);
            }
        }
    }

    #[test]
    fn pipeline_recovers_separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..30 {
            let c = if i < 15 { -10.0 } else { 10.0 };
            rows.push(vec![c + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let x = DataMatrix::from_rows(&refs).unwrap();
        let out = run_woce(&x, &ConstraintSet::empty(), &WoceConfig::new(2)).unwrap();
        assert_eq!(out.partition.n_clusters(), 2);
        let l = out.partition.labels();
        for i in 1..15 {
            assert_eq!(l[0], l[i]);
        }
        for i in 16..30 {
            assert_eq!(l[15], l[i]);
        }
        assert_ne!(l[0], l[15]);
    }

    #[test]
    fn pipeline_incremental_mode_runs_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..20 {
            let c = if i < 10 { -4.0 } else { 4.0 };
            rows.push(vec![c + rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0)]);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let x = DataMatrix::from_rows(&refs).unwrap();
        let mut cfg = WoceConfig::new(2);
        cfg.ensemble_size = 6;
        cfg.uniformity_mode = UniformityMode::Incremental;
        let a = run_woce(&x, &ConstraintSet::empty(), &cfg).unwrap();
        let b = run_woce(&x, &ConstraintSet::empty(), &cfg).unwrap();
        assert_eq!(a.partition.labels(), b.partition.labels());
        // the first committee member's uniformity is defined as 1.0
        assert_eq!(a.reference.uniformities()[0], 1.0);
        assert_eq!(a.partition.n_clusters(), 2);
    }

    #[test]
    fn pipeline_singletons_with_tiny_committee() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 3.0, 0.5]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let x = DataMatrix::from_rows(&refs).unwrap();
        let mut cfg = WoceConfig::new(5);
        cfg.ensemble_size = 1;
        let out = run_woce(&x, &ConstraintSet::empty(), &cfg).unwrap();
        assert_eq!(out.partition.n_clusters(), 5);
    }
}
