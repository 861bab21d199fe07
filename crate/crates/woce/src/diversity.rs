//! The uniformity diversity metric and its conversion to consensus weights.
//!
//! Uniformity scores a partition against the whole reference set from
//! cluster-size entropy terms alone, so it is invariant to label permutation
//! and to the logarithm base (the base cancels in the ratio). The raw score
//! is not confined to `[0, 1]` on real ensembles, which is why min-max
//! rescaling across the reference set is the default weighting mode.

use crate::error::{Error, Result};
use crate::types::{Partition, ReferenceSet};

/// Term-by-term breakdown of one partition's uniformity.
#[derive(Debug, Clone, Copy)]
pub struct UniformityBreakdown {
    /// Max over clusters of `n_i * ln(n / n_i)`; non-negative.
    pub eta: f64,
    /// Max over clusters of `n_i * ln(n_i / n)`; non-positive.
    pub xi: f64,
    /// Max of the xi-style term over every cluster of every reference
    /// partition; non-positive.
    pub theta: f64,
    /// `1 - (-2 eta) / (xi + theta)`, before any normalization.
    pub raw: f64,
    /// Raw value clamped to `[0, 1]`; set-level modes live in
    /// [`weight_vector`].
    pub final_value: f64,
}

/// How raw uniformities become consensus weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Affine rescale of the raw values onto `[0, 1]` across the reference
    /// set; an all-equal set maps to all ones.
    #[default]
    MinMax,
    /// Raw values clipped to `[0, 1]`.
    Clamped,
    /// Raw values passed through untouched.
    Raw,
    /// Every partition weighted `1.0`; reduces the consensus to plain
    /// evidence accumulation.
    Uniform,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(Self::MinMax),
            "clamped" => Ok(Self::Clamped),
            "raw" => Ok(Self::Raw),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown weight mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for WeightMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::MinMax => "minmax",
            Self::Clamped => "clamped",
            Self::Raw => "raw",
            Self::Uniform => "uniform",
        })
    }
}

/// Whether uniformities are evaluated against the full reference set or the
/// partitions accumulated so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UniformityMode {
    /// Every partition scored against the complete reference set.
    #[default]
    Batch,
    /// Partition `t` scored against partitions `0..t`; the first partition
    /// faces an empty set and is defined to score `1.0`.
    Incremental,
}

impl std::str::FromStr for UniformityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "batch" => Ok(Self::Batch),
            "incremental" => Ok(Self::Incremental),
            other => Err(Error::InvalidConfig(format!(
                "unknown uniformity mode {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for UniformityMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Batch => "batch",
            Self::Incremental => "incremental",
        })
    }
}

/// Per-partition consensus weights plus the mode that produced them.
#[derive(Debug, Clone)]
pub struct WeightVector {
    weights: Vec<f64>,
    mode: WeightMode,
}

impl WeightVector {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Uniform weights of the given length; the plain-EAC special case.
    pub fn uniform(len: usize) -> Self {
        Self {
            weights: vec![1.0; len],
            mode: WeightMode::Uniform,
        }
    }

    /// Arbitrary weights, for experimentation.
    pub fn from_raw(weights: Vec<f64>, mode: WeightMode) -> Self {
        Self { weights, mode }
    }
}

/// Max over clusters of `n_i * ln(n / n_i)`; zero only for the single-cluster
/// partition.
pub fn eta(p: &Partition) -> f64 {
    let n = p.n_instances() as f64;
    p.cluster_sizes()
        .iter()
        .map(|&ni| ni as f64 * (n / ni as f64).ln())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Max over clusters of `n_i * ln(n_i / n)`; always `<= 0`.
pub fn xi(p: &Partition) -> f64 {
    let n = p.n_instances() as f64;
    p.cluster_sizes()
        .iter()
        .map(|&ni| ni as f64 * (ni as f64 / n).ln())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Max of the xi-style term over every cluster of every partition in the
/// reference set. The probe partition `p` supplies only the instance count
/// and is itself included whenever it is a member of `e`.
pub fn theta(p: &Partition, e: &ReferenceSet) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::InvalidData("theta needs a non-empty reference set".into()));
    }
    let n = p.n_instances() as f64;
    let mut best = f64::NEG_INFINITY;
    for member in e.partitions() {
        for &ni in &member.cluster_sizes() {
            best = best.max(ni as f64 * (ni as f64 / n).ln());
        }
    }
    Ok(best)
}

/// Variant of [`theta`] that skips one member of the reference set, for
/// exclude-self experiments. Errors when the remaining set is empty.
pub fn theta_excluding(p: &Partition, e: &ReferenceSet, skip: usize) -> Result<f64> {
    if e.len() <= 1 {
        return Err(Error::InvalidData(
            "exclude-self theta needs at least two reference partitions".into(),
        ));
    }
    let n = p.n_instances() as f64;
    let mut best = f64::NEG_INFINITY;
    for (idx, member) in e.partitions().iter().enumerate() {
        if idx == skip {
            continue;
        }
        for &ni in &member.cluster_sizes() {
            best = best.max(ni as f64 * (ni as f64 / n).ln());
        }
    }
    Ok(best)
}

/// Uniformity of `p` against the reference set: `1 - (-2 eta)/(xi + theta)`,
/// with a degenerate guard when the denominator vanishes (raw is `1` when
/// `eta` is also zero, else `0`).
pub fn uniformity(p: &Partition, e: &ReferenceSet) -> Result<UniformityBreakdown> {
    let eta_v = eta(p);
    let xi_v = xi(p);
    let theta_v = theta(p, e)?;
    let raw = raw_from_terms(eta_v, xi_v, theta_v);
    Ok(UniformityBreakdown {
        eta: eta_v,
        xi: xi_v,
        theta: theta_v,
        raw,
        final_value: raw.clamp(0.0, 1.0),
    })
}

fn raw_from_terms(eta_v: f64, xi_v: f64, theta_v: f64) -> f64 {
    let denom = xi_v + theta_v;
    if denom == 0.0 {
        if eta_v == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - (-2.0 * eta_v) / denom
    }
}

/// Raw uniformity of every partition in the reference set, in order.
pub fn uniformities(e: &ReferenceSet, mode: UniformityMode) -> Result<Vec<f64>> {
    match mode {
        UniformityMode::Batch => e
            .partitions()
            .iter()
            .map(|p| uniformity(p, e).map(|b| b.raw))
            .collect(),
        UniformityMode::Incremental => {
            let mut raws = Vec::with_capacity(e.len());
            for (t, p) in e.partitions().iter().enumerate() {
                if t == 0 {
                    raws.push(1.0);
                } else {
                    let prefix = ReferenceSet::new(e.partitions()[..t].to_vec())?;
                    raws.push(uniformity(p, &prefix)?.raw);
                }
            }
            Ok(raws)
        }
    }
}

/// Converts the reference set's stored raw uniformities into consensus
/// weights under the requested mode.
pub fn weight_vector(e: &ReferenceSet, mode: WeightMode) -> Result<WeightVector> {
    let raws = e.uniformities();
    if mode == WeightMode::Uniform {
        return Ok(WeightVector::uniform(e.len()));
    }
    if raws.len() != e.len() {
        return Err(Error::InvalidData(
            "uniformities not computed for this reference set".into(),
        ));
    }
    let weights = match mode {
        WeightMode::Raw => raws.to_vec(),
        WeightMode::Clamped => raws.iter().map(|r| r.clamp(0.0, 1.0)).collect(),
        WeightMode::MinMax => {
            let lo = raws.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = raws.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo == 0.0 {
                vec![1.0; raws.len()]
            } else {
                raws.iter().map(|r| (r - lo) / (hi - lo)).collect()
            }
        }
        WeightMode::Uniform => unreachable!(),
    };
    Ok(WeightVector { weights, mode })
}
