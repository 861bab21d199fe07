//! The base-clusterer bank and the decentralization schedule.
//!
//! A schedule enumerates seventeen clusterer kinds once each (k-means, fuzzy
//! c-means, Gaussian mixture, subtractive, four linkages times three metrics,
//! sparse spectral), then fills any remaining committee slots with seed-varied
//! repeats of k-means, fuzzy c-means and spectral. Target cluster counts
//! rotate round-robin over `[2, k + 2]`.

mod agglomerative;
mod fuzzy;
mod gmm;
mod kmeans;
mod spectral;
mod subtractive;

pub use agglomerative::{run_agglomerative, Metric};
pub use fuzzy::run_fuzzy_cmeans;
pub use gmm::run_gmm;
pub use kmeans::run_kmeans;
pub use spectral::run_spectral_sparse;
pub use subtractive::run_subtractive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linkage::LinkageMethod;
use crate::types::{DataMatrix, Partition, ReferenceSet};

/// One base clusterer variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    KMeans,
    FuzzyCMeans,
    Gmm,
    Subtractive,
    Agglomerative {
        linkage: LinkageMethod,
        metric: Metric,
    },
    SpectralSparse,
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::KMeans => write!(f, "kmeans"),
            Self::FuzzyCMeans => write!(f, "fuzzy_cmeans"),
            Self::Gmm => write!(f, "gmm"),
            Self::Subtractive => write!(f, "subtractive"),
            Self::Agglomerative { linkage, metric } => {
                write!(f, "{linkage}_linkage_{metric}")
            }
            Self::SpectralSparse => write!(f, "spectral_sparse"),
        }
    }
}

/// The seventeen implemented kinds in bank order.
pub fn kind_order() -> Vec<GeneratorKind> {
    let mut kinds = vec![
        GeneratorKind::KMeans,
        GeneratorKind::FuzzyCMeans,
        GeneratorKind::Gmm,
        GeneratorKind::Subtractive,
    ];
    for linkage in [
        LinkageMethod::Single,
        LinkageMethod::Average,
        LinkageMethod::Complete,
        LinkageMethod::Ward,
    ] {
        for metric in [Metric::Euclidean, Metric::Hamming, Metric::Cosine] {
            kinds.push(GeneratorKind::Agglomerative { linkage, metric });
        }
    }
    kinds.push(GeneratorKind::SpectralSparse);
    kinds
}

/// Kinds cycled through the repeat slots beyond the first seventeen.
const REPEAT_KINDS: [fn() -> GeneratorKind; 3] = [
    || GeneratorKind::KMeans,
    || GeneratorKind::FuzzyCMeans,
    || GeneratorKind::SpectralSparse,
];

/// A single committee slot: which clusterer, how many clusters, which seed.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub k_t: usize,
    pub seed: u64,
}

/// The full committee plan.
#[derive(Debug, Clone)]
pub struct EnsembleSchedule {
    specs: Vec<GeneratorSpec>,
    k_final: usize,
}

impl EnsembleSchedule {
    pub fn specs(&self) -> &[GeneratorSpec] {
        &self.specs
    }

    pub fn k_final(&self) -> usize {
        self.k_final
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

/// splitmix64; decorrelates per-slot seeds from the schedule seed.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B54A32D192ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Builds the slot plan: the seventeen kinds once each, repeats after, with
/// target counts rotating over `[2, k_final + 2]` and per-slot seeds derived
/// from `seed`.
pub fn build_schedule(k_final: usize, t_count: usize, seed: u64) -> Result<EnsembleSchedule> {
    if k_final < 2 {
        return Err(Error::InvalidConfig(format!(
            "final cluster count must be at least 2, got {k_final}"
        )));
    }
    if t_count < 1 {
        return Err(Error::InvalidConfig("ensemble size must be at least 1".into()));
    }
    let kinds = kind_order();
    let period = k_final + 1; // counts 2..=k_final+2
    let mut specs = Vec::with_capacity(t_count);
    for slot in 0..t_count {
        let kind = if slot < kinds.len() {
            kinds[slot]
        } else {
            REPEAT_KINDS[(slot - kinds.len()) % REPEAT_KINDS.len()]()
        };
        specs.push(GeneratorSpec {
            kind,
            k_t: 2 + (slot % period),
            seed: mix_seed(seed, slot as u64),
        });
    }
    Ok(EnsembleSchedule { specs, k_final })
}

/// Runs one slot of the schedule.
pub fn run_generator(z: &DataMatrix, spec: &GeneratorSpec) -> Result<Partition> {
    match spec.kind {
        GeneratorKind::KMeans => run_kmeans(z, spec.k_t, spec.seed),
        GeneratorKind::FuzzyCMeans => run_fuzzy_cmeans(z, spec.k_t, spec.seed),
        GeneratorKind::Gmm => run_gmm(z, spec.k_t, spec.seed),
        GeneratorKind::Subtractive => run_subtractive(z, spec.k_t, spec.seed),
        GeneratorKind::Agglomerative { linkage, metric } => {
            run_agglomerative(z, spec.k_t, linkage, metric)
        }
        GeneratorKind::SpectralSparse => run_spectral_sparse(z, spec.k_t, spec.seed),
    }
}

/// Runs every slot and collects the committee in schedule order. A failing
/// generator is substituted by a seeded k-means run (logged) so the committee
/// size is preserved; results do not depend on completion order.
pub fn generate_reference_set(z: &DataMatrix, sched: &EnsembleSchedule) -> Result<ReferenceSet> {
    let partitions: Vec<Partition> = sched
        .specs()
        .par_iter()
        .map(|spec| match run_generator(z, spec) {
            Ok(p) => Ok(p),
            Err(err) => {
                log::warn!(
                    "generator {} (k_t={}) failed: {err}; substituting seeded k-means",
                    spec.kind,
                    spec.k_t
                );
                run_kmeans(z, spec.k_t.min(z.n_instances()), spec.seed)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ReferenceSet::new(partitions)
}
