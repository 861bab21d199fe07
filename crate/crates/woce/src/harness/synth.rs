//! Synthetic datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distributions::Open01;

use crate::error::{Error, Result};
use crate::harness::LabeledDataset;
use crate::types::DataMatrix;

/// Vertical offset of the second arc's center; tips of each arc reach into
/// the other arc's cavity.
const ARC_OFFSET_Y: f64 = 0.15;

/// Two interleaved half-circles of `n / 2` points each with Gaussian radial
/// noise. The first arc opens downward from the origin, the second opens
/// upward from `(1, 0.15)`, its tips reaching into the first arc's cavity.
/// Labels are `0` for the first arc, `1` for the second.
pub fn gen_halfring(n: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if n < 4 {
        return Err(Error::InvalidConfig(format!(
            "half-ring needs at least 4 points, got {n}"
        )));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "half-ring needs an even point count, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n / 2;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for arc in 0..2u8 {
        for _ in 0..half {
            let t: f64 = rng.sample::<f64, _>(Open01) * std::f64::consts::PI;
            let radius = 1.0 + noise * standard_normal(&mut rng);
            let (x, y) = if arc == 0 {
                (radius * t.cos(), radius * t.sin())
            } else {
                (1.0 - radius * t.cos(), ARC_OFFSET_Y - radius * t.sin())
            };
            rows.push([x, y]);
            labels.push(arc as usize);
        }
    }
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    let data = DataMatrix::from_rows(&refs)?;
    LabeledDataset::new(data, Some(labels), "halfring".into())
}

/// Box-Muller standard normal draw.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.sample(Open01);
    let u2: f64 = rng.sample(Open01);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
