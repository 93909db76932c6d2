// SPDX-License-Identifier: MIT OR Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::perturb::{perturb_values, PerturbOptions, PerturbationId};
use crate::data::{normalize_minmax, TimeSeries};
use crate::error::{Error, Result};

pub const GRID_LENGTHS: [usize; 4] = [6, 11, 16, 21];
pub const GRID_SELECTIONS: usize = 3;

/// A normalized slice of the source series. `id` is 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Original {
    pub id: usize,
    pub start: usize,
    pub values: Vec<f64>,
}

/// `selections` seeded random slices for each length, in length order.
pub fn build_grid(
    source: &TimeSeries,
    lengths: &[usize],
    selections: usize,
    seed: u64,
) -> Result<Vec<Original>> {
    if lengths.is_empty() || selections == 0 {
        return Err(Error::InvalidParameter(
            "grid needs at least one length and one selection".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(lengths.len() * selections);
    for &len in lengths {
        if len < 4 {
            return Err(Error::TooShort { len, min: 4 });
        }
        if len > source.len() {
            return Err(Error::WindowTooLong {
                window: len,
                len: source.len(),
            });
        }
        for _ in 0..selections {
            let start = rng.random_range(0..=source.len() - len);
            out.push(Original {
                id: out.len() + 1,
                start,
                values: normalize_minmax(&source.values()[start..start + len])?,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub lengths: Vec<usize>,
    pub selections: usize,
    pub seed: u64,
    pub perturb: PerturbOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            lengths: GRID_LENGTHS.to_vec(),
            selections: GRID_SELECTIONS,
            seed: 0,
            perturb: PerturbOptions::default(),
        }
    }
}

/// An original chart with its nine perturbed versions, each renormalized
/// to the unit interval, in [`PerturbationId::ALL`] order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub original: Original,
    pub charts: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn chart(&self, p: PerturbationId) -> &[f64] {
        &self.charts[p.index()]
    }
}

/// splitmix64 finalizer, used to derive independent per-chart seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn perturbation_seed(seed: u64, dataset: usize, p: PerturbationId) -> u64 {
    mix(mix(seed ^ dataset as u64) ^ p.index() as u64)
}

pub fn build_suite(source: &TimeSeries, cfg: &SuiteConfig) -> Result<Vec<Dataset>> {
    build_grid(source, &cfg.lengths, cfg.selections, cfg.seed)?
        .into_iter()
        .map(|original| {
            let charts = PerturbationId::ALL
                .into_iter()
                .map(|p| {
                    let seed = perturbation_seed(cfg.seed, original.id, p);
                    normalize_minmax(&perturb_values(&original.values, p, seed, cfg.perturb)?)
                })
                .collect::<Result<_>>()?;
            Ok(Dataset { original, charts })
        })
        .collect()
}
