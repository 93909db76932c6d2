// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::TimeSeries;
use crate::error::{Error, Result};

/// Default multiplier on the `U[-1, 1]` noise perturbation (normalized units).
pub const DEFAULT_NOISE_SCALE: f64 = 0.1;

const MIN_LEN: usize = 4;

/// The nine controlled modifications of an original chart. The last three
/// replace the data entirely and serve as benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationId {
    Interchange2,
    TwoOutliers,
    OutlierBegin,
    OutlierMiddle,
    Shift2,
    UniformNoise,
    StraightLine,
    Zigzag,
    RandomNoise,
}

impl PerturbationId {
    pub const ALL: [PerturbationId; 9] = [
        PerturbationId::Interchange2,
        PerturbationId::TwoOutliers,
        PerturbationId::OutlierBegin,
        PerturbationId::OutlierMiddle,
        PerturbationId::Shift2,
        PerturbationId::UniformNoise,
        PerturbationId::StraightLine,
        PerturbationId::Zigzag,
        PerturbationId::RandomNoise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationId::Interchange2 => "interchange2",
            PerturbationId::TwoOutliers => "two_outliers",
            PerturbationId::OutlierBegin => "outlier_begin",
            PerturbationId::OutlierMiddle => "outlier_middle",
            PerturbationId::Shift2 => "shift2",
            PerturbationId::UniformNoise => "uniform_noise",
            PerturbationId::StraightLine => "straight_line",
            PerturbationId::Zigzag => "zigzag",
            PerturbationId::RandomNoise => "random_noise",
        }
    }

    pub fn index(self) -> usize {
        PerturbationId::ALL
            .iter()
            .position(|&p| p == self)
            .expect("listed in ALL")
    }

    pub fn is_benchmark(self) -> bool {
        matches!(
            self,
            PerturbationId::StraightLine | PerturbationId::Zigzag | PerturbationId::RandomNoise
        )
    }
}

impl fmt::Display for PerturbationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PerturbationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        PerturbationId::ALL
            .into_iter()
            .find(|p| p.as_str().replace('_', "") == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown perturbation `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbOptions {
    /// Multiplier on the `U[-1, 1]` draws of [`PerturbationId::UniformNoise`].
    pub noise_scale: f64,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self {
            noise_scale: DEFAULT_NOISE_SCALE,
        }
    }
}

/// Mean plus three sample standard deviations.
fn outlier_level(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    mean + 3.0 * var.sqrt()
}

/// Applies one perturbation to a normalized chart. The output keeps the
/// input length; outlier values may leave `[0, 1]`.
pub fn perturb_values(
    values: &[f64],
    which: PerturbationId,
    seed: u64,
    opts: PerturbOptions,
) -> Result<Vec<f64>> {
    let len = values.len();
    if len < MIN_LEN {
        return Err(Error::TooShort { len, min: MIN_LEN });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = values.to_vec();
    match which {
        PerturbationId::Interchange2 => {
            let picks = index::sample(&mut rng, len, 2);
            out.swap(picks.index(0), picks.index(1));
        }
        PerturbationId::TwoOutliers => {
            let level = outlier_level(values);
            for i in index::sample(&mut rng, len, 2) {
                out[i] = level;
            }
        }
        PerturbationId::OutlierBegin => out[0] = outlier_level(values),
        PerturbationId::OutlierMiddle => out[len / 2] = outlier_level(values),
        PerturbationId::Shift2 => out.rotate_right(2),
        PerturbationId::UniformNoise => {
            for v in &mut out {
                *v = (*v + opts.noise_scale * rng.random_range(-1.0..=1.0)).clamp(0.0, 1.0);
            }
        }
        PerturbationId::StraightLine => {
            let mean = values.iter().sum::<f64>() / len as f64;
            out.fill(mean);
        }
        PerturbationId::Zigzag => {
            for (i, v) in out.iter_mut().enumerate() {
                *v = (i % 2) as f64;
            }
        }
        PerturbationId::RandomNoise => {
            for v in &mut out {
                *v = rng.random::<f64>();
            }
        }
    }
    Ok(out)
}

pub fn perturb(
    series: &TimeSeries,
    which: PerturbationId,
    seed: u64,
    opts: PerturbOptions,
) -> Result<TimeSeries> {
    TimeSeries::with_labels(
        perturb_values(series.values(), which, seed, opts)?,
        series.labels().map(<[String]>::to_vec),
    )
}
