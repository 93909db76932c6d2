// SPDX-License-Identifier: MIT OR Apache-2.0

//! Geometric redundancy added to a chart before it is compared.
//!
//! Every configuration starts from the same construction: `n` points at
//! parameters `k / (n + 1)` on each segment joining adjacent origin points.
//! Area-line stacks vertically shifted copies of that set; the cloud kinds
//! jitter the inserted points on y. Origin points are never moved, so
//! filtering on [`Point::origin`] recovers the source chart.
//!
//! Random draws use ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! which gives identical point sets on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Point, PointSet};
use crate::error::{Error, Result};

/// Points-per-segment values of the evaluation sweep.
pub const SWEEP_N: [usize; 17] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25, 50, 75, 100];

/// Cloud noise amplitudes of the evaluation sweep.
pub const SWEEP_ETA: [f64; 3] = [0.025, 0.1, 0.2];

pub const DEFAULT_COPIES: usize = 10;
pub const DEFAULT_SHIFT: f64 = 0.01;
pub const DEFAULT_ETA: f64 = 0.1;

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "camelCase")]
pub enum RedundancyKind {
    #[default]
    None,
    Equidistant,
    #[serde(alias = "arealine", alias = "area-line", alias = "area_line")]
    AreaLine,
    Cloud,
    #[serde(alias = "gausscloud", alias = "gauss-cloud", alias = "gauss_cloud")]
    GaussCloud,
}

impl RedundancyKind {
    pub const ALL: [RedundancyKind; 5] = [
        RedundancyKind::None,
        RedundancyKind::Equidistant,
        RedundancyKind::AreaLine,
        RedundancyKind::Cloud,
        RedundancyKind::GaussCloud,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RedundancyKind::None => "none",
            RedundancyKind::Equidistant => "equidistant",
            RedundancyKind::AreaLine => "areaLine",
            RedundancyKind::Cloud => "cloud",
            RedundancyKind::GaussCloud => "gaussCloud",
        }
    }

    /// Whether every added point is a pure function of the origin points,
    /// so that two charts with equal origin counts stay index-paired.
    pub fn preserves_pairing(self) -> bool {
        matches!(self, RedundancyKind::None | RedundancyKind::Equidistant)
    }
}

impl fmt::Display for RedundancyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RedundancyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "none" => Ok(RedundancyKind::None),
            "equidistant" | "npoint" | "n" => Ok(RedundancyKind::Equidistant),
            "arealine" => Ok(RedundancyKind::AreaLine),
            "cloud" => Ok(RedundancyKind::Cloud),
            "gausscloud" | "gaussian" => Ok(RedundancyKind::GaussCloud),
            _ => Err(Error::InvalidParameter(format!(
                "unknown redundancy kind `{s}` (expected none, equidistant, areaLine, cloud or gaussCloud)"
            ))),
        }
    }
}

/// Which augmentation to apply and its parameters. Serializes as a flat object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RedundancyConfig {
    pub kind: RedundancyKind,
    /// Points inserted per segment.
    #[serde(alias = "n_points")]
    pub n: usize,
    /// Area-line: total number of stacked copies.
    pub copies: usize,
    /// Area-line: vertical step between copies.
    pub shift: f64,
    /// Cloud: uniform noise bound. Gaussian cloud: standard deviation.
    pub eta: f64,
    pub seed: u64,
}

impl Default for RedundancyConfig {
    fn default() -> Self {
        Self {
            kind: RedundancyKind::None,
            n: 0,
            copies: DEFAULT_COPIES,
            shift: DEFAULT_SHIFT,
            eta: DEFAULT_ETA,
            seed: 0,
        }
    }
}

impl RedundancyConfig {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn equidistant(n: usize) -> Self {
        Self {
            kind: RedundancyKind::Equidistant,
            n,
            ..Self::default()
        }
    }

    pub fn area_line(n: usize) -> Self {
        Self {
            kind: RedundancyKind::AreaLine,
            n,
            ..Self::default()
        }
    }

    pub fn cloud(n: usize, eta: f64, seed: u64) -> Self {
        Self {
            kind: RedundancyKind::Cloud,
            n,
            eta,
            seed,
            ..Self::default()
        }
    }

    pub fn gauss_cloud(n: usize, sd: f64, seed: u64) -> Self {
        Self {
            kind: RedundancyKind::GaussCloud,
            n,
            eta: sd,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            RedundancyKind::AreaLine => {
                if self.copies < 1 {
                    return Err(Error::InvalidParameter(
                        "area-line needs at least one copy".into(),
                    ));
                }
                if !self.shift.is_finite() || self.shift < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "area-line shift must be a finite non-negative number, got {}",
                        self.shift
                    )));
                }
                if self.shift * (self.copies - 1) as f64 > 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "area-line stack of {} copies with shift {} exceeds the unit square",
                        self.copies, self.shift
                    )));
                }
            }
            RedundancyKind::Cloud | RedundancyKind::GaussCloud => {
                if !self.eta.is_finite() || self.eta < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "noise amplitude must be a finite non-negative number, got {}",
                        self.eta
                    )));
                }
            }
            RedundancyKind::None | RedundancyKind::Equidistant => {}
        }
        Ok(())
    }

    /// Short name such as `areaLine_10` or `cloud_25_eta0.1`.
    pub fn label(&self) -> String {
        match self.kind {
            RedundancyKind::None => "none".to_owned(),
            RedundancyKind::Equidistant | RedundancyKind::AreaLine => {
                format!("{}_{}", self.kind, self.n)
            }
            RedundancyKind::Cloud | RedundancyKind::GaussCloud => {
                format!("{}_{}_eta{}", self.kind, self.n, self.eta)
            }
        }
    }

    pub fn apply(&self, ps: &PointSet) -> Result<PointSet> {
        self.validate()?;
        match self.kind {
            RedundancyKind::None => Ok(ps.clone()),
            RedundancyKind::Equidistant => equidistant(ps, self.n),
            RedundancyKind::AreaLine => area_line(ps, self.n, self.copies, self.shift),
            RedundancyKind::Cloud => cloud(ps, self.n, self.eta, self.seed),
            RedundancyKind::GaussCloud => gauss_cloud(ps, self.n, self.eta, self.seed),
        }
    }

    /// Number of points `apply` produces for a chart with `origins` points.
    pub fn output_len(&self, origins: usize) -> usize {
        let base = origins + self.n * origins.saturating_sub(1);
        match self.kind {
            RedundancyKind::None => origins,
            RedundancyKind::AreaLine => base * self.copies,
            _ => base,
        }
    }
}

impl fmt::Display for RedundancyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn ordered_origins(ps: &PointSet) -> Result<Vec<Point>> {
    let origins: Vec<Point> = ps.origins().copied().collect();
    if origins.len() < 2 {
        return Err(Error::TooShort {
            len: origins.len(),
            min: 2,
        });
    }
    if origins.windows(2).any(|w| w[1].x < w[0].x) {
        return Err(Error::InvalidParameter(
            "origin points must be ordered by x".into(),
        ));
    }
    Ok(origins)
}

/// Inserts `n` collinear points at `t = k / (n + 1)` on every segment between
/// adjacent origin points. Non-origin input points are discarded.
pub fn equidistant(ps: &PointSet, n: usize) -> Result<PointSet> {
    let origins = ordered_origins(ps)?;
    let mut out = Vec::with_capacity(origins.len() + n * (origins.len() - 1));
    let step = 1.0 / (n + 1) as f64;
    for pair in origins.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        out.push(a);
        for k in 1..=n {
            let t = k as f64 * step;
            out.push(Point::added(
                (a.x + t * (b.x - a.x)).clamp(0.0, 1.0),
                (a.y + t * (b.y - a.y)).clamp(0.0, 1.0),
            ));
        }
    }
    out.push(origins[origins.len() - 1]);
    Ok(PointSet::from_points_unchecked(out))
}

/// Equidistant points stacked `copies` times, copy `k` shifted up by `k * shift`.
pub fn area_line(ps: &PointSet, n: usize, copies: usize, shift: f64) -> Result<PointSet> {
    if copies < 1 {
        return Err(Error::InvalidParameter(
            "area-line needs at least one copy".into(),
        ));
    }
    let base = equidistant(ps, n)?;
    let mut out = Vec::with_capacity(base.len() * copies);
    out.extend_from_slice(base.points());
    for k in 1..copies {
        let offset = k as f64 * shift;
        out.extend(
            base.points()
                .iter()
                .map(|p| Point::added(p.x, (p.y + offset).clamp(0.0, 1.0))),
        );
    }
    Ok(PointSet::from_points_unchecked(out))
}

/// Equidistant points whose inserted members are lifted by independent
/// `U[0, eta]` draws, clamped to the unit square.
pub fn cloud(ps: &PointSet, n: usize, eta: f64, seed: u64) -> Result<PointSet> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise amplitude must be a finite non-negative number, got {eta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    jitter(equidistant(ps, n)?, |_| eta * rng.random::<f64>())
}

/// Like [`cloud`] but with `N(0, sd)` offsets, truncated to the unit square.
pub fn gauss_cloud(ps: &PointSet, n: usize, sd: f64, seed: u64) -> Result<PointSet> {
    if !sd.is_finite() || sd < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "standard deviation must be a finite non-negative number, got {sd}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    jitter(equidistant(ps, n)?, |_| {
        sd * rng.sample::<f64, _>(StandardNormal)
    })
}

fn jitter(base: PointSet, mut offset: impl FnMut(&Point) -> f64) -> Result<PointSet> {
    let points = base
        .points()
        .iter()
        .map(|p| {
            if p.origin {
                *p
            } else {
                Point::added(p.x, (p.y + offset(p)).clamp(0.0, 1.0))
            }
        })
        .collect();
    Ok(PointSet::from_points_unchecked(points))
}
