// SPDX-License-Identifier: MIT OR Apache-2.0

//! The nine chart distances, in sequence mode (paired 1D vectors) and raster
//! mode (binned images).
//!
//! Every value is reported as a distance, lower meaning more similar:
//! similarities `s` become `1 - s`, Pearson's `r` becomes `(1 - r) / 2`.
//!
//! | metric | sequence mode | raster mode |
//! |---|---|---|
//! | Manhattan, Euclidean, Pearson | paired y values | not defined |
//! | Cosine | paired y values | flattened cell counts |
//! | Jaccard, Dice | cells `(i, bin(y_i))` | occupied cells |
//! | NMI, MID | joint table of `(bin(x_i), bin(y_i))` | 2×2 joint occupancy |
//! | JSD | y values as mass | cell distributions |

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::PointSet;
use crate::error::{Error, Result};
use crate::info::{self, JointCounts, MutualInfo};
use crate::mid;
use crate::raster::{self, RasterImage};
use crate::redundancy::{RedundancyConfig, RedundancyKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    Manhattan,
    Euclidean,
    Cosine,
    Jaccard,
    Dice,
    Pearson,
    Nmi,
    Jsd,
    Mid,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::Manhattan,
        MetricId::Euclidean,
        MetricId::Cosine,
        MetricId::Jaccard,
        MetricId::Dice,
        MetricId::Pearson,
        MetricId::Nmi,
        MetricId::Jsd,
        MetricId::Mid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::Manhattan => "manhattan",
            MetricId::Euclidean => "euclidean",
            MetricId::Cosine => "cosine",
            MetricId::Jaccard => "jaccard",
            MetricId::Dice => "dice",
            MetricId::Pearson => "pearson",
            MetricId::Nmi => "nmi",
            MetricId::Jsd => "jsd",
            MetricId::Mid => "mid",
        }
    }

    /// Point-pair metrics only exist on index-paired vectors.
    pub fn sequence_only(self) -> bool {
        matches!(
            self,
            MetricId::Manhattan | MetricId::Euclidean | MetricId::Pearson
        )
    }

    pub fn canonical_mode(self) -> Mode {
        if self.sequence_only() {
            Mode::Sequence
        } else {
            Mode::Raster
        }
    }

    /// Metrics that compare whole groupings of the data (bins, sets, inner products).
    pub fn is_group_based(self) -> bool {
        matches!(
            self,
            MetricId::Cosine | MetricId::Jaccard | MetricId::Dice | MetricId::Nmi | MetricId::Jsd
        )
    }

    pub fn supports(self, kind: RedundancyKind) -> bool {
        check_capability(self, self.canonical_mode(), kind).is_ok()
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str() == key)
            .or(match key.as_str() {
                "man" | "l1" => Some(MetricId::Manhattan),
                "euc" | "l2" => Some(MetricId::Euclidean),
                "mi" | "mutual_information" => Some(MetricId::Nmi),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sequence,
    Raster,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequence => "sequence",
            Mode::Raster => "raster",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sequence" | "seq" => Ok(Mode::Sequence),
            "raster" | "image" => Ok(Mode::Raster),
            _ => Err(Error::InvalidParameter(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceValue {
    pub value: f64,
    pub metric: MetricId,
    pub mode: Mode,
}

pub const PAIRING_REASON: &str = "it can only work with vectors which have the same number of \
     data points, paired in a specific order, which is not the case with areas binned into squares";

fn capability_error(metric: MetricId, kind: RedundancyKind, reason: String) -> Error {
    Error::Capability {
        metric: metric.to_string(),
        redundancy: kind.to_string(),
        reason,
    }
}

pub fn check_capability(metric: MetricId, mode: Mode, kind: RedundancyKind) -> Result<()> {
    if mode == Mode::Raster && metric.sequence_only() {
        return Err(capability_error(
            metric,
            kind,
            format!("{metric} is only defined in sequence mode; {PAIRING_REASON}"),
        ));
    }
    if mode == Mode::Sequence && !kind.preserves_pairing() {
        return Err(capability_error(metric, kind, PAIRING_REASON.to_owned()));
    }
    Ok(())
}

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    Ok(())
}

pub fn manhattan(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum())
}

pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

pub fn cosine_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((1.0 - dot / (nx * ny)).max(0.0))
}

/// `1 - |A ∩ B| / |A ∪ B|`; two empty sets are identical (distance 0).
pub fn jaccard_distance<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return 0.0;
    }
    1.0 - inter as f64 / union as f64
}

/// `1 - 2|A ∩ B| / (|A| + |B|)`; two empty sets are identical (distance 0).
pub fn dice_distance<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    1.0 - 2.0 * inter as f64 / total as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::ZeroVariance);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// `(1 - r) / 2`.
pub fn pearson_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok((1.0 - pearson(x, y)?) / 2.0)
}

/// Everything a metric needs from one augmented chart, computed once.
#[derive(Clone, Debug)]
pub struct Prepared {
    mode: Mode,
    b: usize,
    origins: usize,
    ys: Vec<f64>,
    image: Option<RasterImage>,
    cells: BTreeSet<usize>,
    dist: Vec<f64>,
}

impl Prepared {
    pub fn image(&self) -> Option<&RasterImage> {
        self.image.as_ref()
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }
}

/// A metric bound to a redundancy configuration, mode and grid side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparator {
    pub metric: MetricId,
    pub mode: Mode,
    pub redundancy: RedundancyConfig,
    pub b: usize,
}

impl Comparator {
    pub fn new(metric: MetricId, redundancy: RedundancyConfig, b: usize) -> Result<Self> {
        Self::with_mode(metric, metric.canonical_mode(), redundancy, b)
    }

    pub fn with_mode(
        metric: MetricId,
        mode: Mode,
        redundancy: RedundancyConfig,
        b: usize,
    ) -> Result<Self> {
        check_capability(metric, mode, redundancy.kind)?;
        redundancy.validate()?;
        if b < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid side must be at least 2, got {b}"
            )));
        }
        Ok(Self {
            metric,
            mode,
            redundancy,
            b,
        })
    }

    /// Applies redundancy and builds the representation this metric reads.
    pub fn prepare(&self, ps: &PointSet) -> Result<Prepared> {
        let origins = ps.origin_count();
        let augmented = self.redundancy.apply(ps)?;
        let mut prep = Prepared {
            mode: self.mode,
            b: self.b,
            origins,
            ys: Vec::new(),
            image: None,
            cells: BTreeSet::new(),
            dist: Vec::new(),
        };
        match self.mode {
            Mode::Sequence => {
                prep.ys = augmented.ys();
                if matches!(self.metric, MetricId::Jaccard | MetricId::Dice) {
                    prep.cells = prep
                        .ys
                        .iter()
                        .enumerate()
                        .map(|(i, &y)| i * self.b + level(y, self.b))
                        .collect();
                }
            }
            Mode::Raster => {
                let img = raster::rasterize(&augmented, self.b)?;
                match self.metric {
                    MetricId::Jaccard | MetricId::Dice => prep.cells = raster::occupancy_set(&img),
                    MetricId::Jsd => prep.dist = raster::cell_distribution(&img)?,
                    _ => {}
                }
                prep.image = Some(img);
            }
        }
        Ok(prep)
    }

    pub fn compare(&self, x: &Prepared, y: &Prepared) -> Result<DistanceValue> {
        if x.mode != self.mode || y.mode != self.mode || x.b != self.b || y.b != self.b {
            return Err(Error::InvalidParameter(
                "prepared charts do not match this comparator".into(),
            ));
        }
        let value = match self.mode {
            Mode::Sequence => {
                if x.origins != y.origins {
                    return Err(Error::LengthMismatch {
                        left: x.origins,
                        right: y.origins,
                    });
                }
                self.compare_sequence(x, y)?
            }
            Mode::Raster => self.compare_raster(x, y)?,
        };
        Ok(DistanceValue {
            value,
            metric: self.metric,
            mode: self.mode,
        })
    }

    fn compare_sequence(&self, x: &Prepared, y: &Prepared) -> Result<f64> {
        let (a, b) = (&x.ys, &y.ys);
        match self.metric {
            MetricId::Manhattan => manhattan(a, b),
            MetricId::Euclidean => euclidean(a, b),
            MetricId::Pearson => pearson_distance(a, b),
            MetricId::Cosine => cosine_distance(a, b),
            MetricId::Jaccard => Ok(jaccard_distance(&x.cells, &y.cells)),
            MetricId::Dice => Ok(dice_distance(&x.cells, &y.cells)),
            MetricId::Nmi => Ok(1.0 - self.level_table(a, b)?.nmi()?),
            MetricId::Mid => mid::chord(&self.level_table(a, b)?),
            MetricId::Jsd => info::jsd(&as_mass(a)?, &as_mass(b)?),
        }
    }

    fn level_table(&self, a: &[f64], b: &[f64]) -> Result<MutualInfo> {
        let la: Vec<usize> = a.iter().map(|&v| level(v, self.b)).collect();
        let lb: Vec<usize> = b.iter().map(|&v| level(v, self.b)).collect();
        JointCounts::from_pairs(&la, &lb)?.mutual_information()
    }

    fn compare_raster(&self, x: &Prepared, y: &Prepared) -> Result<f64> {
        let (ix, iy) = match (&x.image, &y.image) {
            (Some(ix), Some(iy)) => (ix, iy),
            _ => return Err(Error::EmptyImage),
        };
        match self.metric {
            MetricId::Cosine => cosine_distance(&ix.counts_f64(), &iy.counts_f64()),
            MetricId::Jaccard => Ok(jaccard_distance(&x.cells, &y.cells)),
            MetricId::Dice => Ok(dice_distance(&x.cells, &y.cells)),
            MetricId::Nmi => info::nmi_distance(&raster::joint_occupancy(ix, iy)?),
            MetricId::Mid => mid::mid_distance(ix, iy),
            MetricId::Jsd => info::jsd(&x.dist, &y.dist),
            MetricId::Manhattan | MetricId::Euclidean | MetricId::Pearson => Err(capability_error(
                self.metric,
                self.redundancy.kind,
                PAIRING_REASON.to_owned(),
            )),
        }
    }

    pub fn distance(&self, x: &PointSet, y: &PointSet) -> Result<DistanceValue> {
        self.compare(&self.prepare(x)?, &self.prepare(y)?)
    }

    /// Like [`Comparator::compare`], but degenerate comparisons (constant
    /// vectors for Pearson, zero-entropy grids for NMI/MID, zero vectors for
    /// Cosine/JSD) score as "no shared information".
    pub fn compare_or_fallback(&self, x: &Prepared, y: &Prepared) -> Result<DistanceValue> {
        match self.compare(x, y) {
            Err(e) if e.is_degenerate() => Ok(DistanceValue {
                value: self.fallback(x, y),
                metric: self.metric,
                mode: self.mode,
            }),
            other => other,
        }
    }

    fn fallback(&self, x: &Prepared, y: &Prepared) -> f64 {
        match self.metric {
            // r = 0
            MetricId::Pearson => 0.5,
            // NMI = 0 puts the candidate at a right angle
            MetricId::Mid => {
                let (hx, hy) = match (self.mode, &x.image, &y.image) {
                    (Mode::Raster, Some(ix), Some(iy)) => {
                        (occupancy_entropy(ix), occupancy_entropy(iy))
                    }
                    _ => (level_entropy(&x.ys, self.b), level_entropy(&y.ys, self.b)),
                };
                hx.hypot(hy)
            }
            _ => 1.0,
        }
    }
}

fn occupancy_entropy(img: &RasterImage) -> f64 {
    let k = img.populated() as u64;
    info::entropy_of_counts([k, img.bins().len() as u64 - k])
}

fn level_entropy(v: &[f64], b: usize) -> f64 {
    let mut counts = vec![0u64; b];
    for &y in v {
        counts[level(y, b)] += 1;
    }
    info::entropy_of_counts(counts)
}

fn level(v: f64, b: usize) -> usize {
    ((v.clamp(0.0, 1.0) * b as f64) as usize).min(b - 1)
}

fn as_mass(v: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = v.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|a| a / sum).collect())
}

/// Applies `cfg` to both charts, rasterizes when the metric's canonical mode
/// is raster, and returns the distance.
pub fn distance(
    x: &PointSet,
    y: &PointSet,
    metric: MetricId,
    cfg: &RedundancyConfig,
    b: usize,
) -> Result<DistanceValue> {
    Comparator::new(metric, *cfg, b)?.distance(x, y)
}

pub fn distance_in_mode(
    x: &PointSet,
    y: &PointSet,
    metric: MetricId,
    mode: Mode,
    cfg: &RedundancyConfig,
    b: usize,
) -> Result<DistanceValue> {
    Comparator::with_mode(metric, mode, *cfg, b)?.distance(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::to_pointset;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(manhattan(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(manhattan(&[0.0, 0.5, 1.0], &[1.0, 0.5, 0.0]).unwrap(), 2.0);
        assert!(matches!(
            manhattan(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(euclidean(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 2f64.sqrt());
        assert_eq!(euclidean(&[3.0, 0.0], &[0.0, 4.0]).unwrap(), 5.0);
        assert!(euclidean(&[1.0], &[]).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert_abs_diff_eq!(
            cosine_distance(&[1.0, 2.0], &[2.0, 4.0]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(cosine_distance(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(
            cosine_distance(&[1.0, 1.0], &[1.0, 0.0]).unwrap(),
            1.0 - 1.0 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(matches!(
            cosine_distance(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn set_examples() {
        assert_eq!(jaccard_distance(&set(&[1, 2]), &set(&[1, 2])), 0.0);
        assert_eq!(jaccard_distance(&set(&[1]), &set(&[2])), 1.0);
        assert_eq!(jaccard_distance(&set(&[1, 2, 3]), &set(&[2, 3, 4])), 0.5);
        assert_eq!(jaccard_distance::<usize>(&set(&[]), &set(&[])), 0.0);

        assert_eq!(dice_distance(&set(&[1, 2]), &set(&[1, 2])), 0.0);
        assert_abs_diff_eq!(
            dice_distance(&set(&[1, 2, 3]), &set(&[2, 3, 4])),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(dice_distance(&set(&[1]), &set(&[2])), 1.0);
    }

    #[test]
    fn pearson_examples() {
        let x = [0.1, 0.5, 0.2, 0.9];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        assert_abs_diff_eq!(pearson_distance(&x, &y).unwrap(), 0.0, epsilon = 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson_distance(&x, &neg).unwrap(), 1.0, epsilon = 1e-15);
        // r = 0 on orthogonal centered vectors
        assert_abs_diff_eq!(
            pearson_distance(&[1.0, -1.0, 1.0, -1.0], &[1.0, 1.0, -1.0, -1.0]).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(matches!(
            pearson_distance(&[1.0, 1.0], &[0.0, 1.0]),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn capability_rules() {
        for metric in [MetricId::Pearson, MetricId::Manhattan, MetricId::Euclidean] {
            for kind in [
                RedundancyKind::AreaLine,
                RedundancyKind::Cloud,
                RedundancyKind::GaussCloud,
            ] {
                let cfg = RedundancyConfig {
                    kind,
                    n: 3,
                    ..Default::default()
                };
                let err = Comparator::new(metric, cfg, 16).unwrap_err();
                assert!(err.is_capability(), "{err}");
                assert!(err.to_string().contains("same number of data points"));
            }
            assert!(Comparator::new(metric, RedundancyConfig::equidistant(10), 16).is_ok());
            assert!(
                Comparator::with_mode(metric, Mode::Raster, RedundancyConfig::none(), 16)
                    .unwrap_err()
                    .is_capability()
            );
        }
        for metric in MetricId::ALL.into_iter().filter(|m| !m.sequence_only()) {
            for kind in RedundancyKind::ALL {
                assert!(metric.supports(kind));
            }
        }
    }

    #[test]
    fn self_distance_is_zero_everywhere() {
        let ps = to_pointset(&[0.2, 0.9, 0.1, 0.6, 0.4, 1.0, 0.0]).unwrap();
        for metric in MetricId::ALL {
            for cfg in [
                RedundancyConfig::none(),
                RedundancyConfig::equidistant(10),
                RedundancyConfig::area_line(10),
                RedundancyConfig::cloud(10, 0.1, 5),
            ] {
                if !metric.supports(cfg.kind) {
                    continue;
                }
                let d = distance(&ps, &ps, metric, &cfg, 16).unwrap();
                assert!(d.value.abs() <= 1e-9, "{metric} {cfg}: {}", d.value);
            }
        }
    }

    #[test]
    fn sequence_mode_group_metrics() {
        let x = to_pointset(&[0.0, 0.5, 1.0, 0.25]).unwrap();
        let y = to_pointset(&[1.0, 0.5, 0.0, 0.75]).unwrap();
        let cfg = RedundancyConfig::none();
        for metric in [
            MetricId::Cosine,
            MetricId::Jaccard,
            MetricId::Dice,
            MetricId::Nmi,
            MetricId::Jsd,
            MetricId::Mid,
        ] {
            let same = distance_in_mode(&x, &x, metric, Mode::Sequence, &cfg, 16).unwrap();
            assert!(same.value.abs() < 1e-12, "{metric}");
            let d = distance_in_mode(&x, &y, metric, Mode::Sequence, &cfg, 16).unwrap();
            assert_eq!(d.mode, Mode::Sequence);
            assert!(d.value >= 0.0);
        }
        // a bijective relabelling shares all information
        let nmi = distance_in_mode(&x, &y, MetricId::Nmi, Mode::Sequence, &cfg, 16).unwrap();
        assert_abs_diff_eq!(nmi.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sequence_mode_requires_equal_lengths() {
        let x = to_pointset(&[0.0, 0.5, 1.0]).unwrap();
        let y = to_pointset(&[1.0, 0.5]).unwrap();
        assert!(matches!(
            distance(&x, &y, MetricId::Euclidean, &RedundancyConfig::none(), 16),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(distance(&x, &y, MetricId::Nmi, &RedundancyConfig::none(), 16).is_ok());
    }

    #[test]
    fn fallback_values() {
        let flat = to_pointset(&[0.5; 6]).unwrap();
        let wave = to_pointset(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        let cmp = Comparator::new(MetricId::Pearson, RedundancyConfig::none(), 16).unwrap();
        let (a, b) = (cmp.prepare(&wave).unwrap(), cmp.prepare(&flat).unwrap());
        assert!(cmp.compare(&a, &b).unwrap_err().is_degenerate());
        assert_eq!(cmp.compare_or_fallback(&a, &b).unwrap().value, 0.5);
    }

    #[test]
    fn metric_names() {
        for m in MetricId::ALL {
            assert_eq!(m.as_str().parse::<MetricId>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert_eq!("NMI".parse::<MetricId>().unwrap(), MetricId::Nmi);
        assert!("hamming".parse::<MetricId>().is_err());
    }

    fn chart() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..=1.0, 6..22)
    }

    proptest! {
        #[test]
        fn pearson_affine_invariant(
            x in prop::collection::vec(-10f64..10.0, 3..30),
            seed in prop::collection::vec(-10f64..10.0, 30),
            a in 0.01f64..100.0,
            b in -100f64..100.0,
        ) {
            let y = &seed[..x.len()];
            let y2: Vec<f64> = y.iter().map(|v| a * v + b).collect();
            if let (Ok(d1), Ok(d2)) = (pearson_distance(&x, y), pearson_distance(&x, &y2)) {
                prop_assert!((d1 - d2).abs() <= 1e-9);
            }
        }

        #[test]
        fn symmetric_and_nonnegative(x in chart(), y in chart(), n in 0usize..12) {
            let len = x.len().min(y.len());
            let (x, y) = (to_pointset(&x[..len]).unwrap(), to_pointset(&y[..len]).unwrap());
            for metric in MetricId::ALL {
                for cfg in [RedundancyConfig::equidistant(n), RedundancyConfig::area_line(n)] {
                    if !metric.supports(cfg.kind) {
                        continue;
                    }
                    let xy = distance(&x, &y, metric, &cfg, 16);
                    let yx = distance(&y, &x, metric, &cfg, 16);
                    match (xy, yx) {
                        (Ok(a), Ok(b)) => {
                            prop_assert!(a.value >= 0.0);
                            prop_assert!((a.value - b.value).abs() <= 1e-12, "{metric}");
                        }
                        (Err(a), Err(b)) => prop_assert!(a.is_degenerate() && b.is_degenerate()),
                        _ => prop_assert!(false, "asymmetric failure"),
                    }
                }
            }
        }
    }
}
