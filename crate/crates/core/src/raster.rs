// SPDX-License-Identifier: MIT OR Apache-2.0

//! Binning point sets into `b × b` count grids.
//!
//! Cells are stored row-major with row 0 at the bottom: the cell of a point is
//! `row * b + col` where `row = floor(y * b)` and `col = floor(x * b)`, both
//! clamped to `b - 1` so the upper edge of the unit square is closed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::PointSet;
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 16;

/// Grid side selection: a fixed `b`, or 8 bins per line segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GridSize {
    Fixed(usize),
    PerSegment,
}

impl Default for GridSize {
    fn default() -> Self {
        GridSize::Fixed(DEFAULT_BINS)
    }
}

impl GridSize {
    pub fn resolve(self, origin_points: usize) -> usize {
        match self {
            GridSize::Fixed(b) => b,
            GridSize::PerSegment => bins_per_segment(origin_points),
        }
    }
}

/// `8 * (L - 1)` clipped to `[8, 128]`.
pub fn bins_per_segment(origin_points: usize) -> usize {
    (8 * origin_points.saturating_sub(1)).clamp(8, 128)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    b: usize,
    bins: Vec<u32>,
    total: u64,
}

impl RasterImage {
    pub fn side(&self) -> usize {
        self.b
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Row-major counts, row 0 at the bottom.
    pub fn bins(&self) -> &[u32] {
        &self.bins
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.bins[row * self.b + col]
    }

    pub fn to_matrix(&self) -> Vec<Vec<u32>> {
        self.bins.chunks(self.b).map(<[u32]>::to_vec).collect()
    }

    pub fn populated(&self) -> usize {
        self.bins.iter().filter(|&&c| c > 0).count()
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.bins.iter().map(|&c| f64::from(c)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RasterJson {
    b: usize,
    total: u64,
    bins: Vec<Vec<u32>>,
}

impl Serialize for RasterImage {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RasterJson {
            b: self.b,
            total: self.total,
            bins: self.to_matrix(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RasterImage {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RasterJson::deserialize(deserializer)?;
        if raw.bins.len() != raw.b || raw.bins.iter().any(|r| r.len() != raw.b) {
            return Err(D::Error::custom("bins must be a b × b matrix"));
        }
        let bins: Vec<u32> = raw.bins.into_iter().flatten().collect();
        let total = bins.iter().map(|&c| u64::from(c)).sum();
        if total != raw.total {
            return Err(D::Error::custom("total does not match the cell counts"));
        }
        Ok(RasterImage {
            b: raw.b,
            bins,
            total,
        })
    }
}

fn bin_of(v: f64, b: usize) -> usize {
    ((v * b as f64) as usize).min(b - 1)
}

pub fn rasterize(ps: &PointSet, b: usize) -> Result<RasterImage> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid side must be at least 2, got {b}"
        )));
    }
    let mut bins = vec![0u32; b * b];
    for p in ps.points() {
        bins[bin_of(p.y, b) * b + bin_of(p.x, b)] += 1;
    }
    Ok(RasterImage {
        b,
        bins,
        total: ps.len() as u64,
    })
}

/// Cell probabilities `count / total` over all `b²` cells (empty cells get 0).
pub fn cell_distribution(img: &RasterImage) -> Result<Vec<f64>> {
    if img.total == 0 {
        return Err(Error::EmptyImage);
    }
    let total = img.total as f64;
    Ok(img.bins.iter().map(|&c| f64::from(c) / total).collect())
}

/// Probabilities of the populated cells only, in cell order.
pub fn marginal_pdf(img: &RasterImage) -> Result<Vec<f64>> {
    Ok(cell_distribution(img)?
        .into_iter()
        .filter(|&p| p > 0.0)
        .collect())
}

/// Contingency table of paired binary occupancy. `n10` counts cells populated
/// in the first image only, `n01` in the second only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram2x2 {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

impl Histogram2x2 {
    pub fn new(n00: u64, n01: u64, n10: u64, n11: u64) -> Self {
        Self { n00, n01, n10, n11 }
    }

    pub fn total(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    /// Rows index the first image's occupancy, columns the second's.
    pub fn as_table(&self) -> [[u64; 2]; 2] {
        [[self.n00, self.n01], [self.n10, self.n11]]
    }
}

pub fn joint_occupancy(x: &RasterImage, y: &RasterImage) -> Result<Histogram2x2> {
    if x.b != y.b {
        return Err(Error::GridMismatch {
            left: x.b,
            right: y.b,
        });
    }
    let mut h = Histogram2x2::default();
    for (&cx, &cy) in x.bins.iter().zip(&y.bins) {
        match (cx > 0, cy > 0) {
            (false, false) => h.n00 += 1,
            (false, true) => h.n01 += 1,
            (true, false) => h.n10 += 1,
            (true, true) => h.n11 += 1,
        }
    }
    Ok(h)
}

pub fn occupancy_set(img: &RasterImage) -> BTreeSet<usize> {
    img.bins
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, _)| i)
        .collect()
}
