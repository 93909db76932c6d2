// SPDX-License-Identifier: MIT OR Apache-2.0

//! Mutual Information Diagram coordinates.
//!
//! A candidate sits at radius `H(candidate)` and angle `arccos(NMI)`; the
//! reference chart compared with itself sits on the horizontal axis at
//! `(H(reference), 0)`. The chord between the two measures dissimilarity.

use serde::{Deserialize, Serialize};

use crate::data::min_max;
use crate::error::Result;
use crate::info::{mutual_information, MutualInfo};
use crate::raster::{joint_occupancy, RasterImage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MidPoint {
    pub label: String,
    pub radius: f64,
    pub angle: f64,
    pub x: f64,
    pub y: f64,
}

impl MidPoint {
    pub fn polar(label: impl Into<String>, radius: f64, angle: f64) -> Self {
        Self {
            label: label.into(),
            radius,
            angle,
            x: radius * angle.cos(),
            y: radius * angle.sin(),
        }
    }

    pub fn distance_to(&self, other: &MidPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// The reference chart's own position: `(H(reference), 0)`.
pub fn reference_point(label: impl Into<String>, reference: &RasterImage) -> Result<MidPoint> {
    let mi = mutual_information(&joint_occupancy(reference, reference)?)?;
    // nmi() rejects zero-entropy references
    mi.nmi()?;
    Ok(MidPoint::polar(label, mi.hx, 0.0))
}

pub fn mid_point_from_info(label: impl Into<String>, mi: &MutualInfo) -> Result<MidPoint> {
    let nmi = mi.nmi()?;
    Ok(MidPoint::polar(label, mi.hy, nmi.acos()))
}

pub fn mid_point(reference: &RasterImage, candidate: &RasterImage) -> Result<MidPoint> {
    mid_point_labeled("candidate", reference, candidate)
}

pub fn mid_point_labeled(
    label: impl Into<String>,
    reference: &RasterImage,
    candidate: &RasterImage,
) -> Result<MidPoint> {
    mid_point_from_info(
        label,
        &mutual_information(&joint_occupancy(reference, candidate)?)?,
    )
}

/// Chord length `sqrt(Hx² + Hy² - 2 Hx Hy NMI)` in the diagram plane.
pub fn chord(mi: &MutualInfo) -> Result<f64> {
    let nmi = mi.nmi()?;
    // (Hx - Hy)² + 2 Hx Hy (1 - NMI) avoids cancellation near identity
    let sq = (mi.hx - mi.hy).powi(2) + 2.0 * mi.hx * mi.hy * (1.0 - nmi);
    Ok(sq.max(0.0).sqrt())
}

pub fn mid_distance(reference: &RasterImage, candidate: &RasterImage) -> Result<f64> {
    chord(&mutual_information(&joint_occupancy(
        reference, candidate,
    )?)?)
}

/// Min-max over the candidate set; a degenerate range maps to 0.5.
pub fn mid_normalize(distances: &[f64]) -> Vec<f64> {
    if distances.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = min_max(distances);
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.5; distances.len()];
    }
    distances.iter().map(|d| (d - lo) / range).collect()
}
