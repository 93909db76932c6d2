// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sliding-window localization of a pattern in a series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{windows_with, Normalization, Pattern, TimeSeries};
use crate::error::{Error, Result};
use crate::info::entropy_of_counts;
use crate::metrics::{Comparator, MetricId, Mode, Prepared};
use crate::mid::{self, MidPoint};
use crate::raster::{GridSize, RasterImage};
use crate::redundancy::RedundancyConfig;

pub const REFERENCE_LABEL: &str = "P_o";

fn default_top_k() -> usize {
    9
}

fn default_stride() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub pattern: Pattern,
    pub series: TimeSeries,
    pub metric: MetricId,
    /// Defaults to the metric's canonical mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub redundancy: RedundancyConfig,
    #[serde(default)]
    pub grid: GridSize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    /// Minimum start-index gap between reported matches; defaults to the window length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion: Option<usize>,
    /// Window length; defaults to the pattern's point count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default)]
    pub normalization: Normalization,
}

impl SearchRequest {
    pub fn new(pattern: Pattern, series: TimeSeries, metric: MetricId) -> Self {
        Self {
            pattern,
            series,
            metric,
            mode: None,
            redundancy: RedundancyConfig::default(),
            grid: GridSize::default(),
            stride: default_stride(),
            top_k: default_top_k(),
            exclusion: None,
            window: None,
            normalization: Normalization::default(),
        }
    }

    pub fn window_len(&self) -> usize {
        self.window.unwrap_or_else(|| self.pattern.len())
    }

    pub fn exclusion_len(&self) -> usize {
        self.exclusion.unwrap_or_else(|| self.window_len())
    }

    pub fn grid_side(&self) -> usize {
        self.grid.resolve(self.window_len())
    }

    pub fn window_count(&self) -> usize {
        let w = self.window_len();
        if w > self.series.len() || self.stride == 0 {
            return 0;
        }
        (self.series.len() - w) / self.stride + 1
    }

    /// Windows times grid cells: the quantity capped by the HTTP service.
    pub fn work_estimate(&self) -> u64 {
        let b = self.grid_side() as u64;
        self.window_count() as u64 * b * b
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_k == 0 {
            return Err(Error::InvalidParameter("top_k must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        let w = self.window_len();
        if w < 2 {
            return Err(Error::InvalidParameter(format!(
                "window length must be at least 2, got {w}"
            )));
        }
        if w > self.series.len() {
            return Err(Error::WindowTooLong {
                window: w,
                len: self.series.len(),
            });
        }
        Ok(())
    }

    pub fn comparator(&self) -> Result<Comparator> {
        Comparator::with_mode(
            self.metric,
            self.mode.unwrap_or_else(|| self.metric.canonical_mode()),
            self.redundancy,
            self.grid_side(),
        )
    }

    fn pattern_points(&self) -> Result<crate::data::PointSet> {
        Ok(self.pattern.resample(self.window_len())?.to_pointset())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub start_index: usize,
    pub distance: f64,
    pub rank: usize,
    pub window: Vec<f64>,
}

/// Ordinal ranks (1-based) by ascending distance, ties to the lower index.
pub fn rank_windows(distances: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
    let mut ranks = vec![0; distances.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        ranks[idx] = rank + 1;
    }
    ranks
}

/// Scores every window against the pattern and returns the `top_k` best,
/// at least `exclusion` indices apart.
pub fn search(req: &SearchRequest) -> Result<Vec<MatchResult>> {
    req.validate()?;
    let cmp = req.comparator()?;
    let reference = cmp.prepare(&req.pattern_points()?)?;
    let windows = windows_with(&req.series, req.window_len(), req.stride, req.normalization)?;

    let mut scored: Vec<(usize, f64, Vec<f64>)> = windows
        .into_par_iter()
        .map(|w| {
            let candidate = cmp.prepare(&crate::data::to_pointset(&w.values)?)?;
            let d = cmp.compare_or_fallback(&reference, &candidate)?;
            Ok((w.start, d.value, w.values))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let exclusion = req.exclusion_len();
    let mut picked: Vec<MatchResult> = Vec::with_capacity(req.top_k);
    for (start, distance, window) in scored {
        if picked.len() == req.top_k {
            break;
        }
        if picked
            .iter()
            .all(|m| m.start_index.abs_diff(start) >= exclusion)
        {
            picked.push(MatchResult {
                start_index: start,
                distance,
                rank: picked.len() + 1,
                window,
            });
        }
    }
    Ok(picked)
}

/// Diagram coordinates for a result set: the pattern's own point first, then
/// one point per match labelled with its start index.
///
/// Images are built with the request's redundancy. A candidate whose
/// comparison is degenerate is placed at a right angle.
pub fn mid_points(req: &SearchRequest, matches: &[MatchResult]) -> Result<Vec<MidPoint>> {
    let cmp = Comparator::new(MetricId::Mid, req.redundancy, req.grid_side())?;
    let image = |p: &Prepared| -> RasterImage { p.image().cloned().expect("raster mode") };
    let reference = image(&cmp.prepare(&req.pattern_points()?)?);
    let mut out = Vec::with_capacity(matches.len() + 1);
    out.push(match mid::reference_point(REFERENCE_LABEL, &reference) {
        Ok(p) => p,
        Err(e) if e.is_degenerate() => {
            MidPoint::polar(REFERENCE_LABEL, occupancy_entropy(&reference), 0.0)
        }
        Err(e) => return Err(e),
    });
    for m in matches {
        let candidate = image(&cmp.prepare(&crate::data::to_pointset(&m.window)?)?);
        let label = m.start_index.to_string();
        out.push(
            match mid::mid_point_labeled(label.clone(), &reference, &candidate) {
                Ok(p) => p,
                Err(e) if e.is_degenerate() => MidPoint::polar(
                    label,
                    occupancy_entropy(&candidate),
                    std::f64::consts::FRAC_PI_2,
                ),
                Err(e) => return Err(e),
            },
        );
    }
    Ok(out)
}

fn occupancy_entropy(img: &RasterImage) -> f64 {
    let k = img.populated() as u64;
    entropy_of_counts([k, img.bins().len() as u64 - k])
}
