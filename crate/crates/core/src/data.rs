// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ingestion, normalization and windowing of time series, and the point-set
//! representation every downstream stage consumes.
//!
//! Charts live in the unit square: a series of `L` normalized values becomes
//! the points `(i / (L - 1), value_i)`.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered real-valued observations with optional date labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_labels(values, None)
    }

    pub fn with_labels(values: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort {
                len: values.len(),
                min: 2,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(labels) = &labels {
            if labels.len() != values.len() {
                return Err(Error::LabelMismatch {
                    labels: labels.len(),
                    values: values.len(),
                });
            }
        }
        Ok(Self { values, labels })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Multiplies every value by `factor`, keeping labels.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_labels(
            self.values.iter().map(|v| v * factor).collect(),
            self.labels.clone(),
        )
    }
}

/// Which columns of a CSV file feed a [`TimeSeries`].
///
/// With no value column the last header column is used. Labels are only
/// read when a label column is named.
#[derive(Clone, Debug, Default)]
pub struct CsvColumns<'a> {
    pub value: Option<&'a str>,
    pub label: Option<&'a str>,
}

/// Loads the named value column of a headed CSV file, in row order.
pub fn load_csv(path: impl AsRef<Path>, value_column: &str) -> Result<TimeSeries> {
    load_csv_columns(
        path,
        CsvColumns {
            value: Some(value_column),
            label: None,
        },
    )
}

pub fn load_csv_columns(path: impl AsRef<Path>, columns: CsvColumns<'_>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, columns)
}

pub fn read_csv<R: Read>(reader: R, columns: CsvColumns<'_>) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::TooShort { len: 0, min: 2 });
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_owned(),
                available: headers.clone(),
            })
    };
    let value_idx = match columns.value {
        Some(name) => find(name)?,
        None => headers.len() - 1,
    };
    let label_idx = columns.label.map(find).transpose()?;
    let value_name = headers[value_idx].clone();

    let mut values = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        let cell = record.get(value_idx).unwrap_or("");
        let value: f64 = cell.parse().map_err(|_| Error::Parse {
            row,
            column: value_name.clone(),
            value: cell.to_owned(),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                row,
                column: value_name.clone(),
                value: cell.to_owned(),
            });
        }
        values.push(value);
        if let (Some(idx), Some(labels)) = (label_idx, labels.as_mut()) {
            labels.push(record.get(idx).unwrap_or("").to_owned());
        }
    }
    TimeSeries::with_labels(values, labels)
}

/// How a window of raw values is mapped onto the unit interval.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Normalization {
    /// Affine map of `[min, max]` onto `[0, 1]`; constant input maps to 0.5.
    #[default]
    MinMax,
    /// Standard score clipped to ±3 sd and mapped onto `[0, 1]`; constant input maps to 0.5.
    ZScore,
}

impl Normalization {
    pub fn apply(self, values: &[f64]) -> Result<Vec<f64>> {
        match self {
            Normalization::MinMax => normalize_minmax(values),
            Normalization::ZScore => normalize_zscore(values),
        }
    }
}

pub fn normalize_minmax(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            len: values.len(),
            min: 2,
        });
    }
    let (lo, hi) = min_max(values);
    let range = hi - lo;
    if !(range > 0.0) || !range.is_finite() {
        return Ok(vec![0.5; values.len()]);
    }
    Ok(values
        .iter()
        .map(|v| ((v - lo) / range).clamp(0.0, 1.0))
        .collect())
}

fn normalize_zscore(values: &[f64]) -> Result<Vec<f64>> {
    const CLIP: f64 = 3.0;
    if values.len() < 2 {
        return Err(Error::TooShort {
            len: values.len(),
            min: 2,
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(sd > 0.0) {
        return Ok(vec![0.5; values.len()]);
    }
    Ok(values
        .iter()
        .map(|v| (((v - mean) / sd).clamp(-CLIP, CLIP) + CLIP) / (2.0 * CLIP))
        .collect())
}

pub(crate) fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// A point in the unit square. `origin` marks points of the un-augmented chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub origin: bool,
}

impl Point {
    pub fn origin(x: f64, y: f64) -> Self {
        Self { x, y, origin: true }
    }

    pub fn added(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            origin: false,
        }
    }
}

/// Multiset of points in the unit square.
///
/// Points are kept in generation order: origin points ascend in x, with any
/// points inserted between two origins stored between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if let Some(p) = points
            .iter()
            .find(|p| !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y))
        {
            return Err(Error::InvalidParameter(format!(
                "point ({}, {}) lies outside the unit square",
                p.x, p.y
            )));
        }
        Ok(Self { points })
    }

    /// Lays normalized values out at `x = i / (L - 1)`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort {
                len: values.len(),
                min: 2,
            });
        }
        let last = (values.len() - 1) as f64;
        Self::from_points(
            values
                .iter()
                .enumerate()
                .map(|(i, &y)| Point::origin(i as f64 / last, y))
                .collect(),
        )
    }

    pub(crate) fn from_points_unchecked(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn origin_count(&self) -> usize {
        self.points.iter().filter(|p| p.origin).count()
    }

    pub fn origins(&self) -> impl Iterator<Item = &Point> {
        self.points.iter().filter(|p| p.origin)
    }

    /// Y coordinates in storage order; the paired vector used by sequence-mode metrics.
    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }
}

/// Places normalized values on the unit square (see [`PointSet::from_values`]).
pub fn to_pointset(values: &[f64]) -> Result<PointSet> {
    PointSet::from_values(values)
}

/// A sketched or digitized exemplar, normalized to the unit square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub name: String,
    points: Vec<(f64, f64)>,
}

impl Pattern {
    /// Builds a pattern from raw coordinates that must already ascend strictly in x.
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPattern(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidPattern("coordinates must be finite".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidPattern(
                "x coordinates must be strictly increasing".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let (x0, x1) = min_max(&xs);
        let ys = normalize_minmax(&ys)?;
        let points = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (((x - x0) / (x1 - x0)).clamp(0.0, 1.0), y))
            .collect();
        Ok(Self {
            name: name.into(),
            points,
        })
    }

    /// Sorts the points by x first. The flag reports whether any reordering happened.
    pub fn from_unsorted(
        name: impl Into<String>,
        mut points: Vec<(f64, f64)>,
    ) -> Result<(Self, bool)> {
        let sorted = points.windows(2).all(|w| w[0].0 <= w[1].0);
        if !sorted {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Ok((Self::new(name, points)?, !sorted))
    }

    /// Equally spaced values become points at uniform x.
    pub fn from_values(name: impl Into<String>, values: &[f64]) -> Result<Self> {
        Self::new(
            name,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as f64, v))
                .collect(),
        )
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Linear interpolation at `count` uniform x positions, renormalized.
    pub fn resample(&self, count: usize) -> Result<Pattern> {
        if count < 2 {
            return Err(Error::InvalidParameter(format!(
                "cannot resample to {count} points"
            )));
        }
        let values = self.resampled_values(count);
        Pattern::from_values(self.name.clone(), &values)
    }

    /// Y values at `count` uniform x positions (before renormalization).
    pub fn resampled_values(&self, count: usize) -> Vec<f64> {
        let pts = &self.points;
        let last = (count - 1) as f64;
        let mut seg = 0;
        (0..count)
            .map(|i| {
                let x = i as f64 / last;
                while seg + 2 < pts.len() && pts[seg + 1].0 < x {
                    seg += 1;
                }
                let (x0, y0) = pts[seg];
                let (x1, y1) = pts[seg + 1];
                let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
                if t == 1.0 {
                    y1
                } else {
                    y0 + t * (y1 - y0)
                }
            })
            .collect()
    }

    pub fn to_pointset(&self) -> PointSet {
        PointSet::from_points_unchecked(
            self.points
                .iter()
                .map(|&(x, y)| Point::origin(x, y))
                .collect(),
        )
    }
}

/// A normalized sliding window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub values: Vec<f64>,
}

pub fn windows(series: &TimeSeries, length: usize, stride: usize) -> Result<Vec<Window>> {
    windows_with(series, length, stride, Normalization::MinMax)
}

pub fn windows_with(
    series: &TimeSeries,
    length: usize,
    stride: usize,
    normalization: Normalization,
) -> Result<Vec<Window>> {
    if length < 2 {
        return Err(Error::InvalidParameter(format!(
            "window length must be at least 2, got {length}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be positive".into()));
    }
    if length > series.len() {
        return Err(Error::WindowTooLong {
            window: length,
            len: series.len(),
        });
    }
    (0..=series.len() - length)
        .step_by(stride)
        .map(|start| {
            Ok(Window {
                start,
                values: normalization.apply(&series.values()[start..start + length])?,
            })
        })
        .collect()
}

/// Centered moving average; edges average over the truncated window.
pub fn smooth_moving_average(series: &TimeSeries, window: usize) -> Result<TimeSeries> {
    let n = series.len();
    if window == 0 || window > n {
        return Err(Error::InvalidParameter(format!(
            "smoothing window must be in 1..={n}, got {window}"
        )));
    }
    let left = (window - 1) / 2;
    let right = window / 2;
    let values = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right).min(n - 1);
            let sum: f64 = series.values()[lo..=hi].iter().sum();
            sum / (hi - lo + 1) as f64
        })
        .collect();
    TimeSeries::with_labels(values, series.labels.clone())
}
