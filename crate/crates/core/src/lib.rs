// SPDX-License-Identifier: MIT OR Apache-2.0

//! Line-chart pattern matching with redundant point sets.
//!
//! Charts are normalized into the unit square, optionally augmented with
//! interpolated points, rasterized onto a `b x b` grid and compared with one
//! of nine distance metrics. [`search`] slides a pattern across a series and
//! [`evalbench`] measures how well each metric and redundancy setting agrees
//! with a human ranking of perturbed charts.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod evalbench;
pub mod info;
pub mod metrics;
pub mod mid;
pub mod raster;
pub mod redundancy;
pub mod search;

pub use data::{
    load_csv, normalize_minmax, to_pointset, windows, Normalization, Pattern, Point, PointSet,
    TimeSeries, Window,
};
pub use error::{Error, Result};
pub use metrics::{distance, Comparator, DistanceValue, MetricId, Mode};
pub use mid::{mid_distance, mid_normalize, mid_point, MidPoint};
pub use raster::{rasterize, GridSize, RasterImage};
pub use redundancy::{RedundancyConfig, RedundancyKind};
pub use search::{mid_points, rank_windows, search, MatchResult, SearchRequest};
