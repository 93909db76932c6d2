// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("column `{column}` not found (available: {})", available.join(", "))]
    MissingColumn {
        column: String,
        available: Vec<String>,
    },

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    Parse {
        row: u64,
        column: String,
        value: String,
    },

    #[error("series too short: {len} values, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },

    #[error("{labels} labels for {values} values")]
    LabelMismatch { labels: usize, values: usize },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("window of {window} points is longer than the series ({len} points)")]
    WindowTooLong { window: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("raster image is empty")]
    EmptyImage,

    #[error("grid size mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cosine distance is undefined for a zero vector")]
    ZeroVector,

    #[error("pearson distance is undefined for a constant vector")]
    ZeroVariance,

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("degenerate comparison: {0}")]
    Degenerate(String),

    #[error("{metric} cannot be used with {redundancy} redundancy: {reason}")]
    Capability {
        metric: String,
        redundancy: String,
        reason: String,
    },
}

impl Error {
    /// True when the error comes from the caller's input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }

    pub fn is_capability(&self) -> bool {
        matches!(self, Error::Capability { .. })
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::ZeroVariance | Error::ZeroVector | Error::EmptyImage
        )
    }
}
