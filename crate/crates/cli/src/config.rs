// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `--config` file: a JSON object whose keys are the long flag names
//! (snake_case). Flags given on the command line win over the file.

use std::path::Path;

use patred_core::{GridSize, MetricId, Mode, Normalization, RedundancyConfig, RedundancyKind};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Partial [`RedundancyConfig`]; missing fields keep their defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedundancyPatch {
    pub kind: Option<RedundancyKind>,
    #[serde(alias = "n_points")]
    pub n: Option<usize>,
    pub copies: Option<usize>,
    pub shift: Option<f64>,
    pub eta: Option<f64>,
    pub seed: Option<u64>,
}

impl RedundancyPatch {
    pub fn apply(&self, cfg: &mut RedundancyConfig) {
        if let Some(k) = self.kind {
            cfg.kind = k;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(c) = self.copies {
            cfg.copies = c;
        }
        if let Some(s) = self.shift {
            cfg.shift = s;
        }
        if let Some(e) = self.eta {
            cfg.eta = e;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

/// A grid side as a bare integer, `"perSegment"`, or `{"fixed": b}`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Side(usize),
    Size(GridSize),
}

impl From<GridValue> for GridSize {
    fn from(g: GridValue) -> Self {
        match g {
            GridValue::Side(b) => GridSize::Fixed(b),
            GridValue::Size(s) => s,
        }
    }
}

pub fn parse_grid(s: &str) -> std::result::Result<GridSize, String> {
    match s
        .trim()
        .to_ascii_lowercase()
        .replace(['-', '_'], "")
        .as_str()
    {
        "persegment" => Ok(GridSize::PerSegment),
        other => other
            .parse::<usize>()
            .map(GridSize::Fixed)
            .map_err(|_| format!("expected a grid side or `per-segment`, got `{s}`")),
    }
}

pub fn parse_normalization(s: &str) -> std::result::Result<Normalization, String> {
    match s
        .trim()
        .to_ascii_lowercase()
        .replace(['-', '_'], "")
        .as_str()
    {
        "minmax" => Ok(Normalization::MinMax),
        "zscore" => Ok(Normalization::ZScore),
        _ => Err(format!("expected minMax or zScore, got `{s}`")),
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub data: Option<String>,
    pub pattern: Option<String>,
    pub value_column: Option<String>,
    pub label_column: Option<String>,
    pub metric: Option<MetricId>,
    pub metrics: Option<Vec<MetricId>>,
    pub mode: Option<Mode>,
    pub redundancy: Option<RedundancyPatch>,
    pub grid: Option<GridValue>,
    pub top_k: Option<usize>,
    pub stride: Option<usize>,
    pub window: Option<usize>,
    pub exclusion: Option<usize>,
    pub normalization: Option<Normalization>,
    pub noise_scale: Option<f64>,
    pub lengths: Option<Vec<usize>>,
    pub selections: Option<usize>,
    pub truth: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}
