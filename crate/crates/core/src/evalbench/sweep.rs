// SPDX-License-Identifier: MIT OR Apache-2.0

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::agreement::{f1_rank1, r_squared, rank_correlation, scale_1_9, sequence_nmi};
use super::grid::Dataset;
use super::perturb::PerturbationId;
use super::truth::GroundTruth;
use crate::data::to_pointset;
use crate::error::{Error, Result};
use crate::metrics::{Comparator, MetricId};
use crate::mid::mid_normalize;
use crate::raster::GridSize;
use crate::redundancy::{RedundancyConfig, RedundancyKind, SWEEP_ETA, SWEEP_N};
use crate::search::rank_windows;

/// None, then every sweep `N` for equidistant and area-line, then every
/// `(N, η)` for the uniform cloud.
pub fn default_configs(seed: u64) -> Vec<RedundancyConfig> {
    let mut out = vec![RedundancyConfig::none()];
    out.extend(SWEEP_N.iter().map(|&n| RedundancyConfig::equidistant(n)));
    out.extend(SWEEP_N.iter().map(|&n| RedundancyConfig::area_line(n)));
    for &eta in &SWEEP_ETA {
        out.extend(
            SWEEP_N
                .iter()
                .map(|&n| RedundancyConfig::cloud(n, eta, seed)),
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub metrics: Vec<MetricId>,
    pub configs: Vec<RedundancyConfig>,
    pub grid: GridSize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            metrics: MetricId::ALL.to_vec(),
            configs: default_configs(0),
            grid: GridSize::default(),
        }
    }
}

impl SweepConfig {
    /// Compatible `(metric, config)` pairs in output order.
    pub fn combos(&self) -> Vec<(MetricId, RedundancyConfig)> {
        let mut out: Vec<(MetricId, RedundancyConfig)> = self
            .metrics
            .iter()
            .flat_map(|&m| {
                self.configs
                    .iter()
                    .filter(move |c| m.supports(c.kind))
                    .map(move |&c| (m, c))
            })
            .collect();
        out.sort_by(combo_order);
        out.dedup_by(|a, b| combo_order(a, b) == Ordering::Equal);
        out
    }
}

fn metric_index(m: MetricId) -> usize {
    MetricId::ALL
        .iter()
        .position(|&x| x == m)
        .expect("listed in ALL")
}

fn eta_key(c: &RedundancyConfig) -> f64 {
    match c.kind {
        RedundancyKind::Cloud | RedundancyKind::GaussCloud => c.eta,
        _ => 0.0,
    }
}

fn combo_order(a: &(MetricId, RedundancyConfig), b: &(MetricId, RedundancyConfig)) -> Ordering {
    metric_index(a.0)
        .cmp(&metric_index(b.0))
        .then(a.1.kind.cmp(&b.1.kind))
        .then(a.1.n.cmp(&b.1.n))
        .then(eta_key(&a.1).total_cmp(&eta_key(&b.1)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub metric: MetricId,
    pub config: RedundancyConfig,
    pub dataset: usize,
    pub perturbation: PerturbationId,
    pub distance: f64,
    pub rank: usize,
    /// Distance mapped onto `[1, 9]` within the dataset.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub metric: MetricId,
    pub config: RedundancyConfig,
    pub r2: f64,
    pub f1: f64,
    pub seq_nmi: f64,
    /// R² over datasets for each perturbation, in [`PerturbationId::ALL`] order.
    pub r2_by_perturbation: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Sorted by metric, kind, N, η, dataset, perturbation.
    pub rows: Vec<SweepRow>,
    /// One entry per combo, in row order; absent without ground truth.
    pub agreement: Option<Vec<Agreement>>,
}

struct Block {
    metric: MetricId,
    config: RedundancyConfig,
    rows: Vec<SweepRow>,
}

fn score_dataset(cmp: &Comparator, d: &Dataset) -> Result<Vec<f64>> {
    let reference = cmp.prepare(&to_pointset(&d.original.values)?)?;
    d.charts
        .iter()
        .map(|c| {
            Ok(cmp
                .compare_or_fallback(&reference, &cmp.prepare(&to_pointset(c)?)?)?
                .value)
        })
        .collect()
}

fn run_combo(
    metric: MetricId,
    config: RedundancyConfig,
    datasets: &[Dataset],
    grid: GridSize,
) -> Result<Block> {
    let mut rows = Vec::with_capacity(datasets.len() * PerturbationId::ALL.len());
    for d in datasets {
        let b = grid.resolve(d.original.values.len());
        let cmp = Comparator::new(metric, config, b)?;
        let distances = score_dataset(&cmp, d)?;
        let scores = if metric == MetricId::Mid {
            scale_1_9(&mid_normalize(&distances))
        } else {
            scale_1_9(&distances)
        };
        let ranks = rank_windows(&distances);
        for (i, p) in PerturbationId::ALL.into_iter().enumerate() {
            rows.push(SweepRow {
                metric,
                config,
                dataset: d.original.id,
                perturbation: p,
                distance: distances[i],
                rank: ranks[i],
                score: scores[i],
            });
        }
    }
    Ok(Block {
        metric,
        config,
        rows,
    })
}

fn agree(block: &Block, datasets: &[Dataset], truth: &GroundTruth) -> Result<Agreement> {
    let per = PerturbationId::ALL.len();
    let mut scores = Vec::with_capacity(block.rows.len());
    let mut means = Vec::with_capacity(block.rows.len());
    let mut method_ranks = Vec::with_capacity(datasets.len());
    let mut truth_ranks = Vec::with_capacity(datasets.len());
    for (d, chunk) in datasets.iter().zip(block.rows.chunks(per)) {
        scores.extend(chunk.iter().map(|r| r.score));
        means.extend(truth.mean_ranks(d.original.id)?);
        method_ranks.push(chunk.iter().map(|r| r.rank).collect::<Vec<_>>());
        truth_ranks.push(truth.ordinal_ranks(d.original.id)?);
    }
    let r2_by_perturbation = (0..per)
        .map(|p| {
            let s: Vec<f64> = scores.iter().skip(p).step_by(per).copied().collect();
            let t: Vec<f64> = means.iter().skip(p).step_by(per).copied().collect();
            r_squared(&s, &t)
        })
        .collect::<Result<_>>()?;
    Ok(Agreement {
        metric: block.metric,
        config: block.config,
        r2: r_squared(&scores, &means)?,
        f1: f1_rank1(&method_ranks, &truth_ranks)?,
        seq_nmi: sequence_nmi(&method_ranks, &truth_ranks)?,
        r2_by_perturbation,
    })
}

/// Scores every compatible `(metric, config)` pair on every dataset.
/// Agreement statistics are computed only when `truth` is given.
pub fn sweep(
    datasets: &[Dataset],
    cfg: &SweepConfig,
    truth: Option<&GroundTruth>,
) -> Result<SweepResult> {
    if datasets.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one dataset".into(),
        ));
    }
    if let Some(t) = truth {
        let ids: Vec<usize> = datasets.iter().map(|d| d.original.id).collect();
        t.check_complete(&ids)?;
    }
    for c in &cfg.configs {
        c.validate()?;
    }
    let mut ordered: Vec<&Dataset> = datasets.iter().collect();
    ordered.sort_by_key(|d| d.original.id);
    let ordered: Vec<Dataset> = ordered.into_iter().cloned().collect();

    let blocks: Vec<Block> = cfg
        .combos()
        .into_par_iter()
        .map(|(m, c)| run_combo(m, c, &ordered, cfg.grid))
        .collect::<Result<_>>()?;
    let agreement = match truth {
        Some(t) => Some(
            blocks
                .par_iter()
                .map(|b| agree(b, &ordered, t))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(SweepResult {
        rows: blocks.into_iter().flat_map(|b| b.rows).collect(),
        agreement,
    })
}

/// Which agreement statistic a trajectory table reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    R2,
    F1,
    SeqNmi,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::R2, Statistic::F1, Statistic::SeqNmi];

    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::R2 => "r2",
            Statistic::F1 => "f1",
            Statistic::SeqNmi => "seq_nmi",
        }
    }

    pub fn of(self, a: &Agreement) -> f64 {
        match self {
            Statistic::R2 => a.r2,
            Statistic::F1 => a.f1,
            Statistic::SeqNmi => a.seq_nmi,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "r2" | "r_squared" => Ok(Statistic::R2),
            "f1" => Ok(Statistic::F1),
            "seq_nmi" | "sequence_nmi" | "nmi" => Ok(Statistic::SeqNmi),
            _ => Err(Error::InvalidParameter(format!("unknown statistic `{s}`"))),
        }
    }
}

/// A trajectory over `N` for one metric, redundancy kind and η.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub metric: MetricId,
    pub kind: RedundancyKind,
    pub eta: Option<f64>,
    /// `(N, value)` in ascending `N`.
    pub points: Vec<(usize, f64)>,
}

impl Trajectory {
    pub fn value_at(&self, n: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == n).map(|p| p.1)
    }

    pub fn min(&self) -> Option<f64> {
        self.points.iter().map(|p| p.1).min_by(f64::total_cmp)
    }

    pub fn max(&self) -> Option<f64> {
        self.points.iter().map(|p| p.1).max_by(f64::total_cmp)
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: "<csv output>".into(),
        source,
    }
}

impl SweepResult {
    pub fn combo_count(&self) -> usize {
        self.rows.len() / PerturbationId::ALL.len().max(1) / self.dataset_count().max(1)
    }

    pub fn dataset_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.dataset)
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn agreement_for(&self, metric: MetricId, config: &RedundancyConfig) -> Option<&Agreement> {
        self.agreement.as_ref()?.iter().find(|a| {
            a.metric == metric
                && combo_order(&(a.metric, a.config), &(metric, *config)) == Ordering::Equal
        })
    }

    pub fn rows_for(&self, metric: MetricId, config: &RedundancyConfig) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| combo_order(&(r.metric, r.config), &(metric, *config)) == Ordering::Equal)
            .collect()
    }

    /// Trajectories over `N` of `value(agreement)`, one per (metric, kind, η).
    pub fn trajectories(&self, value: impl Fn(&Agreement) -> f64) -> Vec<Trajectory> {
        let mut out: Vec<Trajectory> = Vec::new();
        for a in self.agreement.iter().flatten() {
            let eta = matches!(
                a.config.kind,
                RedundancyKind::Cloud | RedundancyKind::GaussCloud
            )
            .then_some(a.config.eta);
            let v = value(a);
            match out
                .iter_mut()
                .find(|t| t.metric == a.metric && t.kind == a.config.kind && t.eta == eta)
            {
                Some(t) => t.points.push((a.config.n, v)),
                None => out.push(Trajectory {
                    metric: a.metric,
                    kind: a.config.kind,
                    eta,
                    points: vec![(a.config.n, v)],
                }),
            }
        }
        out
    }

    /// Spearman correlation between two metrics' within-dataset ranks, for
    /// every config both were run with.
    pub fn rank_agreement(&self, a: MetricId, b: MetricId) -> Result<Vec<(RedundancyConfig, f64)>> {
        let configs: Vec<RedundancyConfig> = {
            let mut seen: Vec<RedundancyConfig> = Vec::new();
            for r in self.rows.iter().filter(|r| r.metric == a) {
                if seen
                    .last()
                    .is_none_or(|c| combo_order(&(a, *c), &(a, r.config)) != Ordering::Equal)
                {
                    seen.push(r.config);
                }
            }
            seen
        };
        let mut out = Vec::new();
        for c in configs {
            let ra: Vec<usize> = self.rows_for(a, &c).iter().map(|r| r.rank).collect();
            let rb: Vec<usize> = self.rows_for(b, &c).iter().map(|r| r.rank).collect();
            if rb.len() == ra.len() && !ra.is_empty() {
                out.push((c, rank_correlation(&ra, &rb)?));
            }
        }
        Ok(out)
    }

    /// One line per row; agreement columns are empty without ground truth.
    pub fn write_rows_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "metric",
            "kind",
            "n",
            "eta",
            "dataset_id",
            "perturbation_id",
            "distance",
            "rank",
            "score",
            "r2",
            "f1",
            "seq_nmi",
        ])?;
        let per_combo = PerturbationId::ALL.len() * self.dataset_count().max(1);
        for (i, r) in self.rows.iter().enumerate() {
            let a = self.agreement.as_ref().map(|v| &v[i / per_combo]);
            let eta = matches!(
                r.config.kind,
                RedundancyKind::Cloud | RedundancyKind::GaussCloud
            )
            .then_some(r.config.eta);
            w.write_record([
                r.metric.as_str().to_string(),
                r.config.kind.as_str().to_string(),
                r.config.n.to_string(),
                fmt_opt(eta),
                r.dataset.to_string(),
                r.perturbation.as_str().to_string(),
                fmt_f64(r.distance),
                r.rank.to_string(),
                fmt_f64(r.score),
                fmt_opt(a.map(|a| a.r2)),
                fmt_opt(a.map(|a| a.f1)),
                fmt_opt(a.map(|a| a.seq_nmi)),
            ])?;
        }
        w.flush().map_err(io_err)
    }

    fn write_trajectory_rows<W: Write>(
        w: &mut csv::Writer<W>,
        prefix: &[String],
        t: &Trajectory,
    ) -> Result<()> {
        let mut record: Vec<String> = prefix.to_vec();
        record.push(t.metric.as_str().to_string());
        record.push(t.kind.as_str().to_string());
        record.push(fmt_opt(t.eta));
        record.extend(SWEEP_N.iter().map(|&n| fmt_opt(t.value_at(n))));
        record.push(fmt_opt(t.min()));
        record.push(fmt_opt(t.max()));
        w.write_record(&record)?;
        Ok(())
    }

    fn table_header(prefix: &[&str]) -> Vec<String> {
        let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
        h.extend(["metric", "kind", "eta"].map(String::from));
        h.extend(SWEEP_N.iter().map(|n| format!("n{n}")));
        h.extend(["min", "max"].map(String::from));
        h
    }

    /// Metric by redundancy rows, `N` columns, plus the row minimum and maximum.
    pub fn write_trajectory_table<W: Write>(&self, stat: Statistic, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::table_header(&[]))?;
        for t in self.trajectories(|a| stat.of(a)) {
            Self::write_trajectory_rows(&mut w, &[], &t)?;
        }
        w.flush().map_err(io_err)
    }

    /// Per-perturbation R² trajectories, grouped by perturbation.
    pub fn write_perturbation_table<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::table_header(&["perturbation_id"]))?;
        for p in PerturbationId::ALL {
            let prefix = [p.as_str().to_string()];
            for t in self.trajectories(|a| a.r2_by_perturbation[p.index()]) {
                Self::write_trajectory_rows(&mut w, &prefix, &t)?;
            }
        }
        w.flush().map_err(io_err)
    }
}
