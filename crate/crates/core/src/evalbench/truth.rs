// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::Dataset;
use super::perturb::PerturbationId;
use crate::error::{Error, Result};
use crate::search::rank_windows;

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    dataset_id: usize,
    perturbation_id: String,
    mean_rank: f64,
}

/// Reference mean rank per `(dataset, perturbation)`, each in `[1, 9]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundTruth {
    entries: BTreeMap<(usize, PerturbationId), f64>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, dataset: usize, p: PerturbationId, mean_rank: f64) -> Result<()> {
        if !(1.0..=9.0).contains(&mean_rank) {
            return Err(Error::InvalidParameter(format!(
                "mean rank {mean_rank} for dataset {dataset}, {p} is outside [1, 9]"
            )));
        }
        if self.entries.insert((dataset, p), mean_rank).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate entry for dataset {dataset}, {p}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, dataset: usize, p: PerturbationId) -> Option<f64> {
        self.entries.get(&(dataset, p)).copied()
    }

    pub fn datasets(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.entries.keys().map(|k| k.0).collect();
        ids.dedup();
        ids
    }

    /// Mean ranks of one dataset in [`PerturbationId::ALL`] order.
    pub fn mean_ranks(&self, dataset: usize) -> Result<Vec<f64>> {
        PerturbationId::ALL
            .into_iter()
            .map(|p| {
                self.get(dataset, p).ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "ground truth has no entry for dataset {dataset}, {p}"
                    ))
                })
            })
            .collect()
    }

    /// Ordinal ranks from the mean ranks, ties to the earlier perturbation.
    pub fn ordinal_ranks(&self, dataset: usize) -> Result<Vec<usize>> {
        Ok(rank_windows(&self.mean_ranks(dataset)?))
    }

    pub fn check_complete(&self, datasets: &[usize]) -> Result<()> {
        for &d in datasets {
            self.mean_ranks(d)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut out = Self::new();
        for rec in csv::Reader::from_reader(reader).deserialize() {
            let rec: Record = rec?;
            out.insert(rec.dataset_id, rec.perturbation_id.parse()?, rec.mean_rank)?;
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (&(dataset_id, p), &mean_rank) in &self.entries {
            w.serialize(Record {
                dataset_id,
                perturbation_id: p.as_str().to_string(),
                mean_rank,
            })?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv output>".into(),
            source,
        })
    }

    /// Ranks each dataset's charts by mean absolute deviation from the
    /// original, smallest deviation first.
    pub fn by_magnitude(datasets: &[Dataset]) -> Result<Self> {
        let mut out = Self::new();
        for d in datasets {
            let n = d.original.values.len() as f64;
            let deviation: Vec<f64> = d
                .charts
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(&d.original.values)
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                        / n
                })
                .collect();
            for (p, r) in PerturbationId::ALL
                .into_iter()
                .zip(rank_windows(&deviation))
            {
                out.insert(d.original.id, p, r as f64)?;
            }
        }
        Ok(out)
    }
}
