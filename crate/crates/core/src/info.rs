// SPDX-License-Identifier: MIT OR Apache-2.0

//! Entropy, mutual information and divergences. All logarithms are base 2.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Histogram2x2;

/// Additive smoothing applied to zero cells before a KL divergence.
pub const KL_EPSILON: f64 = 1e-12;

const SUM_TOLERANCE: f64 = 1e-9;

/// Shannon entropy in bits of a probability vector.
pub fn entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(-p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>())
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("sums to {sum}")));
    }
    Ok(())
}

/// Entropy in bits of the empirical distribution given by `counts`.
pub fn entropy_of_counts<I: IntoIterator<Item = u64>>(counts: I) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total = counts.iter().sum::<u64>() as f64;
    if total == 0.0 {
        return 0.0;
    }
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Mutual information with the entropies it was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInfo {
    pub mi: f64,
    pub hx: f64,
    pub hy: f64,
    pub hxy: f64,
}

impl MutualInfo {
    /// `I / sqrt(Hx * Hy)`, clamped to `[0, 1]`.
    pub fn nmi(&self) -> Result<f64> {
        if !(self.hx > 0.0 && self.hy > 0.0) {
            return Err(Error::Degenerate(format!(
                "zero marginal entropy (H(X) = {}, H(Y) = {})",
                self.hx, self.hy
            )));
        }
        Ok((self.mi / (self.hx * self.hy).sqrt()).clamp(0.0, 1.0))
    }

    pub fn vi(&self) -> f64 {
        (self.hx + self.hy - 2.0 * self.mi).max(0.0)
    }
}

/// A dense `rows × cols` contingency table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointCounts {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
}

impl JointCounts {
    pub fn new(rows: usize, cols: usize, cells: Vec<u64>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} cells for a {rows} × {cols} table",
                cells.len()
            )));
        }
        Ok(Self { rows, cols, cells })
    }

    /// Tallies paired discrete labels; labels are relabelled densely in sorted order.
    pub fn from_pairs<A: Ord + Copy, B: Ord + Copy>(xs: &[A], ys: &[B]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        let rows = dense_labels(xs);
        let cols = dense_labels(ys);
        let (r, c) = (rows.len(), cols.len());
        let mut cells = vec![0u64; r * c];
        for (x, y) in xs.iter().zip(ys) {
            cells[rows[x] * c + cols[y]] += 1;
        }
        Self::new(r, c, cells)
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.cells
            .chunks(self.cols.max(1))
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.cells[r * self.cols + c]).sum())
            .collect()
    }

    pub fn mutual_information(&self) -> Result<MutualInfo> {
        if self.total() == 0 {
            return Err(Error::Degenerate("empty contingency table".into()));
        }
        let hx = entropy_of_counts(self.row_sums());
        let hy = entropy_of_counts(self.col_sums());
        let hxy = entropy_of_counts(self.cells.iter().copied());
        Ok(MutualInfo {
            mi: (hx + hy - hxy).max(0.0),
            hx,
            hy,
            hxy,
        })
    }
}

fn dense_labels<T: Ord + Copy>(values: &[T]) -> BTreeMap<T, usize> {
    let mut map: BTreeMap<T, usize> = values.iter().map(|&v| (v, 0)).collect();
    for (i, slot) in map.values_mut().enumerate() {
        *slot = i;
    }
    map
}

impl From<&Histogram2x2> for JointCounts {
    fn from(h: &Histogram2x2) -> Self {
        JointCounts {
            rows: 2,
            cols: 2,
            cells: vec![h.n00, h.n01, h.n10, h.n11],
        }
    }
}

/// `I = H(X) + H(Y) - H(X, Y)` over the normalized 2×2 occupancy table.
pub fn mutual_information(h: &Histogram2x2) -> Result<MutualInfo> {
    JointCounts::from(h).mutual_information()
}

pub fn nmi_distance(h: &Histogram2x2) -> Result<f64> {
    Ok(1.0 - mutual_information(h)?.nmi()?)
}

pub fn vi(h: &Histogram2x2) -> Result<f64> {
    Ok(mutual_information(h)?.vi())
}

/// Adds `eps` to zero cells and renormalizes.
pub fn smooth(p: &[f64], eps: f64) -> Vec<f64> {
    let lifted: Vec<f64> = p.iter().map(|&v| if v > 0.0 { v } else { eps }).collect();
    let sum: f64 = lifted.iter().sum();
    lifted.into_iter().map(|v| v / sum).collect()
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    check_distribution(p)?;
    check_distribution(q)
}

/// `Σ p log2(p / q)`. `q` must be positive wherever `p` is; smooth first.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::InvalidDistribution(
                    "q has zero mass where p does not; smooth q first".into(),
                ));
            }
            d += a * (a / b).log2();
        }
    }
    Ok(d.max(0.0))
}

/// Jensen-Shannon divergence in bits, bounded by `[0, 1]`.
///
/// The mixture is positive wherever either input is, so no smoothing is needed.
pub fn jsd(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            d += 0.5 * a * (a / m).log2();
        }
        if b > 0.0 {
            d += 0.5 * b * (b / m).log2();
        }
    }
    Ok(d.clamp(0.0, 1.0))
}
