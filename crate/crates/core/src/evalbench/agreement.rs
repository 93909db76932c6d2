// SPDX-License-Identifier: MIT OR Apache-2.0

//! Agreement statistics between a method's ranking and a reference ranking.

use crate::data::min_max;
use crate::error::{Error, Result};
use crate::info::JointCounts;

/// Affine map of distances onto `[1, 9]`; a degenerate range maps to 5.
pub fn scale_1_9(distances: &[f64]) -> Vec<f64> {
    if distances.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = min_max(distances);
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![5.0; distances.len()];
    }
    distances
        .iter()
        .map(|d| 1.0 + 8.0 * (d - lo) / range)
        .collect()
}

/// Coefficient of determination of the least-squares fit of `truth` on
/// `scores`. Zero when either side has no variance.
pub fn r_squared(scores: &[f64], truth: &[f64]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: truth.len(),
        });
    }
    if scores.len() < 2 {
        return Err(Error::TooShort {
            len: scores.len(),
            min: 2,
        });
    }
    let n = scores.len() as f64;
    let mx = scores.iter().sum::<f64>() / n;
    let my = truth.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in scores.iter().zip(truth) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Ok(0.0);
    }
    Ok((sxy * sxy / (sxx * syy)).clamp(0.0, 1.0))
}

fn check_shapes(method: &[Vec<usize>], truth: &[Vec<usize>]) -> Result<()> {
    if method.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: method.len(),
            right: truth.len(),
        });
    }
    for (m, t) in method.iter().zip(truth) {
        if m.len() != t.len() {
            return Err(Error::LengthMismatch {
                left: m.len(),
                right: t.len(),
            });
        }
    }
    Ok(())
}

/// F1 of predicting the rank-1 item of every dataset.
///
/// Each `(dataset, item)` pair is labelled positive when its rank is 1; the
/// method's labels are scored against the truth labels over all items.
pub fn f1_rank1(method_ranks: &[Vec<usize>], truth_ranks: &[Vec<usize>]) -> Result<f64> {
    check_shapes(method_ranks, truth_ranks)?;
    let (mut tp, mut fp, mut fneg) = (0u64, 0u64, 0u64);
    for (m, t) in method_ranks.iter().zip(truth_ranks) {
        for (&mr, &tr) in m.iter().zip(t) {
            match (mr == 1, tr == 1) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => {}
            }
        }
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fneg) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// NMI of two discrete sequences. A sequence without entropy yields 0,
/// unless both sequences are the same constant.
pub fn pair_nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    let mi = JointCounts::from_pairs(a, b)?.mutual_information()?;
    if mi.hx > 0.0 && mi.hy > 0.0 {
        return mi.nmi();
    }
    Ok(if a == b { 1.0 } else { 0.0 })
}

/// Mean over datasets of the NMI between paired rank sequences.
pub fn sequence_nmi(method_ranks: &[Vec<usize>], truth_ranks: &[Vec<usize>]) -> Result<f64> {
    check_shapes(method_ranks, truth_ranks)?;
    if method_ranks.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    let mut total = 0.0;
    for (m, t) in method_ranks.iter().zip(truth_ranks) {
        total += pair_nmi(m, t)?;
    }
    Ok(total / method_ranks.len() as f64)
}

/// Pearson correlation of two rank vectors; zero when either is constant.
pub fn rank_correlation(a: &[usize], b: &[usize]) -> Result<f64> {
    let x: Vec<f64> = a.iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = b.iter().map(|&v| v as f64).collect();
    match crate::metrics::pearson(&x, &y) {
        Err(Error::ZeroVariance) => Ok(0.0),
        other => other,
    }
}
