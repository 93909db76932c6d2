// SPDX-License-Identifier: MIT OR Apache-2.0
#![allow(dead_code)]

use std::path::PathBuf;

use patred_core::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WEDGE: [f64; 7] = [1.0, 0.2, 0.85, 0.3, 0.65, 0.35, 0.5];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn volume() -> TimeSeries {
    patred_core::load_csv(fixture("volume.csv"), "volume").unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_chart(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        if let Ok(n) = patred_core::normalize_minmax(&v) {
            if n.iter().any(|&x| x != n[0]) {
                return n;
            }
        }
    }
}

/// A random walk normalized to `[0, 1]` with the wedge planted at a random
/// start, then uniform noise of the given amplitude on every point.
pub fn planted_walk(seed: u64, len: usize, amplitude: f64, noise: f64) -> (Vec<f64>, usize) {
    let mut rng = rng(seed);
    let mut walk = Vec::with_capacity(len);
    let mut level = 0.0;
    for _ in 0..len {
        level += rng.random_range(-1.0..=1.0);
        walk.push(level);
    }
    let mut walk = patred_core::normalize_minmax(&walk).unwrap();
    let start = rng.random_range(0..=len - WEDGE.len());
    let base = walk[start];
    let low = WEDGE.iter().copied().fold(f64::INFINITY, f64::min);
    for (k, &w) in WEDGE.iter().enumerate() {
        walk[start + k] = base + amplitude * (w - low);
    }
    for v in &mut walk {
        *v += noise * rng.random_range(-1.0..=1.0);
    }
    (walk, start)
}
