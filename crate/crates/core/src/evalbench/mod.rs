// SPDX-License-Identifier: MIT OR Apache-2.0

//! Perturbation benchmark: controlled modifications of real charts are
//! ranked by each metric and the rankings scored against a reference ranking.

pub mod agreement;
pub mod grid;
pub mod perturb;
pub mod sweep;
pub mod truth;

pub use agreement::{f1_rank1, r_squared, rank_correlation, scale_1_9, sequence_nmi};
pub use grid::{
    build_grid, build_suite, Dataset, Original, SuiteConfig, GRID_LENGTHS, GRID_SELECTIONS,
};
pub use perturb::{perturb, perturb_values, PerturbOptions, PerturbationId};
pub use sweep::{
    default_configs, sweep, Agreement, Statistic, SweepConfig, SweepResult, SweepRow, Trajectory,
};
pub use truth::GroundTruth;
