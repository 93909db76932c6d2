// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use patred_core::evalbench::{
    build_suite, sweep, Dataset, GroundTruth, PerturbationId, SuiteConfig, SweepConfig,
};
use patred_core::{MetricId, RedundancyConfig};

fn suite(seed: u64) -> Vec<Dataset> {
    build_suite(
        &common::volume(),
        &SuiteConfig {
            seed,
            ..SuiteConfig::default()
        },
    )
    .unwrap()
}

fn truth_from(
    result: &patred_core::evalbench::SweepResult,
    metric: MetricId,
    cfg: &RedundancyConfig,
) -> GroundTruth {
    let mut truth = GroundTruth::new();
    for r in result.rows_for(metric, cfg) {
        truth.insert(r.dataset, r.perturbation, r.score).unwrap();
    }
    truth
}

#[test]
fn method_agrees_perfectly_with_itself() {
    let data = suite(0);
    let cfg = SweepConfig::default();
    let reference = RedundancyConfig::area_line(10);
    let plain = sweep(&data, &cfg, None).unwrap();
    assert_eq!(plain.rows.len(), cfg.combos().len() * 108);
    assert_eq!(cfg.combos().len(), 570);

    let truth = truth_from(&plain, MetricId::Nmi, &reference);
    let result = sweep(&data, &cfg, Some(&truth)).unwrap();
    let own = result.agreement_for(MetricId::Nmi, &reference).unwrap();
    assert!((own.r2 - 1.0).abs() < 1e-12, "{}", own.r2);
    assert_eq!(own.f1, 1.0);
    assert!((own.seq_nmi - 1.0).abs() < 1e-12, "{}", own.seq_nmi);

    let others = result.agreement.as_ref().unwrap();
    assert!(others.iter().any(|a| a.r2 < own.r2 - 1e-6));
}

#[test]
fn benchmarks_never_rank_first_without_redundancy() {
    for seed in 0..3 {
        let data = suite(seed);
        let cfg = SweepConfig {
            configs: vec![RedundancyConfig::none()],
            ..SweepConfig::default()
        };
        let result = sweep(&data, &cfg, None).unwrap();
        for r in &result.rows {
            let len = data[r.dataset - 1].original.values.len();
            if len >= 11 && r.perturbation.is_benchmark() {
                assert!(
                    r.rank > 1,
                    "seed {seed}: {} ranks {} first on dataset {}",
                    r.metric,
                    r.perturbation,
                    r.dataset
                );
            }
        }
    }
}

#[test]
fn sweep_csv_is_reproducible() {
    let cfg = SweepConfig {
        configs: patred_core::evalbench::default_configs(5)
            .into_iter()
            .step_by(7)
            .collect(),
        ..SweepConfig::default()
    };
    let render = || {
        let data = suite(5);
        let truth = GroundTruth::by_magnitude(&data).unwrap();
        let mut buf = Vec::new();
        sweep(&data, &cfg, Some(&truth))
            .unwrap()
            .write_rows_csv(&mut buf)
            .unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn outlier_middle_trajectory_is_reported() {
    let data = suite(0);
    let truth = GroundTruth::by_magnitude(&data).unwrap();
    let cfg = SweepConfig {
        configs: vec![RedundancyConfig::none(), RedundancyConfig::equidistant(1)],
        ..SweepConfig::default()
    };
    let result = sweep(&data, &cfg, Some(&truth)).unwrap();
    let p = PerturbationId::OutlierMiddle.index();
    for metric in MetricId::ALL {
        let at0 = result
            .agreement_for(metric, &RedundancyConfig::none())
            .unwrap();
        let at1 = result
            .agreement_for(metric, &RedundancyConfig::equidistant(1))
            .unwrap();
        assert!((0.0..=1.0).contains(&at0.r2_by_perturbation[p]));
        assert!((0.0..=1.0).contains(&at1.r2_by_perturbation[p]));
    }
}
