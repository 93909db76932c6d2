// SPDX-License-Identifier: MIT OR Apache-2.0

//! One line per acceptance criterion. Exits non-zero when any line fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use patred_core::evalbench::{
    build_suite, default_configs, sweep, Dataset, GroundTruth, PerturbationId, SuiteConfig,
    SweepConfig, SweepResult,
};
use patred_core::info::{jsd, mutual_information};
use patred_core::metrics::{check_capability, Comparator, PAIRING_REASON};
use patred_core::raster::Histogram2x2;
use patred_core::redundancy::SWEEP_N;
use patred_core::{
    load_csv, normalize_minmax, search, to_pointset, MetricId, Mode, Pattern, RedundancyConfig,
    RedundancyKind, SearchRequest, TimeSeries,
};
use patred_suite::Report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tower::ServiceExt;

const WEDGE: [f64; 7] = [1.0, 0.2, 0.85, 0.3, 0.65, 0.35, 0.5];
const CAPABILITY_TEXT: &str =
    "can only work with vectors which have the same number of data points";
const GROUP_METRICS: [MetricId; 5] = [
    MetricId::Nmi,
    MetricId::Jaccard,
    MetricId::Dice,
    MetricId::Cosine,
    MetricId::Jsd,
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn out_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("create output directory");
    dir
}

fn volume() -> TimeSeries {
    load_csv(fixture("volume.csv"), "volume").expect("volume fixture")
}

fn random_chart(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        if let Ok(n) = normalize_minmax(&v) {
            if n.iter().any(|&x| x != n[0]) {
                return n;
            }
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn metric_axioms() -> Result<String, String> {
    let results: Vec<Result<usize, String>> = (0..200u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + case);
            let len = rng.random_range(6..=21);
            let x = to_pointset(&random_chart(&mut rng, len)).map_err(|e| e.to_string())?;
            let y = to_pointset(&random_chart(&mut rng, len)).map_err(|e| e.to_string())?;
            let mut checked = 0;
            for metric in MetricId::ALL {
                for cfg in default_configs(case)
                    .into_iter()
                    .filter(|c| metric.supports(c.kind))
                {
                    let label = format!("pair {case}, {metric} {}", cfg.label());
                    let run = || -> patred_core::Result<(f64, f64, f64, f64)> {
                        let cmp = Comparator::new(metric, cfg, 16)?;
                        let (px, py) = (cmp.prepare(&x)?, cmp.prepare(&y)?);
                        Ok((
                            cmp.compare(&px, &px)?.value,
                            cmp.compare(&py, &py)?.value,
                            cmp.compare(&px, &py)?.value,
                            cmp.compare(&py, &px)?.value,
                        ))
                    };
                    let (dxx, dyy, dxy, dyx) = run().map_err(|e| format!("{label}: {e}"))?;
                    ensure(dxx.abs() < 1e-9 && dyy.abs() < 1e-9, || {
                        format!("{label}: self distance {dxx}, {dyy}")
                    })?;
                    ensure(dxy >= 0.0, || format!("{label}: negative distance {dxy}"))?;
                    ensure((dxy - dyx).abs() < 1e-12, || {
                        format!("{label}: asymmetric {dxy} vs {dyx}")
                    })?;
                    checked += 1;
                }
            }
            Ok(checked)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!("200 pairs, {total} metric/config cells"))
}

fn plogp_sum(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

fn info_oracle() -> Result<String, String> {
    let mut tables = 0;
    for total in 1..=12u64 {
        for a in 0..=total {
            for b in 0..=total - a {
                for c in 0..=total - a - b {
                    let n = [a, b, c, total - a - b - c];
                    let t = total as f64;
                    let p: Vec<f64> = n.iter().map(|&v| v as f64 / t).collect();
                    let px = [p[0] + p[1], p[2] + p[3]];
                    let py = [p[0] + p[2], p[1] + p[3]];
                    let (hx, hy, hxy) = (plogp_sum(&px), plogp_sum(&py), plogp_sum(&p));
                    let mut mi = 0.0;
                    for i in 0..2 {
                        for j in 0..2 {
                            let pij = p[2 * i + j];
                            if pij > 0.0 {
                                mi += pij * (pij / (px[i] * py[j])).ln();
                            }
                        }
                    }
                    mi /= std::f64::consts::LN_2;

                    let got = mutual_information(&Histogram2x2::new(n[0], n[1], n[2], n[3]))
                        .map_err(|e| format!("{n:?}: {e}"))?;
                    ensure((got.mi - (got.hx + got.hy - got.hxy)).abs() < 1e-10, || {
                        format!("{n:?}: I != Hx + Hy - Hxy")
                    })?;
                    ensure((got.mi - mi).abs() < 1e-10, || {
                        format!("{n:?}: I {} vs {mi}", got.mi)
                    })?;
                    ensure(
                        (got.hx - hx).abs() < 1e-10
                            && (got.hy - hy).abs() < 1e-10
                            && (got.hxy - hxy).abs() < 1e-10,
                        || format!("{n:?}: entropies differ"),
                    )?;
                    ensure((got.vi() - (hxy - mi)).abs() < 1e-10, || {
                        format!("{n:?}: VI")
                    })?;
                    if let Ok(nmi) = got.nmi() {
                        ensure((0.0..=1.0).contains(&nmi), || format!("{n:?}: NMI {nmi}"))?;
                    }

                    let q = [p[0], p[2], p[1], p[3]];
                    let mut want = 0.0;
                    for (&a, &b) in p.iter().zip(&q) {
                        let m = (a + b) / 2.0;
                        if a > 0.0 {
                            want += a * (a / m).ln();
                        }
                        if b > 0.0 {
                            want += b * (b / m).ln();
                        }
                    }
                    want /= 2.0 * std::f64::consts::LN_2;
                    let d = jsd(&p, &q).map_err(|e| format!("{n:?}: {e}"))?;
                    ensure((0.0..=1.0).contains(&d) && (d - want).abs() < 1e-10, || {
                        format!("{n:?}: JSD {d} vs {want}")
                    })?;
                    tables += 1;
                }
            }
        }
    }
    Ok(format!("{tables} tables"))
}

fn redundancy_principles() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut sets = 0;
    for pattern in 0..100u64 {
        let len = rng.random_range(2..=21);
        let ps = to_pointset(&random_chart(&mut rng, len)).map_err(|e| e.to_string())?;
        for &n in &SWEEP_N {
            let configs = [
                RedundancyConfig::equidistant(n),
                RedundancyConfig::area_line(n),
                RedundancyConfig::cloud(n, 0.1, pattern),
                RedundancyConfig::gauss_cloud(n, 0.1, pattern),
            ];
            for cfg in configs {
                let label = format!("pattern {pattern}, {}", cfg.label());
                let out = cfg.apply(&ps).map_err(|e| format!("{label}: {e}"))?;
                let origins: Vec<(f64, f64)> = out.origins().map(|p| (p.x, p.y)).collect();
                let input: Vec<(f64, f64)> = ps.points().iter().map(|p| (p.x, p.y)).collect();
                ensure(origins == input, || {
                    format!("{label}: origins not recoverable")
                })?;
                sets += 1;
                match cfg.kind {
                    RedundancyKind::Equidistant => {
                        for (seg, w) in ps.points().windows(2).enumerate() {
                            let step = (w[1].x - w[0].x) / (n + 1) as f64;
                            let chunk = &out.points()[seg * (n + 1)..=(seg + 1) * (n + 1)];
                            for pair in chunk.windows(2) {
                                let dev = ((pair[1].x - pair[0].x) - step).abs();
                                ensure(dev < 1e-12, || format!("{label}: spacing off by {dev}"))?;
                            }
                        }
                    }
                    RedundancyKind::AreaLine => {
                        let want = cfg.copies * (len + n * (len - 1));
                        ensure(out.len() == want, || {
                            format!("{label}: {} points, want {want}", out.len())
                        })?;
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(format!("100 patterns, {sets} augmented sets"))
}

/// Random walk normalized to `[0, 1]`, wedge planted at a seeded start, then
/// `U[-noise, noise]` on every point.
fn planted_walk(seed: u64, len: usize, noise: f64) -> (Vec<f64>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    let walk: Vec<f64> = (0..len)
        .map(|_| {
            level += rng.random_range(-1.0..=1.0);
            level
        })
        .collect();
    let mut walk = normalize_minmax(&walk).expect("walk is not constant");
    let start = rng.random_range(0..=len - WEDGE.len());
    let base = walk[start];
    let low = WEDGE.iter().copied().fold(f64::INFINITY, f64::min);
    for (k, &w) in WEDGE.iter().enumerate() {
        walk[start + k] = base + 0.5 * (w - low);
    }
    for v in &mut walk {
        *v += noise * rng.random_range(-1.0..=1.0);
    }
    (walk, start)
}

fn planted_recovery() -> Result<String, String> {
    let pattern = Pattern::from_values("wedge", &WEDGE).map_err(|e| e.to_string())?;
    let mut hits = 0;
    for seed in 0..100 {
        let (walk, start) = planted_walk(seed, 300, 0.05);
        let series = TimeSeries::new(walk).map_err(|e| e.to_string())?;
        let mut req = SearchRequest::new(pattern.clone(), series, MetricId::Nmi);
        req.redundancy = RedundancyConfig::equidistant(100);
        req.top_k = 1;
        let best = &search(&req).map_err(|e| format!("seed {seed}: {e}"))?[0];
        if best.start_index.abs_diff(start) <= 1 {
            hits += 1;
        }
    }
    ensure(hits >= 95, || {
        format!("{hits}/100 seeds recovered, need 95")
    })?;
    Ok(format!("{hits}/100 seeds recovered at rank 1"))
}

fn violating_configs() -> Vec<(MetricId, RedundancyConfig)> {
    let kinds = [
        RedundancyConfig::area_line(3),
        RedundancyConfig::cloud(3, 0.1, 0),
        RedundancyConfig::gauss_cloud(3, 0.1, 0),
    ];
    [MetricId::Pearson, MetricId::Manhattan, MetricId::Euclidean]
        .into_iter()
        .flat_map(|m| kinds.map(|c| (m, c)))
        .collect()
}

fn capability_library() -> Result<usize, String> {
    let x = to_pointset(&WEDGE).map_err(|e| e.to_string())?;
    let mut n = 0;
    for (metric, cfg) in violating_configs() {
        let label = format!("{metric} {}", cfg.label());
        let errors = [
            check_capability(metric, Mode::Sequence, cfg.kind).err(),
            Comparator::new(metric, cfg, 16).err(),
            patred_core::distance(&x, &x, metric, &cfg, 16).err(),
            {
                let pattern = Pattern::from_values("w", &WEDGE).map_err(|e| e.to_string())?;
                let series = TimeSeries::new(volume().into_values()).map_err(|e| e.to_string())?;
                let mut req = SearchRequest::new(pattern, series, metric);
                req.redundancy = cfg;
                search(&req).err()
            },
        ];
        for e in errors {
            let e = e.ok_or_else(|| format!("library accepted {label}"))?;
            ensure(
                e.is_capability() && e.to_string().contains(CAPABILITY_TEXT),
                || format!("{label}: wrong error `{e}`"),
            )?;
            n += 1;
        }
    }
    ensure(PAIRING_REASON.contains(CAPABILITY_TEXT), || {
        "reason text".into()
    })?;
    Ok(n)
}

fn cli(args: &[&str]) -> Result<(), patred_cli::CliError> {
    patred_cli::run_from(std::iter::once("patred").chain(args.iter().copied()))
}

fn capability_cli() -> Result<usize, String> {
    let out = out_dir().join("capability.json");
    let (wedge, data) = (fixture("wedge.csv"), fixture("volume.csv"));
    let mut n = 0;
    for (metric, cfg) in violating_configs() {
        let (m, k) = (metric.as_str(), cfg.kind.as_str());
        let label = format!("{m} {k}");
        let runs = [
            cli(&[
                "search",
                "--pattern",
                wedge.to_str().unwrap(),
                "--data",
                data.to_str().unwrap(),
                "--metric",
                m,
                "--redundancy",
                k,
                "--n",
                "3",
                "--out",
                out.to_str().unwrap(),
            ]),
            cli(&[
                "metrics",
                "--x",
                wedge.to_str().unwrap(),
                "--y",
                wedge.to_str().unwrap(),
                "--metric",
                m,
                "--redundancy",
                k,
                "--out",
                out.to_str().unwrap(),
            ]),
        ];
        for r in runs {
            let e = r.err().ok_or_else(|| format!("cli accepted {label}"))?;
            ensure(
                e.exit_code() == 2 && e.to_string().contains(CAPABILITY_TEXT),
                || format!("{label}: exit {} `{e}`", e.exit_code()),
            )?;
            n += 1;
        }
    }
    Ok(n)
}

async fn call(
    app: &axum::Router,
    method: Method,
    uri: &str,
    body: String,
) -> (StatusCode, serde_json::Value) {
    let resp = app
        .clone()
        .oneshot(
            Request::builder()
                .method(method)
                .uri(uri)
                .body(Body::from(body))
                .unwrap(),
        )
        .await
        .unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (
        status,
        serde_json::from_slice(&bytes).unwrap_or(serde_json::Value::Null),
    )
}

fn capability_http() -> Result<usize, String> {
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(async {
        let app = patred_service::app(&patred_service::ServiceConfig::default())
            .map_err(|e| e.to_string())?;
        let csv = std::fs::read_to_string(fixture("volume.csv")).map_err(|e| e.to_string())?;
        let (_, ds) = call(&app, Method::POST, "/datasets", csv).await;
        let points: Vec<[f64; 2]> = WEDGE
            .iter()
            .enumerate()
            .map(|(i, &y)| [i as f64, y])
            .collect();
        let (_, pat) = call(
            &app,
            Method::POST,
            "/patterns",
            serde_json::json!({ "points": points }).to_string(),
        )
        .await;
        let mut n = 0;
        for (metric, cfg) in violating_configs() {
            let body = serde_json::json!({
                "pattern_id": pat["id"],
                "dataset_id": ds["id"],
                "metric": metric,
                "redundancy": cfg,
            });
            let (status, err) = call(&app, Method::POST, "/search", body.to_string()).await;
            let msg = err["message"].as_str().unwrap_or_default();
            ensure(
                status == StatusCode::UNPROCESSABLE_ENTITY && msg.contains(CAPABILITY_TEXT),
                || format!("{metric} {}: {status} {err}", cfg.kind.as_str()),
            )?;
            n += 1;
        }
        Ok(n)
    })
}

fn capability() -> Result<String, String> {
    let lib = capability_library()?;
    let cli = capability_cli()?;
    let http = capability_http()?;
    Ok(format!(
        "rejected: {lib} library calls, {cli} cli runs, {http} http requests"
    ))
}

fn suite(seed: u64) -> Result<Vec<Dataset>, String> {
    build_suite(
        &volume(),
        &SuiteConfig {
            seed,
            ..SuiteConfig::default()
        },
    )
    .map_err(|e| e.to_string())
}

fn self_consistency() -> Result<String, String> {
    let data = suite(0)?;
    let cfg = SweepConfig::default();
    let combos = cfg.combos().len();
    let plain = sweep(&data, &cfg, None).map_err(|e| e.to_string())?;
    ensure(plain.rows.len() == combos * 108, || {
        format!("{} rows for {combos} combos", plain.rows.len())
    })?;
    let reference = RedundancyConfig::area_line(10);
    let mut truth = GroundTruth::new();
    for r in plain.rows_for(MetricId::Nmi, &reference) {
        truth
            .insert(r.dataset, r.perturbation, r.score)
            .map_err(|e| e.to_string())?;
    }
    let result = sweep(&data, &cfg, Some(&truth)).map_err(|e| e.to_string())?;
    let own = result
        .agreement_for(MetricId::Nmi, &reference)
        .ok_or("missing nmi areaLine 10")?;
    ensure(
        (own.r2 - 1.0).abs() < 1e-12 && own.f1 == 1.0 && (own.seq_nmi - 1.0).abs() < 1e-12,
        || {
            format!(
                "own agreement r2 {} f1 {} nmi {}",
                own.r2, own.f1, own.seq_nmi
            )
        },
    )?;
    let lower = result
        .agreement
        .as_ref()
        .ok_or("no agreement")?
        .iter()
        .filter(|a| a.r2 < own.r2)
        .count();
    ensure(lower > 0, || "no other method has a smaller R2".into())?;
    Ok(format!(
        "{combos} combos x 108 rows; R2 = F1 = NMI = 1; {lower} combos with smaller R2"
    ))
}

fn directional() -> Result<String, String> {
    let data = suite(0)?;
    let truth = GroundTruth::by_magnitude(&data).map_err(|e| e.to_string())?;
    let cfg = SweepConfig {
        metrics: GROUP_METRICS.to_vec(),
        configs: default_configs(0),
        ..SweepConfig::default()
    };
    let result = sweep(&data, &cfg, Some(&truth)).map_err(|e| e.to_string())?;
    write_directional_tables(&result)?;
    let p = PerturbationId::OutlierMiddle.index();
    let mut cells = Vec::new();
    let mut failed = Vec::new();
    for metric in GROUP_METRICS {
        let r2 = |c: &RedundancyConfig| {
            result
                .agreement_for(metric, c)
                .map(|a| a.r2_by_perturbation[p])
                .ok_or_else(|| format!("missing {metric} {}", c.label()))
        };
        let (at0, at1) = (
            r2(&RedundancyConfig::none())?,
            r2(&RedundancyConfig::equidistant(1))?,
        );
        cells.push(format!("{metric} {at0:.4}->{at1:.4}"));
        if at1 < at0 {
            failed.push(metric.as_str());
        }
    }
    let summary = format!("outlier_middle R2 N=0->N=1: {}", cells.join(", "));
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; lower at N=1: {}", failed.join(", ")))
    }
}

fn write_directional_tables(result: &SweepResult) -> Result<(), String> {
    let dir = out_dir();
    let mut buf = Vec::new();
    result
        .write_perturbation_table(&mut buf)
        .map_err(|e| e.to_string())?;
    std::fs::write(dir.join("perturbation_r2.csv"), &buf).map_err(|e| e.to_string())?;
    let text = String::from_utf8(buf).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let mut outlier = String::new();
    outlier.push_str(lines.next().unwrap_or_default());
    outlier.push('\n');
    for l in lines.filter(|l| l.starts_with("outlier_middle,")) {
        outlier.push_str(l);
        outlier.push('\n');
    }
    std::fs::write(dir.join("outlier_middle_r2.csv"), outlier).map_err(|e| e.to_string())
}

fn determinism() -> Result<String, String> {
    let dir = out_dir();
    let data = fixture("volume.csv");
    let mut outputs = Vec::new();
    for name in ["eval_a.csv", "eval_b.csv"] {
        let path = dir.join(name);
        cli(&[
            "eval",
            "--data",
            data.to_str().unwrap(),
            "--seed",
            "0",
            "--out",
            path.to_str().unwrap(),
        ])
        .map_err(|e| e.to_string())?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(!outputs[0].is_empty() && outputs[0] == outputs[1], || {
        "eval outputs differ".into()
    })?;
    let lines = outputs[0].iter().filter(|&&b| b == b'\n').count();
    Ok(format!(
        "two runs, {} bytes, {lines} lines, identical",
        outputs[0].len()
    ))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut report = Report::default();
    report.run("metric axioms", secs(60), metric_axioms);
    report.run("information oracle", secs(10), info_oracle);
    report.run("redundancy principles", None, redundancy_principles);
    report.run("planted recovery", secs(120), planted_recovery);
    report.run("capability enforcement", None, capability);
    report.run("self-consistency", None, self_consistency);
    report.run("directional finding", None, directional);
    report.run("determinism", None, determinism);
    println!("{}", report.summary());
    println!("tables written to {}", out_dir().display());
    if report.failed() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
