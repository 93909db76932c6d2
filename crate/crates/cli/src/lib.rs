// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `patred` command line: pairwise metrics, pattern search, diagram
//! coordinates, perturbation, the evaluation sweep and the HTTP service.

#![forbid(unsafe_code)]

pub mod config;
pub mod error;
pub mod svg;

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use patred_core::data::{load_csv_columns, CsvColumns};
use patred_core::evalbench::{
    build_suite, default_configs, perturb, GroundTruth, PerturbOptions, PerturbationId, Statistic,
    SuiteConfig, SweepConfig, SweepResult,
};
use patred_core::metrics::check_capability;
use patred_core::{
    mid_points, normalize_minmax, search, to_pointset, Comparator, GridSize, MatchResult, MetricId,
    Mode, Normalization, Pattern, RedundancyConfig, RedundancyKind, SearchRequest, TimeSeries,
};
use serde::{Deserialize, Serialize};

use config::{parse_grid, parse_normalization, ConfigFile};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "patred",
    version,
    about = "Line-chart pattern search and metric evaluation"
)]
pub struct Cli {
    /// Seed for every random choice (cloud redundancy, dataset selection, perturbations).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with the same keys as the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distances between two series under every requested metric.
    Metrics(MetricsArgs),
    /// Slide a pattern over a series and report the closest windows.
    Search(SearchArgs),
    /// Diagram coordinates for a search result.
    Mid(MidArgs),
    /// Apply one perturbation to a normalized series and print it as CSV.
    Perturb(PerturbArgs),
    /// Run the perturbation sweep over every metric and redundancy setting.
    Eval(EvalArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Headed CSV series.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Value column; the last column when omitted.
    #[arg(long)]
    pub value_column: Option<String>,
    /// Column of point labels (dates).
    #[arg(long)]
    pub label_column: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RedundancyArgs {
    /// none, equidistant, areaLine, cloud or gaussCloud.
    #[arg(long)]
    pub redundancy: Option<RedundancyKind>,
    /// Points inserted per segment.
    #[arg(long)]
    pub n: Option<usize>,
    /// Area-line copies.
    #[arg(long)]
    pub copies: Option<usize>,
    /// Area-line vertical step.
    #[arg(long)]
    pub shift: Option<f64>,
    /// Cloud noise bound (standard deviation for gaussCloud).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Grid side, or `per-segment`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSize>,
    /// sequence or raster; the metric's canonical mode when omitted.
    #[arg(long)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SearchOptions {
    /// Pattern CSV: `x,y` columns, or a single value column.
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub metric: Option<MetricId>,
    #[command(flatten)]
    pub redundancy: RedundancyArgs,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    /// Window length; the pattern's point count when omitted.
    #[arg(long)]
    pub window: Option<usize>,
    /// Minimum start-index gap between matches; the window length when omitted.
    #[arg(long)]
    pub exclusion: Option<usize>,
    /// minMax or zScore.
    #[arg(long, value_parser = parse_normalization)]
    pub normalization: Option<Normalization>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// First series.
    #[arg(long, required_unless_present = "list")]
    pub x: Option<PathBuf>,
    /// Second series.
    #[arg(long, required_unless_present = "list")]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub value_column: Option<String>,
    /// Restrict to these metrics; all compatible metrics when omitted.
    #[arg(long = "metric")]
    pub metrics: Vec<MetricId>,
    #[command(flatten)]
    pub redundancy: RedundancyArgs,
    /// Print the capability matrix instead.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub options: SearchOptions,
    /// Also draw the pattern and its matches as an SVG strip.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MidArgs {
    /// A `search` output; the search flags are used when omitted.
    #[arg(long)]
    pub matches: Option<PathBuf>,
    #[command(flatten)]
    pub options: SearchOptions,
    /// Also draw the coordinates as an SVG scatter.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Perturbation id, e.g. shift2 or outlier_middle.
    #[arg(long)]
    pub which: PerturbationId,
    /// Multiplier on the uniform noise draws.
    #[arg(long)]
    pub noise_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Ground truth CSV (dataset_id, perturbation_id, mean_rank).
    #[arg(long, conflicts_with = "truth_by_magnitude")]
    pub truth: Option<PathBuf>,
    /// Use the synthetic truth that ranks perturbations by mean absolute change.
    #[arg(long)]
    pub truth_by_magnitude: bool,
    /// Write the ground truth that was used to this file.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
    /// Restrict to these metrics.
    #[arg(long = "metric")]
    pub metrics: Vec<MetricId>,
    /// Restrict to one redundancy kind.
    #[arg(long)]
    pub redundancy: Option<RedundancyKind>,
    /// Chart lengths of the dataset grid.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Vec<usize>,
    /// Charts drawn per length.
    #[arg(long)]
    pub selections: Option<usize>,
    #[arg(long)]
    pub noise_scale: Option<f64>,
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSize>,
    /// Directory for trajectory, per-perturbation and rank-agreement tables.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Directory for sparkline SVGs.
    #[arg(long)]
    pub figures: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// 0 picks a free port; the bound address is written to --out.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Persist datasets, patterns and results here.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Cap on windows times grid cells per search.
    #[arg(long)]
    pub max_work: Option<u64>,
    /// Allowed browser origin; any when omitted.
    #[arg(long)]
    pub cors_origin: Option<String>,
}

/// What `search` writes: the full request next to its matches.
#[derive(Debug, Serialize, Deserialize)]
pub struct SearchOutput {
    pub request: SearchRequest,
    pub matches: Vec<MatchResult>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MidOutput {
    pub points: Vec<patred_core::MidPoint>,
}

struct Context {
    seed: Option<u64>,
    out: Option<PathBuf>,
    config: ConfigFile,
}

impl Context {
    fn seed(&self) -> u64 {
        self.seed.or(self.config.seed).unwrap_or(0)
    }

    fn write(&self, bytes: &[u8]) -> Result<()> {
        match &self.out {
            Some(p) => write_file(p, bytes),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::io("<stdout>", e))
            }
        }
    }

    fn series(&self, args: &DataArgs) -> Result<TimeSeries> {
        let path = args
            .data
            .clone()
            .or_else(|| self.config.data.clone().map(PathBuf::from))
            .ok_or_else(|| CliError::Invalid("--data is required".into()))?;
        let value = args
            .value_column
            .as_deref()
            .or(self.config.value_column.as_deref());
        let label = args
            .label_column
            .as_deref()
            .or(self.config.label_column.as_deref());
        Ok(load_csv_columns(path, CsvColumns { value, label })?)
    }

    fn redundancy(&self, args: &RedundancyArgs) -> Result<RedundancyConfig> {
        let mut cfg = RedundancyConfig::default();
        if let Some(p) = &self.config.redundancy {
            p.apply(&mut cfg);
        }
        if let Some(k) = args.redundancy {
            cfg.kind = k;
        }
        if let Some(n) = args.n {
            cfg.n = n;
        }
        if let Some(c) = args.copies {
            cfg.copies = c;
        }
        if let Some(s) = args.shift {
            cfg.shift = s;
        }
        if let Some(e) = args.eta {
            cfg.eta = e;
        }
        if let Some(s) = self.seed.or(self.config.seed) {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn grid(&self, grid: Option<GridSize>) -> GridSize {
        grid.or(self.config.grid.map(GridSize::from))
            .unwrap_or_default()
    }

    fn request(&self, o: &SearchOptions) -> Result<SearchRequest> {
        let pattern_path = o
            .pattern
            .clone()
            .or_else(|| self.config.pattern.clone().map(PathBuf::from))
            .ok_or_else(|| CliError::Invalid("--pattern is required".into()))?;
        let pattern = load_pattern(&pattern_path)?;
        let series = self.series(&o.data)?;
        let metric = o
            .metric
            .or(self.config.metric)
            .ok_or_else(|| CliError::Invalid("--metric is required".into()))?;
        let c = &self.config;
        let mut req = SearchRequest::new(pattern, series, metric);
        req.mode = o.redundancy.mode.or(c.mode);
        req.redundancy = self.redundancy(&o.redundancy)?;
        req.grid = self.grid(o.redundancy.grid);
        if let Some(k) = o.top_k.or(c.top_k) {
            req.top_k = k;
        }
        if let Some(s) = o.stride.or(c.stride) {
            req.stride = s;
        }
        req.window = o.window.or(c.window);
        req.exclusion = o.exclusion.or(c.exclusion);
        if let Some(n) = o.normalization.or(c.normalization) {
            req.normalization = n;
        }
        req.comparator()?;
        req.validate()?;
        Ok(req)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// Reads `x,y` columns when the header has an `x` column, otherwise one value column.
pub fn load_pattern(path: &Path) -> Result<Pattern> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let header: Vec<String> = text
        .lines()
        .next()
        .unwrap_or_default()
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let has = |c: &str| header.iter().any(|h| h == c);
    if has("x") && header.len() >= 2 {
        let ys = if has("y") {
            "y"
        } else {
            header.iter().rfind(|h| *h != "x").expect("two columns")
        };
        let xs = load_csv_columns(
            path,
            CsvColumns {
                value: Some("x"),
                label: None,
            },
        )?;
        let ys = load_csv_columns(
            path,
            CsvColumns {
                value: Some(ys),
                label: None,
            },
        )?;
        let points = xs
            .values()
            .iter()
            .copied()
            .zip(ys.values().iter().copied())
            .collect();
        Ok(Pattern::from_unsorted(name, points)?.0)
    } else {
        let ys = load_csv_columns(path, CsvColumns::default())?;
        Ok(Pattern::from_values(name, ys.values())?)
    }
}

/// Parses `args` (program name first) and runs the command. Argument errors
/// come back as validation errors.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Invalid(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ctx = Context {
        seed: cli.seed,
        out: cli.out,
        config,
    };
    match cli.command {
        Command::Metrics(a) => run_metrics(&ctx, a),
        Command::Search(a) => run_search(&ctx, a),
        Command::Mid(a) => run_mid(&ctx, a),
        Command::Perturb(a) => run_perturb(&ctx, a),
        Command::Eval(a) => run_eval(&ctx, a),
        Command::Serve(a) => run_serve(&ctx, a),
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn run_metrics(ctx: &Context, a: MetricsArgs) -> Result<()> {
    if a.list {
        let mut s =
            String::from("metric,canonical_mode,sequence_only,group_based,supported_kinds\n");
        for m in MetricId::ALL {
            let kinds: Vec<&str> = RedundancyKind::ALL
                .into_iter()
                .filter(|&k| m.supports(k))
                .map(RedundancyKind::as_str)
                .collect();
            s += &csv_line(&[
                m.as_str().into(),
                m.canonical_mode().to_string(),
                m.sequence_only().to_string(),
                m.is_group_based().to_string(),
                kinds.join(" "),
            ]);
        }
        return ctx.write(s.as_bytes());
    }
    let load = |p: &Option<PathBuf>| -> Result<Vec<f64>> {
        let p = p.as_ref().expect("required by clap");
        let value = a
            .value_column
            .as_deref()
            .or(ctx.config.value_column.as_deref());
        Ok(load_csv_columns(p, CsvColumns { value, label: None })?.into_values())
    };
    let x = to_pointset(&load(&a.x)?)?;
    let y = to_pointset(&load(&a.y)?)?;
    let cfg = ctx.redundancy(&a.redundancy)?;
    let mode = a.redundancy.mode.or(ctx.config.mode);
    let b = ctx
        .grid(a.redundancy.grid)
        .resolve(x.origin_count().max(y.origin_count()));
    let explicit =
        !a.metrics.is_empty() || ctx.config.metrics.is_some() || ctx.config.metric.is_some();
    let metrics: Vec<MetricId> = if !a.metrics.is_empty() {
        a.metrics.clone()
    } else if let Some(m) = &ctx.config.metrics {
        m.clone()
    } else if let Some(m) = ctx.config.metric {
        vec![m]
    } else {
        MetricId::ALL.to_vec()
    };
    let mut s = String::from("metric,mode,kind,n,eta,distance\n");
    for m in metrics {
        let mode = mode.unwrap_or(m.canonical_mode());
        if let Err(e) = check_capability(m, mode, cfg.kind) {
            if explicit {
                return Err(e.into());
            }
            continue;
        }
        let cmp = Comparator::with_mode(m, mode, cfg, b)?;
        let d = cmp.compare_or_fallback(&cmp.prepare(&x)?, &cmp.prepare(&y)?)?;
        s += &csv_line(&[
            m.as_str().into(),
            d.mode.to_string(),
            cfg.kind.as_str().into(),
            cfg.n.to_string(),
            if matches!(cfg.kind, RedundancyKind::Cloud | RedundancyKind::GaussCloud) {
                cfg.eta.to_string()
            } else {
                String::new()
            },
            d.value.to_string(),
        ]);
    }
    ctx.write(s.as_bytes())
}

fn run_search(ctx: &Context, a: SearchArgs) -> Result<()> {
    let request = ctx.request(&a.options)?;
    let matches = search(&request)?;
    if let Some(p) = &a.svg {
        let pattern = request.pattern.resampled_values(request.window_len());
        write_file(p, svg::match_strip(&pattern, &matches).as_bytes())?;
    }
    ctx.write(&to_json(&SearchOutput { request, matches })?)
}

fn run_mid(ctx: &Context, a: MidArgs) -> Result<()> {
    let out = match &a.matches {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            let out: SearchOutput = serde_json::from_str(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            out.request.validate()?;
            out
        }
        None => {
            let request = ctx.request(&a.options)?;
            let matches = search(&request)?;
            SearchOutput { request, matches }
        }
    };
    let points = mid_points(&out.request, &out.matches)?;
    if let Some(p) = &a.svg {
        write_file(p, svg::mid_scatter(&points).as_bytes())?;
    }
    ctx.write(&to_json(&MidOutput { points })?)
}

fn run_perturb(ctx: &Context, a: PerturbArgs) -> Result<()> {
    let series = ctx.series(&a.data)?;
    let normalized = TimeSeries::with_labels(
        normalize_minmax(series.values())?,
        series.labels().map(<[String]>::to_vec),
    )?;
    let opts = PerturbOptions {
        noise_scale: a
            .noise_scale
            .or(ctx.config.noise_scale)
            .unwrap_or(PerturbOptions::default().noise_scale),
    };
    let out = perturb(&normalized, a.which, ctx.seed(), opts)?;
    let mut s = String::new();
    match out.labels() {
        Some(labels) => {
            s += "label,value\n";
            for (l, v) in labels.iter().zip(out.values()) {
                s += &format!("{l},{v}\n");
            }
        }
        None => {
            s += "index,value\n";
            for (i, v) in out.values().iter().enumerate() {
                s += &format!("{i},{v}\n");
            }
        }
    }
    ctx.write(s.as_bytes())
}

fn run_eval(ctx: &Context, a: EvalArgs) -> Result<()> {
    let series = ctx.series(&a.data)?;
    let c = &ctx.config;
    let mut suite = SuiteConfig {
        seed: ctx.seed(),
        ..SuiteConfig::default()
    };
    if !a.lengths.is_empty() {
        suite.lengths = a.lengths.clone();
    } else if let Some(l) = &c.lengths {
        suite.lengths = l.clone();
    }
    if let Some(s) = a.selections.or(c.selections) {
        suite.selections = s;
    }
    if let Some(n) = a.noise_scale.or(c.noise_scale) {
        suite.perturb.noise_scale = n;
    }
    let datasets = build_suite(&series, &suite)?;

    let mut sweep_cfg = SweepConfig {
        configs: default_configs(ctx.seed()),
        grid: ctx.grid(a.grid),
        ..SweepConfig::default()
    };
    if !a.metrics.is_empty() {
        sweep_cfg.metrics = a.metrics.clone();
    } else if let Some(m) = &c.metrics {
        sweep_cfg.metrics = m.clone();
    }
    if let Some(k) = a.redundancy.or(c.redundancy.as_ref().and_then(|r| r.kind)) {
        sweep_cfg.configs.retain(|cfg| cfg.kind == k);
    }

    let truth_path = a
        .truth
        .clone()
        .or_else(|| c.truth.clone().map(PathBuf::from));
    let truth = match (&truth_path, a.truth_by_magnitude) {
        (Some(p), _) => Some(GroundTruth::load(p)?),
        (None, true) => Some(GroundTruth::by_magnitude(&datasets)?),
        (None, false) => None,
    };
    if a.figures.is_some() && truth.is_none() {
        return Err(CliError::Invalid(
            "--figures needs --truth or --truth-by-magnitude".into(),
        ));
    }
    if let (Some(t), Some(p)) = (&truth, &a.truth_out) {
        let mut buf = Vec::new();
        t.write_csv(&mut buf)?;
        write_file(p, &buf)?;
    }

    let result = patred_core::evalbench::sweep(&datasets, &sweep_cfg, truth.as_ref())?;
    let mut buf = Vec::new();
    result.write_rows_csv(&mut buf)?;
    ctx.write(&buf)?;

    if let Some(dir) = &a.tables {
        write_tables(dir, &result, &sweep_cfg)?;
    }
    if let Some(dir) = &a.figures {
        write_figures(dir, &result)?;
    }
    Ok(())
}

fn write_tables(dir: &Path, result: &SweepResult, cfg: &SweepConfig) -> Result<()> {
    if result.agreement.is_some() {
        for stat in Statistic::ALL {
            let mut buf = Vec::new();
            result.write_trajectory_table(stat, &mut buf)?;
            write_file(&dir.join(format!("{stat}.csv")), &buf)?;
        }
        let mut buf = Vec::new();
        result.write_perturbation_table(&mut buf)?;
        write_file(&dir.join("perturbation_r2.csv"), &buf)?;
    }
    let (a, b) = (MetricId::Manhattan, MetricId::Euclidean);
    if cfg.metrics.contains(&a) && cfg.metrics.contains(&b) {
        let mut s = String::from("kind,n,eta,rank_correlation\n");
        for (c, r) in result.rank_agreement(a, b)? {
            s += &csv_line(&[
                c.kind.as_str().into(),
                c.n.to_string(),
                String::new(),
                r.to_string(),
            ]);
        }
        write_file(
            &dir.join("rank_agreement_manhattan_euclidean.csv"),
            s.as_bytes(),
        )?;
    }
    Ok(())
}

fn write_figures(dir: &Path, result: &SweepResult) -> Result<()> {
    for stat in Statistic::ALL {
        let rows = result.trajectories(|a| stat.of(a));
        let svg = svg::sparkline_table(&format!("{stat} by points per segment"), &rows, 0.0, 1.0);
        write_file(&dir.join(format!("{stat}.svg")), svg.as_bytes())?;
    }
    for p in PerturbationId::ALL {
        let rows = result.trajectories(|a| a.r2_by_perturbation[p.index()]);
        let svg = svg::sparkline_table(&format!("r2 for {p}"), &rows, 0.0, 1.0);
        write_file(&dir.join(format!("r2_{p}.svg")), svg.as_bytes())?;
    }
    Ok(())
}

fn run_serve(ctx: &Context, a: ServeArgs) -> Result<()> {
    let config = patred_service::ServiceConfig {
        max_work: a.max_work.unwrap_or(patred_service::DEFAULT_MAX_WORK),
        data_dir: a.data_dir,
        cors_origin: a.cors_origin,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(e.to_string()))?;
    runtime.block_on(async {
        let addr = SocketAddr::new(a.host, a.port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::io(addr.to_string(), e))?;
        let bound = listener
            .local_addr()
            .map_err(|e| CliError::io(addr.to_string(), e))?;
        match &ctx.out {
            Some(p) => write_file(p, format!("{bound}\n").as_bytes())?,
            None => eprintln!("listening on http://{bound}"),
        }
        patred_service::serve_on(listener, config)
            .await
            .map_err(|e| CliError::Runtime(e.to_string()))
    })
}
