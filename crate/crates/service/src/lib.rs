// SPDX-License-Identifier: MIT OR Apache-2.0

//! JSON-over-HTTP facade: upload series, register sketched patterns, run
//! searches and fetch Mutual Information Diagram coordinates.

#![forbid(unsafe_code)]

mod error;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use patred_core::data::{read_csv, CsvColumns};
use patred_core::redundancy::{SWEEP_ETA, SWEEP_N};
use patred_core::{
    mid_points, search, GridSize, MatchResult, MetricId, MidPoint, Mode, Normalization, Pattern,
    RedundancyConfig, RedundancyKind, SearchRequest,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tower_http::cors::{Any, CorsLayer};

pub use error::ApiError;
pub use store::{Store, StoredResult};

/// Default cap on windows × grid cells for a single search.
pub const DEFAULT_MAX_WORK: u64 = 10_000_000;

const PREVIEW_LEN: usize = 10;
const BODY_LIMIT: usize = 64 * 1024 * 1024;
const OPENAPI: &str = include_str!("../../../docs/openapi.json");

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub max_work: u64,
    pub data_dir: Option<PathBuf>,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_work: DEFAULT_MAX_WORK,
            data_dir: None,
            cors_origin: None,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
    max_work: u64,
}

impl AppState {
    pub fn new(config: &ServiceConfig) -> std::io::Result<Self> {
        let store = match &config.data_dir {
            Some(dir) => Store::open(dir)?,
            None => Store::in_memory(),
        };
        Ok(Self {
            store: Arc::new(store),
            max_work: config.max_work,
        })
    }
}

#[derive(Debug, Deserialize)]
pub struct DatasetQuery {
    pub value_column: Option<String>,
    pub label_column: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetCreated {
    pub id: String,
    pub length: usize,
    pub preview: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetView {
    pub id: String,
    pub length: usize,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternBody {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PatternCreated {
    pub id: String,
    pub name: String,
    pub length: usize,
    pub reordered: bool,
    /// The normalized points that searches will use.
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBody {
    pub pattern_id: String,
    pub dataset_id: String,
    pub metric: MetricId,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub redundancy: RedundancyConfig,
    #[serde(default)]
    pub grid: Option<GridSize>,
    #[serde(default)]
    pub top_k: Option<usize>,
    #[serde(default)]
    pub stride: Option<usize>,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub exclusion: Option<usize>,
    #[serde(default)]
    pub normalization: Option<Normalization>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SearchResponse {
    pub result_id: String,
    pub pattern_id: String,
    pub dataset_id: String,
    pub metric: MetricId,
    pub mode: Mode,
    pub redundancy: RedundancyConfig,
    pub grid_side: usize,
    pub window: usize,
    pub matches: Vec<MatchResult>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MidResponse {
    pub result_id: String,
    pub points: Vec<MidPoint>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricInfo {
    pub name: MetricId,
    pub canonical_mode: Mode,
    pub sequence_only: bool,
    pub group_based: bool,
    pub supported_kinds: Vec<RedundancyKind>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Meta {
    pub metrics: Vec<MetricInfo>,
    pub redundancy_kinds: Vec<RedundancyKind>,
    pub sweep_n: Vec<usize>,
    pub sweep_eta: Vec<f64>,
    pub default_redundancy: RedundancyConfig,
    pub max_work: u64,
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::BadRequest(format!("invalid JSON body: {e}")))
}

fn io_error(e: std::io::Error) -> ApiError {
    ApiError::Internal(format!("store: {e}"))
}

async fn create_dataset(
    State(state): State<AppState>,
    Query(q): Query<DatasetQuery>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::BadRequest("empty CSV body".into()));
    }
    let series = read_csv(
        body.as_ref(),
        CsvColumns {
            value: q.value_column.as_deref(),
            label: q.label_column.as_deref(),
        },
    )?;
    let length = series.len();
    let preview = series.values().iter().take(PREVIEW_LEN).copied().collect();
    let id = state.store.insert_dataset(series).map_err(io_error)?;
    Ok((
        StatusCode::CREATED,
        Json(DatasetCreated {
            id,
            length,
            preview,
        }),
    ))
}

async fn get_dataset(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<DatasetView>, ApiError> {
    let series = state
        .store
        .dataset(&id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown dataset `{id}`")))?;
    Ok(Json(DatasetView {
        id,
        length: series.len(),
        values: series.values().to_vec(),
        labels: series.labels().map(<[String]>::to_vec),
    }))
}

async fn create_pattern(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let body: PatternBody = parse_json(&body)?;
    let name = body.name.unwrap_or_else(|| "sketch".to_owned());
    let points = body.points.iter().map(|p| (p[0], p[1])).collect();
    let (pattern, reordered) = Pattern::from_unsorted(name, points)?;
    let view = PatternCreated {
        id: String::new(),
        name: pattern.name.clone(),
        length: pattern.len(),
        reordered,
        points: pattern.points().iter().map(|&(x, y)| [x, y]).collect(),
    };
    let id = state.store.insert_pattern(pattern).map_err(io_error)?;
    Ok((StatusCode::CREATED, Json(PatternCreated { id, ..view })))
}

fn result_id(pattern_id: &str, dataset_id: &str, req: &SearchRequest) -> Result<String, ApiError> {
    let payload = serde_json::to_vec(&(pattern_id, dataset_id, req))
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let digest = Sha256::digest(&payload);
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    Ok(format!("res-{hex}"))
}

async fn run_search(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Json<SearchResponse>, ApiError> {
    let body: SearchBody = parse_json(&body)?;
    let pattern = state
        .store
        .pattern(&body.pattern_id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown pattern `{}`", body.pattern_id)))?;
    let series = state
        .store
        .dataset(&body.dataset_id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown dataset `{}`", body.dataset_id)))?;

    let mut req = SearchRequest::new(pattern, series, body.metric);
    req.mode = body.mode;
    req.redundancy = body.redundancy;
    if let Some(g) = body.grid {
        req.grid = g;
    }
    if let Some(k) = body.top_k {
        req.top_k = k;
    }
    if let Some(s) = body.stride {
        req.stride = s;
    }
    if let Some(n) = body.normalization {
        req.normalization = n;
    }
    req.window = body.window;
    req.exclusion = body.exclusion;

    let cmp = req.comparator()?;
    req.validate()?;
    let work = req.work_estimate();
    if work > state.max_work {
        return Err(ApiError::TooLarge(format!(
            "search needs {work} window-cells, above the limit of {}",
            state.max_work
        )));
    }

    let id = result_id(&body.pattern_id, &body.dataset_id, &req)?;
    let (req, matches) = tokio::task::spawn_blocking(move || {
        let matches = search(&req);
        (req, matches)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?;
    let matches = matches?;

    let response = SearchResponse {
        result_id: id.clone(),
        pattern_id: body.pattern_id.clone(),
        dataset_id: body.dataset_id.clone(),
        metric: cmp.metric,
        mode: cmp.mode,
        redundancy: req.redundancy,
        grid_side: cmp.b,
        window: req.window_len(),
        matches: matches.clone(),
    };
    state
        .store
        .insert_result(
            &id,
            StoredResult {
                pattern_id: body.pattern_id,
                dataset_id: body.dataset_id,
                request: req,
                matches,
            },
        )
        .map_err(io_error)?;
    Ok(Json(response))
}

async fn get_mid(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<MidResponse>, ApiError> {
    let stored = state
        .store
        .result(&id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown result `{id}`")))?;
    let points = tokio::task::spawn_blocking(move || mid_points(&stored.request, &stored.matches))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(MidResponse {
        result_id: id,
        points,
    }))
}

async fn meta(State(state): State<AppState>) -> Json<Meta> {
    Json(Meta {
        metrics: MetricId::ALL
            .into_iter()
            .map(|m| MetricInfo {
                name: m,
                canonical_mode: m.canonical_mode(),
                sequence_only: m.sequence_only(),
                group_based: m.is_group_based(),
                supported_kinds: RedundancyKind::ALL
                    .into_iter()
                    .filter(|&k| m.supports(k))
                    .collect(),
            })
            .collect(),
        redundancy_kinds: RedundancyKind::ALL.to_vec(),
        sweep_n: SWEEP_N.to_vec(),
        sweep_eta: SWEEP_ETA.to_vec(),
        default_redundancy: RedundancyConfig::default(),
        max_work: state.max_work,
    })
}

async fn openapi() -> impl IntoResponse {
    ([("content-type", "application/json")], OPENAPI)
}

async fn health() -> &'static str {
    "ok"
}

fn cors(origin: Option<&str>) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    match origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => layer.allow_origin(o),
        None => layer.allow_origin(Any),
    }
}

pub fn router(state: AppState, config: &ServiceConfig) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/meta", get(meta))
        .route("/openapi.json", get(openapi))
        .route("/datasets", post(create_dataset))
        .route("/datasets/{id}", get(get_dataset))
        .route("/patterns", post(create_pattern))
        .route("/search", post(run_search))
        .route("/results/{id}/mid", get(get_mid))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .layer(cors(config.cors_origin.as_deref()))
        .with_state(state)
}

pub fn app(config: &ServiceConfig) -> std::io::Result<Router> {
    Ok(router(AppState::new(config)?, config))
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    serve_on(tokio::net::TcpListener::bind(addr).await?, config).await
}

/// Like [`serve`], on a listener the caller has already bound.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    config: ServiceConfig,
) -> std::io::Result<()> {
    let app = app(&config)?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
