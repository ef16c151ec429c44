//! Read-only HTTP API over a loaded readiness dataset.
//!
//! Endpoints:
//!
//! - `GET /ranking?scheme=&gamma=&neighbors=&metric=` ranks every country.
//! - `GET /countries/{name}` shows one country's indicators and score
//!   components, using the same query parameters.
//! - `GET /health` reports whether a dataset is loaded and when.
//!
//! The dataset lives in an immutable [`DatasetSnapshot`] behind an `Arc`.
//! Handlers clone the `Arc` and work on that, so a reload swaps the whole
//! snapshot and in-flight requests keep the one they started with.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use bri_core::index::{Entity, IndexError, Metric, RankParams, ScoredCountry};
use bri_core::ingest::{default_schema, normalize, parse_data, parse_schema, IngestError, RawDataset, Schema};
use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;

const MEMO_CAPACITY: usize = 256;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error("no data source configured")]
    NoSource,
}

/// Normalized dataset plus schema, fixed at load time.
#[derive(Debug)]
pub struct DatasetSnapshot {
    pub schema: Schema,
    pub raw: RawDataset,
    pub entities: Vec<Entity>,
    pub loaded_at: DateTime<Utc>,
}

impl DatasetSnapshot {
    pub fn new(raw: RawDataset) -> Self {
        let entities = normalize(&raw);
        Self {
            schema: raw.schema.clone(),
            raw,
            entities,
            loaded_at: Utc::now(),
        }
    }

    pub fn load(source: &DataSource) -> Result<Self, ServiceError> {
        let read = |path: &Path| {
            std::fs::read(path).map_err(|source| ServiceError::Io {
                path: path.to_path_buf(),
                source,
            })
        };
        let schema = match &source.schema {
            Some(path) => parse_schema(&read(path)?).map_err(|source| ServiceError::Ingest {
                path: path.clone(),
                source,
            })?,
            None => default_schema(),
        };
        let raw = parse_data(&read(&source.data)?, &schema).map_err(|e| ServiceError::Ingest {
            path: source.data.clone(),
            source: e,
        })?;
        Ok(Self::new(raw))
    }
}

/// Files a snapshot is (re)loaded from; without a schema the built-in one is used.
#[derive(Debug, Clone)]
pub struct DataSource {
    pub data: PathBuf,
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct MemoKey {
    generation: u64,
    scheme: &'static str,
    gamma: u64,
    neighbors: usize,
    metric: Metric,
}

#[derive(Debug, Default)]
struct Current {
    snapshot: Option<Arc<DatasetSnapshot>>,
    generation: u64,
}

/// Shared handler state. Cheap to clone.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    current: Arc<RwLock<Current>>,
    memo: Arc<Mutex<HashMap<MemoKey, Arc<Vec<ScoredCountry>>>>>,
    source: Option<DataSource>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_source(source: DataSource) -> Self {
        Self {
            source: Some(source),
            ..Self::default()
        }
    }

    pub fn snapshot(&self) -> Option<(Arc<DatasetSnapshot>, u64)> {
        let current = self.current.read().expect("snapshot lock poisoned");
        current.snapshot.clone().map(|s| (s, current.generation))
    }

    /// Replaces the served dataset in one step.
    pub fn install(&self, snapshot: DatasetSnapshot) {
        let mut current = self.current.write().expect("snapshot lock poisoned");
        current.snapshot = Some(Arc::new(snapshot));
        current.generation += 1;
        drop(current);
        self.memo.lock().expect("memo lock poisoned").clear();
    }

    /// Re-reads the configured files. On error the old snapshot stays.
    pub fn reload(&self) -> Result<(), ServiceError> {
        let source = self.source.as_ref().ok_or(ServiceError::NoSource)?;
        self.install(DatasetSnapshot::load(source)?);
        Ok(())
    }

    fn ranking(
        &self,
        snapshot: &DatasetSnapshot,
        generation: u64,
        params: &RankParams,
    ) -> Result<Arc<Vec<ScoredCountry>>, IndexError> {
        let key = MemoKey {
            generation,
            scheme: params.scheme,
            gamma: params.gamma.to_bits(),
            neighbors: params.neighbors,
            metric: params.metric,
        };
        if let Some(hit) = self.memo.lock().expect("memo lock poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let scored = Arc::new(params.rank(&snapshot.entities)?.scored);
        let mut memo = self.memo.lock().expect("memo lock poisoned");
        if memo.len() >= MEMO_CAPACITY {
            memo.clear();
        }
        memo.insert(key, scored.clone());
        Ok(scored)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

impl From<IndexError> for ApiError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::InvalidParameter(_) => ApiError::bad_request(e.to_string()),
            IndexError::EmptyDataset => Self {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                message: e.to_string(),
            },
            other => Self {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                message: other.to_string(),
            },
        }
    }
}

/// Same domains and defaults as the CLI flags.
pub fn parse_params(query: &HashMap<String, String>) -> Result<RankParams, ApiError> {
    if let Some(unknown) = query
        .keys()
        .find(|k| !matches!(k.as_str(), "scheme" | "gamma" | "neighbors" | "metric"))
    {
        return Err(ApiError::bad_request(format!("unknown parameter '{unknown}'")));
    }
    let defaults = RankParams::default();
    let scheme = query.get("scheme").map_or(defaults.scheme, String::as_str);
    let gamma = match query.get("gamma") {
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| ApiError::bad_request(format!("gamma: not a number: '{v}'")))?,
        None => defaults.gamma,
    };
    let neighbors = match query.get("neighbors") {
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| ApiError::bad_request(format!("neighbors: not a non-negative integer: '{v}'")))?,
        None => defaults.neighbors,
    };
    let metric = match query.get("metric") {
        Some(v) => v.parse::<Metric>()?,
        None => defaults.metric,
    };
    Ok(RankParams::new(scheme, gamma, neighbors, metric)?)
}

fn loaded(state: &AppState) -> Result<(Arc<DatasetSnapshot>, u64), ApiError> {
    state.snapshot().ok_or(ApiError {
        status: StatusCode::SERVICE_UNAVAILABLE,
        message: "no dataset loaded".into(),
    })
}

#[derive(Debug, Serialize)]
pub struct RankingResponse<'a> {
    pub config: RankParams,
    pub ranking: &'a [ScoredCountry],
}

async fn ranking(
    State(state): State<AppState>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let params = parse_params(&query)?;
    let (snapshot, generation) = loaded(&state)?;
    let scored = state.ranking(&snapshot, generation, &params)?;
    Ok(Json(RankingResponse {
        config: params,
        ranking: &scored,
    })
    .into_response())
}

#[derive(Debug, Serialize)]
struct IndicatorDetail<'a> {
    id: &'a str,
    pillar: String,
    raw: Option<f64>,
    /// Normalized value, `null` when missing.
    value: Option<f64>,
    /// Value used for scoring, after imputation.
    imputed: f64,
    present: bool,
}

#[derive(Debug, Serialize)]
struct CountryDetail<'a> {
    config: RankParams,
    #[serde(flatten)]
    scored: &'a ScoredCountry,
    indicators: Vec<IndicatorDetail<'a>>,
}

async fn country(
    State(state): State<AppState>,
    UrlPath(name): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let params = parse_params(&query)?;
    let (snapshot, _) = loaded(&state)?;
    let Some(row) = snapshot.raw.rows.iter().position(|r| r.name == name) else {
        return Err(ApiError {
            status: StatusCode::NOT_FOUND,
            message: format!("unknown country '{name}'"),
        });
    };
    let ranking = params.rank(&snapshot.entities)?;
    let scored = ranking
        .scored
        .iter()
        .find(|s| s.name == name)
        .expect("every row is ranked");
    let imputed = &ranking.imputed[row].values;
    let indicators = snapshot
        .schema
        .defs()
        .iter()
        .enumerate()
        .map(|(k, def)| {
            let value = snapshot.entities[row].values.get(k);
            IndicatorDetail {
                id: &def.id,
                pillar: def.pillar.to_string(),
                raw: snapshot.raw.rows[row].values[k],
                value,
                imputed: imputed[k],
                present: value.is_some(),
            }
        })
        .collect();
    Ok(Json(CountryDetail {
        config: params,
        scored,
        indicators,
    })
    .into_response())
}

#[derive(Debug, Serialize)]
struct Health {
    loaded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    generation: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loaded_at: Option<DateTime<Utc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    countries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    indicators: Option<usize>,
}

async fn health(State(state): State<AppState>) -> Json<Health> {
    Json(match state.snapshot() {
        Some((s, generation)) => Health {
            loaded: true,
            generation: Some(generation),
            loaded_at: Some(s.loaded_at),
            countries: Some(s.entities.len()),
            indicators: Some(s.schema.len()),
        },
        None => Health {
            loaded: false,
            generation: None,
            loaded_at: None,
            countries: None,
            indicators: None,
        },
    })
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/ranking", get(ranking))
        .route("/countries/{name}", get(country))
        .route("/health", get(health))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
