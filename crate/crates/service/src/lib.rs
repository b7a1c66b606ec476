//! HTTP JSON API over the insight engine, with file-backed bookmarks.
//!
//! Uploaded CSVs are stored under `<data_dir>/datasets/` and re-analyzed at
//! startup; bookmarks live in `<data_dir>/bookmarks.jsonl`.

mod store;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Path as UrlPath, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use insightrank_core::dataset::ColumnSchema;
use insightrank_core::engine::CombinationView;
use insightrank_core::{analyze, load_csv_reader, Analysis, Config, EngineError, IngestConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use store::{Bookmark, BookmarkStore};

pub const PORT_ENV: &str = "INSIGHTRANK_PORT";
pub const DATA_DIR_ENV: &str = "INSIGHTRANK_DATA_DIR";
pub const CONFIG_ENV: &str = "INSIGHTRANK_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("cannot use data directory: {0}")]
    Io(#[from] std::io::Error),
    #[error("stored dataset {id}: {detail}")]
    StoredDataset { id: String, detail: String },
    #[error(transparent)]
    Config(#[from] insightrank_core::ConfigError),
    #[error("invalid {var}: {detail}")]
    Env { var: &'static str, detail: String },
}

/// Deployment settings.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub port: u16,
    pub data_dir: PathBuf,
    pub engine: Config,
}

impl ServiceConfig {
    /// Reads `INSIGHTRANK_PORT` (default 8080), `INSIGHTRANK_DATA_DIR`
    /// (default `./data`) and an optional `INSIGHTRANK_CONFIG` JSON path.
    pub fn from_env() -> Result<Self, ServiceError> {
        let port = match std::env::var(PORT_ENV) {
            Ok(p) => p.parse().map_err(|e: std::num::ParseIntError| ServiceError::Env {
                var: PORT_ENV,
                detail: e.to_string(),
            })?,
            Err(_) => 8080,
        };
        let data_dir = std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("data"), PathBuf::from);
        let engine = match std::env::var_os(CONFIG_ENV) {
            Some(p) => Config::from_path(p)?,
            None => Config::default(),
        };
        Ok(Self { port, data_dir, engine })
    }
}

struct DatasetEntry {
    id: String,
    name: String,
    created_at: String,
    analysis: Analysis,
}

#[derive(Serialize, Deserialize)]
struct DatasetMeta {
    name: String,
    created_at: String,
}

struct Inner {
    data_dir: PathBuf,
    config: Config,
    datasets: RwLock<HashMap<String, Arc<DatasetEntry>>>,
    bookmarks: Mutex<BookmarkStore>,
}

/// Shared application state; cheap to clone.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

fn datasets_dir(data_dir: &Path) -> PathBuf {
    data_dir.join("datasets")
}

fn load_and_analyze(bytes: &[u8], name: &str, config: &Config) -> Result<Analysis, String> {
    let ds = load_csv_reader(bytes, name, &IngestConfig::from(config)).map_err(|e| e.to_string())?;
    analyze(&ds, config).map_err(|e| e.to_string())
}

impl AppState {
    /// Opens (creating if needed) the data directory, re-analyzes every
    /// stored dataset and replays the bookmark journal.
    pub fn open(data_dir: impl Into<PathBuf>, config: Config) -> Result<Self, ServiceError> {
        config.validate()?;
        let data_dir = data_dir.into();
        let dir = datasets_dir(&data_dir);
        std::fs::create_dir_all(&dir)?;
        let mut datasets = HashMap::new();
        let mut metas: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        metas.sort();
        for meta_path in metas {
            let id = meta_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let stored = |detail: String| ServiceError::StoredDataset { id: id.clone(), detail };
            let meta: DatasetMeta =
                serde_json::from_slice(&std::fs::read(&meta_path)?).map_err(|e| stored(e.to_string()))?;
            let bytes = std::fs::read(dir.join(format!("{id}.csv")))?;
            let analysis = load_and_analyze(&bytes, &meta.name, &config).map_err(stored)?;
            tracing::info!(dataset = %id, name = %meta.name, "reloaded dataset");
            datasets.insert(
                id.clone(),
                Arc::new(DatasetEntry {
                    id,
                    name: meta.name,
                    created_at: meta.created_at,
                    analysis,
                }),
            );
        }
        let bookmarks = BookmarkStore::open(data_dir.join("bookmarks.jsonl"))?;
        Ok(Self(Arc::new(Inner {
            data_dir,
            config,
            datasets: RwLock::new(datasets),
            bookmarks: Mutex::new(bookmarks),
        })))
    }

    fn dataset(&self, id: &str) -> Result<Arc<DatasetEntry>, ApiError> {
        self.0
            .datasets
            .read()
            .expect("dataset map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "dataset not found", id))
    }
}

/// Error response body `{error, detail}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    error: String,
    detail: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, detail: impl Into<String>) -> Self {
        Self {
            status,
            error: error.to_string(),
            detail: detail.into(),
        }
    }

    fn internal(detail: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal error", detail.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.error, "detail": self.detail}))).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({"status": "ok"})) }))
        .route("/datasets", post(upload).get(list_datasets))
        .route("/datasets/{id}", get(get_dataset))
        .route("/datasets/{id}/recommendations", get(recommendations))
        .route("/bookmarks", post(create_bookmark).get(list_bookmarks))
        .route("/bookmarks/{id}", delete(delete_bookmark))
        .with_state(state)
}

#[derive(Serialize)]
struct DatasetInfo {
    dataset_id: String,
    name: String,
    created_at: String,
    rows: usize,
    schema: Vec<ColumnSchema>,
    candidate_pool_size: usize,
    skipped_candidates: usize,
}

impl From<&DatasetEntry> for DatasetInfo {
    fn from(e: &DatasetEntry) -> Self {
        let ds = e.analysis.dataset();
        Self {
            dataset_id: e.id.clone(),
            name: e.name.clone(),
            created_at: e.created_at.clone(),
            rows: ds.row_count(),
            schema: ds.schema(),
            candidate_pool_size: e.analysis.pool_size(),
            skipped_candidates: e.analysis.skipped().len(),
        }
    }
}

#[derive(Deserialize)]
struct UploadQuery {
    name: Option<String>,
}

fn bad_request(detail: impl Into<String>) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, "invalid upload", detail)
}

/// Reads the CSV from the `file` field of a multipart form, or from the raw
/// body otherwise.
async fn read_upload(state: &AppState, req: Request) -> Result<(Bytes, Option<String>), ApiError> {
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    if !is_multipart {
        let body = Bytes::from_request(req, state)
            .await
            .map_err(|e| bad_request(e.body_text()))?;
        return Ok((body, None));
    }
    let mut form = Multipart::from_request(req, state)
        .await
        .map_err(|e| bad_request(e.body_text()))?;
    while let Some(field) = form.next_field().await.map_err(|e| bad_request(e.body_text()))? {
        if field.name() == Some("file") {
            let filename = field.file_name().map(|f| {
                Path::new(f)
                    .file_stem()
                    .map_or_else(|| f.to_string(), |s| s.to_string_lossy().into_owned())
            });
            let bytes = field.bytes().await.map_err(|e| bad_request(e.body_text()))?;
            return Ok((bytes, filename));
        }
    }
    Err(bad_request("multipart form has no `file` field"))
}

async fn upload(
    State(state): State<AppState>,
    Query(q): Query<UploadQuery>,
    req: Request,
) -> Result<(StatusCode, Json<DatasetInfo>), ApiError> {
    let (bytes, filename) = read_upload(&state, req).await?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(bad_request("empty file"));
    }
    let name = q.name.or(filename).unwrap_or_else(|| "dataset".to_string());
    let config = state.0.config.clone();
    let analysis = {
        let (bytes, name) = (bytes.clone(), name.clone());
        tokio::task::spawn_blocking(move || load_and_analyze(&bytes, &name, &config))
            .await
            .map_err(ApiError::internal)?
            .map_err(bad_request)?
    };
    let id = uuid::Uuid::new_v4().simple().to_string();
    let created_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let dir = datasets_dir(&state.0.data_dir);
    let meta = DatasetMeta {
        name: name.clone(),
        created_at: created_at.clone(),
    };
    // CSV first: a meta file without its CSV would fail the next startup
    std::fs::write(dir.join(format!("{id}.csv")), &bytes).map_err(ApiError::internal)?;
    std::fs::write(
        dir.join(format!("{id}.json")),
        serde_json::to_vec(&meta).map_err(ApiError::internal)?,
    )
    .map_err(ApiError::internal)?;
    let entry = Arc::new(DatasetEntry {
        id: id.clone(),
        name,
        created_at,
        analysis,
    });
    let info = DatasetInfo::from(entry.as_ref());
    state.0.datasets.write().expect("dataset map lock").insert(id, entry);
    Ok((StatusCode::OK, Json(info)))
}

async fn list_datasets(State(state): State<AppState>) -> Json<Vec<DatasetInfo>> {
    let map = state.0.datasets.read().expect("dataset map lock");
    let mut v: Vec<DatasetInfo> = map.values().map(|e| DatasetInfo::from(e.as_ref())).collect();
    v.sort_by(|a, b| (&a.created_at, &a.dataset_id).cmp(&(&b.created_at, &b.dataset_id)));
    Json(v)
}

async fn get_dataset(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<DatasetInfo>, ApiError> {
    Ok(Json(DatasetInfo::from(state.dataset(&id)?.as_ref())))
}

fn parse_count(q: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize, ApiError> {
    match q.get(key) {
        None => Ok(default),
        Some(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "invalid query parameter",
                format!("{key} must be a positive integer, got `{v}`"),
            )
        }),
    }
}

async fn recommendations(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> Result<Response, ApiError> {
    let entry = state.dataset(&id)?;
    let config = entry.analysis.config();
    let top_r = parse_count(&q, "top_r", config.top_r)?;
    let top_k = parse_count(&q, "top_k", config.top_k)?;
    let filter: Vec<String> = q
        .get("attributes")
        .map(|a| {
            a.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect()
        })
        .unwrap_or_default();
    match entry.analysis.recommendations(&filter, top_r, top_k) {
        Ok(rec) => Ok(Json(rec).into_response()),
        Err(EngineError::UnknownAttribute(a)) => {
            Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unknown attribute", a))
        }
        Err(e) => Err(ApiError::internal(e)),
    }
}

#[derive(Deserialize)]
struct ComboRef {
    columns: Vec<String>,
}

#[derive(Deserialize)]
struct BookmarkRequest {
    dataset_id: String,
    insight_type_id: String,
    combination: ComboRef,
}

async fn create_bookmark(
    State(state): State<AppState>,
    body: Result<Json<BookmarkRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<Bookmark>), ApiError> {
    let Json(req) = body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid bookmark", e.body_text()))?;
    let entry = state.dataset(&req.dataset_id)?;
    let view = entry
        .analysis
        .insight(&req.insight_type_id, &req.combination.columns)
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "insight not found",
                format!("{} over [{}]", req.insight_type_id, req.combination.columns.join(", ")),
            )
        })?;
    let bookmark = Bookmark {
        id: uuid::Uuid::new_v4().simple().to_string(),
        dataset_id: req.dataset_id,
        insight_type_id: req.insight_type_id,
        combination: CombinationView {
            signature: view.combination.signature,
            columns: view.combination.columns,
        },
        chart: view.chart,
        created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    state
        .0
        .bookmarks
        .lock()
        .expect("bookmark store lock")
        .add(bookmark.clone())
        .map_err(ApiError::internal)?;
    Ok((StatusCode::CREATED, Json(bookmark)))
}

#[derive(Deserialize)]
struct BookmarkQuery {
    dataset_id: Option<String>,
}

async fn list_bookmarks(State(state): State<AppState>, Query(q): Query<BookmarkQuery>) -> Json<Vec<Bookmark>> {
    let store = state.0.bookmarks.lock().expect("bookmark store lock");
    Json(store.list(q.dataset_id.as_deref()))
}

async fn delete_bookmark(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<StatusCode, ApiError> {
    let removed = state
        .0
        .bookmarks
        .lock()
        .expect("bookmark store lock")
        .remove(&id)
        .map_err(ApiError::internal)?;
    if removed {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::new(StatusCode::NOT_FOUND, "bookmark not found", id))
    }
}

/// Binds `0.0.0.0:<port>` and serves until Ctrl-C.
pub async fn serve(cfg: ServiceConfig) -> Result<(), ServiceError> {
    let state = AppState::open(&cfg.data_dir, cfg.engine)?;
    let addr = SocketAddr::from(([0, 0, 0, 0], cfg.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
