//! HTTP scenario service.
//!
//! Plans are uploaded once and addressed by content hash. A scenario pairs
//! a plan with an editable hierarchy and a solver configuration; solving it
//! runs the same pipeline as the command-line tool, so result bytes match.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/plans` | upload a floor plan |
//! | GET | `/plans/{id}` | |
//! | POST | `/scenarios` | `{plan, hierarchy, config?}` |
//! | GET | `/scenarios/{id}` | status document |
//! | PATCH | `/scenarios/{id}` | `{hierarchy?, config?}` |
//! | POST | `/scenarios/{id}/solve` | optional config body; 202 |
//! | GET | `/scenarios/{id}/report` | |
//! | GET | `/scenarios/{id}/allocation` | |
//! | GET | `/scenarios/{id}/render/{level}.svg` | |
//! | GET | `/scenarios/{id}/compare/{other}` | per-level metric deltas |

pub mod compare;
pub mod store;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use seatalloc::floorplan::{FloorPlan, PlanError};
use seatalloc::hierarchy::{Hierarchy, HierarchyError, TeamEntry};
use seatalloc::pipeline::{self, ErrorClass, ErrorDocument, PipelineError, SolveConfig};
use seatalloc::report::RunReport;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use store::{Scenario, Status, Store};
use tokio::sync::mpsc;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Jobs run concurrently up to this count; 0 leaves jobs queued.
    pub workers: usize,
}

struct Inner {
    plans: HashMap<String, Arc<FloorPlan>>,
    scenarios: HashMap<String, Scenario>,
    next_id: u64,
}

/// Shared service state. All mutation goes through the one mutex; handlers
/// copy what they need out of it and never hold it across an await.
#[derive(Clone)]
pub struct AppState {
    store: Store,
    inner: Arc<Mutex<Inner>>,
    queue: mpsc::UnboundedSender<Job>,
}

#[derive(Debug)]
struct Job {
    scenario: String,
    revision: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum StartError {
    #[error("cannot open data directory: {0}")]
    Io(#[from] io::Error),
    #[error("stored plan {hash} is unreadable: {source}")]
    Plan { hash: String, source: PlanError },
}

impl AppState {
    /// Loads stored plans and scenarios and starts the workers. Jobs left
    /// queued or running by an earlier process are marked failed.
    pub fn open(cfg: &ServiceConfig) -> Result<Self, StartError> {
        let store = Store::open(&cfg.data_dir)?;
        let mut plans = HashMap::new();
        for hash in store.plan_hashes()? {
            let bytes = std::fs::read(store.plan_path(&hash))?;
            let plan = FloorPlan::from_slice(&bytes).map_err(|source| StartError::Plan {
                hash: hash.clone(),
                source,
            })?;
            plans.insert(hash, Arc::new(plan));
        }
        let mut scenarios = HashMap::new();
        let mut next_id = 1;
        for mut s in store.load_scenarios()? {
            if s.status.is_busy() {
                if s.status == Status::Queued {
                    s.status = Status::Running;
                }
                s.error = Some(ErrorDocument {
                    class: ErrorClass::Internal,
                    message: "interrupted by a service restart".into(),
                    path: None,
                    violations: Vec::new(),
                });
                let _ = s.transition(Status::Failed);
                store.write_scenario(&s)?;
            }
            if let Some(n) = s.id.strip_prefix("sc-").and_then(|n| n.parse::<u64>().ok()) {
                next_id = next_id.max(n + 1);
            }
            scenarios.insert(s.id.clone(), s);
        }
        let (tx, rx) = mpsc::unbounded_channel();
        let state = AppState {
            store,
            inner: Arc::new(Mutex::new(Inner {
                plans,
                scenarios,
                next_id,
            })),
            queue: tx,
        };
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        for _ in 0..cfg.workers {
            tokio::spawn(worker(state.clone(), rx.clone()));
        }
        Ok(state)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn snapshot(&self, id: &str) -> Result<Scenario, ApiError> {
        self.lock()
            .scenarios
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("unknown scenario {id:?}")))
    }

    fn plan(&self, hash: &str) -> Option<Arc<FloorPlan>> {
        self.lock().plans.get(hash).cloned()
    }

    /// Applies `f` to the stored scenario and persists the result.
    fn update<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Scenario) -> Result<T, ApiError>,
    ) -> Result<(T, Scenario), ApiError> {
        let mut inner = self.lock();
        let s = inner
            .scenarios
            .get_mut(id)
            .ok_or_else(|| ApiError::not_found(format!("unknown scenario {id:?}")))?;
        let mut next = s.clone();
        let out = f(&mut next)?;
        self.store.write_scenario(&next).map_err(ApiError::io)?;
        *s = next.clone();
        Ok((out, next))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/plans", post(create_plan))
        .route("/plans/{id}", get(get_plan))
        .route("/scenarios", post(create_scenario))
        .route("/scenarios/{id}", get(get_scenario).patch(patch_scenario))
        .route("/scenarios/{id}/solve", post(solve))
        .route("/scenarios/{id}/report", get(get_report))
        .route("/scenarios/{id}/allocation", get(get_allocation))
        .route("/scenarios/{id}/render/{file}", get(get_render))
        .route("/scenarios/{id}/compare/{other}", get(get_compare))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, cfg: ServiceConfig) -> Result<(), StartError> {
    let state = AppState::open(&cfg)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await?;
    Ok(())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn io(e: io::Error) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, format!("storage error: {e}"))
    }

    fn conflict(message: impl Into<String>, s: &Scenario) -> Self {
        Self {
            status: StatusCode::CONFLICT,
            body: json!({ "error": message.into(), "scenario": status_document(s) }),
        }
    }

    fn pipeline(e: &PipelineError) -> Self {
        let status = match e.class() {
            ErrorClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self {
            status,
            body: json!({ "error": e.to_document() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse<T: for<'de> Deserialize<'de>>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

fn status_document(s: &Scenario) -> Value {
    let mut v = serde_json::to_value(s).expect("scenario serializes");
    if let Some(e) = s.elapsed() {
        v["elapsed_seconds"] = json!(e);
    }
    v
}

fn validate_hierarchy(entries: &[TeamEntry]) -> ApiResult<Hierarchy> {
    Hierarchy::new(entries).map_err(|e| ApiError::pipeline(&PipelineError::Hierarchy(e)))
}

fn validate_config(cfg: &SolveConfig) -> ApiResult<()> {
    cfg.params
        .validate()
        .map_err(|m| ApiError::pipeline(&PipelineError::Config(m)))
}

async fn create_plan(State(st): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let plan = match FloorPlan::from_slice(&body) {
        Ok(p) => p,
        Err(e @ PlanError::Invalid(_)) => return Err(ApiError::pipeline(&PipelineError::Plan(e))),
        Err(e) => return Err(ApiError::bad_request(e.to_string())),
    };
    let hash = plan.content_hash();
    if st.plan(&hash).is_none() {
        st.store.write_plan(&hash, &plan.to_json()).map_err(ApiError::io)?;
    }
    let doc = json!({
        "id": hash,
        "seats": plan.seats().len(),
        "desks": plan.count_kind(seatalloc::SeatKind::Desk),
        "offices": plan.count_kind(seatalloc::SeatKind::Office),
    });
    st.lock().plans.entry(hash).or_insert_with(|| Arc::new(plan));
    Ok((StatusCode::CREATED, Json(doc)).into_response())
}

async fn get_plan(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let plan = st.plan(&id).ok_or_else(|| ApiError::not_found(format!("unknown plan {id:?}")))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], plan.to_json()).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateScenario {
    plan: String,
    hierarchy: Vec<TeamEntry>,
    #[serde(default)]
    config: SolveConfig,
}

async fn create_scenario(State(st): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: CreateScenario = parse(&body)?;
    if st.plan(&req.plan).is_none() {
        return Err(ApiError::not_found(format!("unknown plan {:?}", req.plan)));
    }
    validate_hierarchy(&req.hierarchy)?;
    validate_config(&req.config)?;
    let mut inner = st.lock();
    let id = format!("sc-{:06}", inner.next_id);
    let s = Scenario::new(id.clone(), req.plan, req.hierarchy, req.config);
    st.store.write_scenario(&s).map_err(ApiError::io)?;
    inner.next_id += 1;
    inner.scenarios.insert(id, s.clone());
    Ok((StatusCode::CREATED, Json(status_document(&s))).into_response())
}

async fn get_scenario(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(status_document(&st.snapshot(&id)?)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchScenario {
    hierarchy: Option<Vec<TeamEntry>>,
    config: Option<SolveConfig>,
}

async fn patch_scenario(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let req: PatchScenario = parse(&body)?;
    if let Some(h) = &req.hierarchy {
        validate_hierarchy(h)?;
    }
    if let Some(c) = &req.config {
        validate_config(c)?;
    }
    let ((), s) = st.update(&id, |s| {
        if s.status.is_busy() {
            return Err(ApiError::conflict("scenario has a solve in progress", s));
        }
        if let Some(h) = req.hierarchy {
            s.hierarchy = h;
        }
        if let Some(c) = req.config {
            s.config = c;
        }
        s.reset();
        Ok(())
    })?;
    Ok(Json(status_document(&s)))
}

async fn solve(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let current = st.snapshot(&id)?;
    if current.status.is_busy() {
        return Err(ApiError::conflict("scenario already has a solve in progress", &current));
    }
    let config: Option<SolveConfig> = if body.iter().all(u8::is_ascii_whitespace) {
        None
    } else {
        Some(parse(&body)?)
    };
    let cfg = config.clone().unwrap_or(current.config.clone());
    validate_config(&cfg)?;
    let h = validate_hierarchy(&current.hierarchy)?;
    let plan = st
        .plan(&current.plan)
        .ok_or_else(|| ApiError::not_found(format!("unknown plan {:?}", current.plan)))?;
    pipeline::precheck(&plan, &h).map_err(|e| ApiError::pipeline(&e))?;

    let (job, s) = st.update(&id, |s| {
        // Re-checked under the lock: another request may have queued it.
        if s.status.is_busy() {
            return Err(ApiError::conflict("scenario already has a solve in progress", s));
        }
        if s.hierarchy != current.hierarchy {
            return Err(ApiError::conflict("scenario changed while submitting", s));
        }
        if let Some(c) = config {
            s.config = c;
        }
        s.reset();
        s.revision += 1;
        s.transition(Status::Queued).expect("draft can be queued");
        Ok(Job {
            scenario: s.id.clone(),
            revision: s.revision,
        })
    })?;
    let job_id = format!("{}.{}", job.scenario, job.revision);
    let _ = st.queue.send(job);
    Ok((
        StatusCode::ACCEPTED,
        Json(json!({ "job": job_id, "scenario": status_document(&s) })),
    )
        .into_response())
}

fn done_result(st: &AppState, id: &str) -> ApiResult<(Scenario, String)> {
    let s = st.snapshot(id)?;
    match (&s.status, &s.result) {
        (Status::Done, Some(key)) => {
            let key = key.clone();
            Ok((s, key))
        }
        _ => Err(ApiError::conflict(format!("scenario {id:?} is not done"), &s)),
    }
}

fn read_result(st: &AppState, key: &str, name: &str) -> ApiResult<Vec<u8>> {
    st.store.read_result_file(key, name).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => ApiError::not_found(format!("no {name} in result")),
        _ => ApiError::io(e),
    })
}

async fn get_report(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let (_, key) = done_result(&st, &id)?;
    let bytes = read_result(&st, &key, "report.json")?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

async fn get_allocation(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let (_, key) = done_result(&st, &id)?;
    let bytes = read_result(&st, &key, "allocation.json")?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

async fn get_render(
    State(st): State<AppState>,
    Path((id, file)): Path<(String, String)>,
) -> ApiResult<Response> {
    let level: usize = file
        .strip_suffix(".svg")
        .and_then(|l| l.parse().ok())
        .ok_or_else(|| ApiError::not_found(format!("no rendering {file:?}")))?;
    let (_, key) = done_result(&st, &id)?;
    let bytes = read_result(&st, &key, &format!("level-{level}.svg"))?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], bytes).into_response())
}

async fn get_compare(
    State(st): State<AppState>,
    Path((id, other)): Path<(String, String)>,
) -> ApiResult<Json<compare::Comparison>> {
    let (_, a) = done_result(&st, &id)?;
    let (_, b) = done_result(&st, &other)?;
    let load = |key: &str| -> ApiResult<RunReport> {
        let bytes = read_result(&st, key, "report.json")?;
        serde_json::from_slice(&bytes).map_err(|e| ApiError::io(io::Error::other(e)))
    };
    Ok(Json(compare::compare(&id, &load(&a)?, &other, &load(&b)?)))
}

async fn worker(st: AppState, rx: Arc<tokio::sync::Mutex<mpsc::UnboundedReceiver<Job>>>) {
    loop {
        let job = match rx.lock().await.recv().await {
            Some(j) => j,
            None => return,
        };
        let started = st.update(&job.scenario, |s| {
            if s.revision != job.revision || s.status != Status::Queued {
                return Err(ApiError::bad_request("stale job"));
            }
            s.transition(Status::Running).expect("queued can run");
            Ok(())
        });
        let Ok(((), s)) = started else { continue };
        let st2 = st.clone();
        let outcome = tokio::task::spawn_blocking(move || execute(&st2, &s))
            .await
            .unwrap_or_else(|e| Err(internal(format!("solver task panicked: {e}"))));
        let _ = st.update(&job.scenario, |s| {
            match outcome {
                Ok(key) => {
                    s.result = Some(key);
                    s.transition(Status::Done).expect("running can finish");
                }
                Err(doc) => {
                    s.error = Some(doc);
                    s.transition(Status::Failed).expect("running can fail");
                }
            }
            Ok(())
        });
    }
}

fn internal(message: String) -> ErrorDocument {
    ErrorDocument {
        class: ErrorClass::Internal,
        message,
        path: None,
        violations: Vec::new(),
    }
}

/// Runs one solve and stores its artifacts; returns the result key.
fn execute(st: &AppState, s: &Scenario) -> Result<String, ErrorDocument> {
    let key = s.result_key();
    if st.store.has_result(&key) {
        return Ok(key);
    }
    let plan = st
        .plan(&s.plan)
        .ok_or_else(|| internal(format!("plan {:?} disappeared", s.plan)))?;
    let h = Hierarchy::new(&s.hierarchy).map_err(|e: HierarchyError| PipelineError::from(e).to_document())?;
    let cache = st.store.cache_dir();
    let artifacts = pipeline::run(&plan, &h, &s.config, Some(&cache)).map_err(|e| e.to_document())?;
    st.store
        .write_result(&key, &artifacts)
        .map_err(|e| internal(format!("storage error: {e}")))?;
    Ok(key)
}
