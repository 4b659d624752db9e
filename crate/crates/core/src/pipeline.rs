//! Plan + hierarchy + configuration → allocation, report and renderings.
//!
//! The command-line tool and the HTTP service both go through [`run`], so
//! equal inputs produce byte-identical artifacts from either.

use crate::distance::{all_pairs_seat_distances, cache_key, DistanceMatrix};
use crate::floorplan::{FloorPlan, PlanError, SeatKind};
use crate::hierarchy::{
    delayed_office_allocate, df_hsa, HierarchicalAllocation, Hierarchy, HierarchyError, HsaError,
};
use crate::model::{ModelError, SaProblem, SaSeat, SolverParams};
use crate::render::{render_svg, RenderError, RenderOptions};
use crate::report::{DistanceEcho, MetricsError, RunReport, SubproblemTiming, Timing};
use crate::rng::derive_seed;
use crate::roadmap::{generate_prm, Roadmap, RoadmapError, RoadmapParams};
use crate::solvers::{Method, SolveError};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use std::time::Instant;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Shortest paths over the probabilistic roadmap.
    #[default]
    Prm,
    /// Straight-line distance, ignoring obstacles.
    Euclidean,
}

/// Distance settings; unset roadmap values fall back to plan-relative
/// defaults, and the roadmap seed to one derived from the solver seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceConfig {
    pub mode: DistanceMode,
    pub max_nodes: Option<usize>,
    pub cast_step: Option<f64>,
    pub seat_radius: Option<f64>,
    pub seed: Option<u64>,
}

impl DistanceConfig {
    pub fn roadmap_params(&self, plan: &FloorPlan, solver_seed: u64) -> RoadmapParams {
        let seed = self.seed.unwrap_or_else(|| derive_seed(solver_seed, "roadmap"));
        let d = RoadmapParams::for_plan(plan, seed);
        RoadmapParams {
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
            cast_step: self.cast_step.unwrap_or(d.cast_step),
            seat_radius: self.seat_radius.unwrap_or(d.seat_radius),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub method: Method,
    #[serde(default)]
    pub params: SolverParams,
    #[serde(default)]
    pub delayed_office: bool,
    #[serde(default)]
    pub distances: DistanceConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            method: Method::IcaLs,
            params: SolverParams::default(),
            delayed_office: false,
            distances: DistanceConfig::default(),
        }
    }
}

/// Coarse error class, used for exit codes and HTTP statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorClass {
    Config,
    Validation,
    Infeasible,
    Internal,
}

/// Serializable form of a [`PipelineError`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub class: ErrorClass,
    pub message: String,
    /// Hierarchy path of the failing sub-problem.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<serde_json::Value>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("infeasible: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Infeasible(Vec<ModelError>),
    #[error("roadmap left seats unconnected (increase max_nodes or the seat radius): {}", .0.join(", "))]
    Unconnected(Vec<String>),
    #[error(transparent)]
    Roadmap(#[from] RoadmapError),
    #[error(transparent)]
    Hsa(#[from] HsaError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

impl PipelineError {
    pub fn class(&self) -> ErrorClass {
        match self {
            PipelineError::Config(_) | PipelineError::Roadmap(RoadmapError::BadParam(_)) => ErrorClass::Config,
            PipelineError::Plan(_) | PipelineError::Hierarchy(_) => ErrorClass::Validation,
            PipelineError::Infeasible(_) | PipelineError::Unconnected(_) => ErrorClass::Infeasible,
            PipelineError::Roadmap(RoadmapError::NoFreeSpace(_)) => ErrorClass::Infeasible,
            PipelineError::Hsa(HsaError::Subproblem { source, .. }) => match source {
                SolveError::Params(_) => ErrorClass::Config,
                SolveError::Model(ModelError::Infeasible { .. } | ModelError::MoreTeamsThanSeats { .. }) => {
                    ErrorClass::Infeasible
                }
                SolveError::Model(_) => ErrorClass::Internal,
            },
            PipelineError::Hsa(HsaError::NoCentral { .. } | HsaError::OfficeShortage { .. }) => ErrorClass::Infeasible,
            PipelineError::Hsa(_) | PipelineError::Metrics(_) | PipelineError::Render(_) => ErrorClass::Internal,
        }
    }

    /// Machine-readable violations, for validation and infeasibility errors.
    pub fn violations(&self) -> Vec<serde_json::Value> {
        use serde_json::json;
        match self {
            PipelineError::Plan(PlanError::Invalid(v)) => v.iter().map(|x| json!(x)).collect(),
            PipelineError::Hierarchy(HierarchyError::Invalid(v)) => v.iter().map(|x| json!(x)).collect(),
            PipelineError::Infeasible(v) => v
                .iter()
                .map(|e| match e {
                    ModelError::Infeasible { kind, demand, supply } => {
                        json!({"violation": "insufficient_supply", "kind": kind, "demand": demand, "supply": supply})
                    }
                    other => json!({"violation": "model", "message": other.to_string()}),
                })
                .collect(),
            PipelineError::Unconnected(seats) => seats
                .iter()
                .map(|s| json!({"violation": "unconnected_seat", "seat": s}))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn to_document(&self) -> ErrorDocument {
        ErrorDocument {
            class: self.class(),
            message: self.to_string(),
            path: self.hierarchy_path().map(str::to_string),
            violations: self.violations(),
        }
    }

    /// Path of the failing sub-problem, when there is one.
    pub fn hierarchy_path(&self) -> Option<&str> {
        match self {
            PipelineError::Hsa(HsaError::Subproblem { path, .. } | HsaError::NoCentral { path }) => Some(path),
            _ => None,
        }
    }
}

/// Root-level supply checks, run before any expensive work.
pub fn precheck(plan: &FloorPlan, h: &Hierarchy) -> Result<(), PipelineError> {
    let mut problems = Vec::new();
    for kind in [SeatKind::Desk, SeatKind::Office] {
        let demand: usize = h.roots().iter().map(|&t| h.team(t).demand(kind)).sum();
        let supply = plan.count_kind(kind);
        if demand > supply {
            problems.push(ModelError::Infeasible { kind, demand, supply });
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(PipelineError::Infeasible(problems))
    }
}

pub struct Distances {
    pub matrix: DistanceMatrix,
    /// Present when the roadmap was built in this call.
    pub roadmap: Option<Roadmap>,
    pub echo: DistanceEcho,
    pub cache_hit: bool,
    pub seconds: f64,
}

/// Builds (or loads from `cache_dir`) the seat distance matrix. Cache
/// problems are never fatal: an unreadable entry is rebuilt and a failed
/// write is skipped.
pub fn build_distances(
    plan: &FloorPlan,
    cfg: &DistanceConfig,
    solver_seed: u64,
    cache_dir: Option<&Path>,
) -> Result<Distances, PipelineError> {
    let start = Instant::now();
    if cfg.mode == DistanceMode::Euclidean {
        return Ok(Distances {
            matrix: DistanceMatrix::euclidean(plan),
            roadmap: None,
            echo: DistanceEcho {
                mode: "euclidean".into(),
                max_nodes: None,
                cast_step: None,
                seat_radius: None,
                seed: None,
            },
            cache_hit: false,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let params = cfg.roadmap_params(plan, solver_seed);
    params.validate()?;
    let echo = DistanceEcho {
        mode: "prm".into(),
        max_nodes: Some(params.max_nodes),
        cast_step: Some(params.cast_step),
        seat_radius: Some(params.seat_radius),
        seed: Some(params.seed),
    };
    let cache_file = cache_dir.map(|d| d.join(format!("{}.dm", cache_key(plan, &params))));
    if let Some(path) = &cache_file {
        if let Ok(bytes) = fs::read(path) {
            if let Ok(matrix) = DistanceMatrix::read_cache(bytes.as_slice()) {
                if !matrix.is_connected() {
                    return Err(PipelineError::Unconnected(unreachable_seats(&matrix)));
                }
                return Ok(Distances {
                    matrix,
                    roadmap: None,
                    echo,
                    cache_hit: true,
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
        }
    }
    let roadmap = generate_prm(plan, &params)?;
    if !roadmap.all_seats_connected() {
        return Err(PipelineError::Unconnected(roadmap.unconnected_seats().to_vec()));
    }
    let matrix = all_pairs_seat_distances(&roadmap);
    if !matrix.is_connected() {
        return Err(PipelineError::Unconnected(unreachable_seats(&matrix)));
    }
    if let Some(path) = &cache_file {
        let mut buf = Vec::new();
        if matrix.write_cache(&mut buf).is_ok() {
            let _ = path.parent().map(fs::create_dir_all);
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            if fs::write(&tmp, &buf).is_ok() {
                let _ = fs::rename(&tmp, path);
            }
        }
    }
    Ok(Distances {
        matrix,
        roadmap: Some(roadmap),
        echo,
        cache_hit: false,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Seats with an infinite distance to the first seat.
fn unreachable_seats(m: &DistanceMatrix) -> Vec<String> {
    (0..m.len())
        .filter(|&j| !m.get(0, j).is_finite())
        .map(|j| m.seat_ids()[j].clone())
        .collect()
}

/// All plan seats, no teams.
pub fn base_problem(plan: &FloorPlan, matrix: &DistanceMatrix) -> Result<SaProblem, PipelineError> {
    let seats: Vec<SaSeat> = plan
        .seats()
        .iter()
        .map(|s| SaSeat {
            id: s.id.clone(),
            kind: s.kind,
        })
        .collect();
    SaProblem::from_matrix(matrix, &seats, Vec::new()).map_err(|e| PipelineError::Infeasible(vec![e]))
}

/// Everything one run produces. The `*_json` and `svgs` strings are the
/// exact bytes written to disk or served.
#[derive(Debug)]
pub struct Artifacts {
    pub allocation: HierarchicalAllocation,
    pub report: RunReport,
    pub timing: Timing,
    pub allocation_json: String,
    pub report_json: String,
    pub timing_json: String,
    /// One rendering per hierarchy level.
    pub svgs: Vec<String>,
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// Solves with precomputed distances.
pub fn solve_with(
    plan: &FloorPlan,
    h: &Hierarchy,
    cfg: &SolveConfig,
    distances: &Distances,
) -> Result<Artifacts, PipelineError> {
    cfg.params.validate().map_err(PipelineError::Config)?;
    precheck(plan, h)?;
    let start = Instant::now();
    let base = base_problem(plan, &distances.matrix)?;
    let run = df_hsa(&base, h, cfg.method, &cfg.params, cfg.delayed_office)?;
    let allocation = if cfg.delayed_office {
        delayed_office_allocate(&base, h, &run.allocation)?
    } else {
        run.allocation
    };
    let solve_seconds = start.elapsed().as_secs_f64();
    let report = RunReport::build(
        &base,
        h,
        &allocation,
        &run.subproblems,
        cfg.method,
        cfg.delayed_office,
        &cfg.params,
        distances.echo.clone(),
        plan.content_hash(),
    )?;
    let svgs = (0..h.depth())
        .map(|level| {
            render_svg(
                plan,
                RenderOptions {
                    allocation: Some((&allocation, level)),
                    hierarchy: Some(h),
                    roadmap: None,
                },
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let timing = Timing {
        distance_seconds: distances.seconds,
        solve_seconds,
        total_seconds: distances.seconds + solve_seconds,
        subproblems: run
            .subproblems
            .iter()
            .map(|s| SubproblemTiming {
                path: s.path.clone(),
                seconds: s.elapsed,
            })
            .collect(),
    };
    Ok(Artifacts {
        allocation_json: to_json_pretty(&allocation),
        report_json: report.to_json(),
        timing_json: to_json_pretty(&timing),
        allocation,
        report,
        timing,
        svgs,
    })
}

/// Full pipeline: precheck, distances (cached when `cache_dir` is set),
/// hierarchical solve, delayed offices, metrics and renderings.
pub fn run(
    plan: &FloorPlan,
    h: &Hierarchy,
    cfg: &SolveConfig,
    cache_dir: Option<&Path>,
) -> Result<Artifacts, PipelineError> {
    cfg.params.validate().map_err(PipelineError::Config)?;
    precheck(plan, h)?;
    let distances = build_distances(plan, &cfg.distances, cfg.params.seed, cache_dir)?;
    solve_with(plan, h, cfg, &distances)
}
