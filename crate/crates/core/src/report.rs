//! Per-level quality metrics and the run report.
//!
//! For level `l`, every seat `s` owned by team `t` in `X_l` contributes
//! `D(s, central(t))` to the central-seat distance; offices contribute the
//! same quantity to the office distance as well. In delayed-office mode the
//! offices of a branch team are the ones propagated from its leaves, so one
//! formula covers both modes. Level averages are unweighted unless asked.

use crate::floorplan::SeatKind;
use crate::hierarchy::{HierarchicalAllocation, Hierarchy, SubproblemRecord};
use crate::model::{SaProblem, SolverParams};
use crate::solvers::Method;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("level {level}: team {team:?} has no central seat")]
    MissingCentral { level: usize, team: String },
    #[error("seat {seat:?} is not in the distance matrix")]
    UnknownSeat { seat: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelMetrics {
    pub level: usize,
    pub seats_allocated: usize,
    pub offices_allocated: usize,
    pub total_central_seat_distance: f64,
    pub mean_central_seat_distance: Option<f64>,
    pub max_central_seat_distance: Option<f64>,
    pub total_office_distance: f64,
    pub mean_office_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedMetrics {
    pub weighted: bool,
    pub mean_central_seat_distance: Option<f64>,
    pub mean_office_distance: Option<f64>,
    pub max_central_seat_distance: Option<f64>,
}

pub fn compute_metrics(
    base: &SaProblem,
    alloc: &HierarchicalAllocation,
) -> Result<Vec<LevelMetrics>, MetricsError> {
    let seat = |id: &str| base.seat_index(id).ok_or_else(|| MetricsError::UnknownSeat { seat: id.to_string() });
    let mut out = Vec::with_capacity(alloc.levels.len());
    for (level, assigned) in alloc.levels.iter().enumerate() {
        let (mut n, mut n_off, mut total, mut office) = (0usize, 0usize, 0.0, 0.0);
        let mut max: Option<f64> = None;
        for a in assigned {
            let s = seat(&a.seat_id)?;
            let c = alloc.centrals.get(&a.team_id).ok_or_else(|| MetricsError::MissingCentral {
                level,
                team: a.team_id.clone(),
            })?;
            let d = base.d(s, seat(c)?);
            n += 1;
            total += d;
            max = Some(max.map_or(d, |m: f64| m.max(d)));
            if base.kind(s) == SeatKind::Office {
                n_off += 1;
                office += d;
            }
        }
        out.push(LevelMetrics {
            level,
            seats_allocated: n,
            offices_allocated: n_off,
            total_central_seat_distance: total,
            mean_central_seat_distance: (n > 0).then(|| total / n as f64),
            max_central_seat_distance: max,
            total_office_distance: office,
            mean_office_distance: (n_off > 0).then(|| office / n_off as f64),
        });
    }
    Ok(out)
}

/// Mean of the per-level values over levels where the value exists. With
/// `weighted`, level means are weighted by their seat (or office) counts.
pub fn average_levels(levels: &[LevelMetrics], weighted: bool) -> AveragedMetrics {
    let avg = |value: fn(&LevelMetrics) -> Option<f64>, weight: fn(&LevelMetrics) -> usize| {
        let (mut num, mut den) = (0.0, 0.0);
        for l in levels {
            if let Some(v) = value(l) {
                let w = if weighted { weight(l) as f64 } else { 1.0 };
                num += w * v;
                den += w;
            }
        }
        (den > 0.0).then(|| num / den)
    };
    AveragedMetrics {
        weighted,
        mean_central_seat_distance: avg(|l| l.mean_central_seat_distance, |l| l.seats_allocated),
        mean_office_distance: avg(|l| l.mean_office_distance, |l| l.offices_allocated),
        max_central_seat_distance: avg(|l| l.max_central_seat_distance, |l| l.seats_allocated),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceEcho {
    /// "prm" or "euclidean".
    pub mode: String,
    pub max_nodes: Option<usize>,
    pub cast_step: Option<f64>,
    pub seat_radius: Option<f64>,
    pub seed: Option<u64>,
}

/// A sub-problem without its wall-clock time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemSummary {
    pub path: String,
    pub level: usize,
    pub seats: usize,
    pub teams: usize,
    pub objective: f64,
    pub optimal: bool,
    pub iterations: usize,
}

impl From<&SubproblemRecord> for SubproblemSummary {
    fn from(r: &SubproblemRecord) -> Self {
        Self {
            path: r.path.clone(),
            level: r.level,
            seats: r.seats,
            teams: r.teams,
            objective: r.objective,
            optimal: r.optimal,
            iterations: r.iterations,
        }
    }
}

/// Everything about a run except timings, so equal inputs give equal bytes.
/// Timings live in [`Timing`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub delayed_office: bool,
    pub params: SolverParams,
    pub distances: DistanceEcho,
    pub plan_hash: String,
    pub levels: usize,
    pub per_level: Vec<LevelMetrics>,
    pub averaged: AveragedMetrics,
    pub averaged_weighted: AveragedMetrics,
    pub subproblems: Vec<SubproblemSummary>,
    /// Every sub-problem was solved to proven optimality.
    pub optimal: bool,
    pub vacant_seats: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemTiming {
    pub path: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub distance_seconds: f64,
    pub solve_seconds: f64,
    pub total_seconds: f64,
    pub subproblems: Vec<SubproblemTiming>,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        base: &SaProblem,
        h: &Hierarchy,
        alloc: &HierarchicalAllocation,
        subproblems: &[SubproblemRecord],
        method: Method,
        delayed_office: bool,
        params: &SolverParams,
        distances: DistanceEcho,
        plan_hash: String,
    ) -> Result<Self, MetricsError> {
        let per_level = compute_metrics(base, alloc)?;
        let vacant = base.n_seats() - per_level.first().map_or(0, |l| l.seats_allocated);
        Ok(Self {
            method,
            delayed_office,
            params: params.clone(),
            distances,
            plan_hash,
            levels: h.depth(),
            averaged: average_levels(&per_level, false),
            averaged_weighted: average_levels(&per_level, true),
            per_level,
            subproblems: subproblems.iter().map(SubproblemSummary::from).collect(),
            optimal: subproblems.iter().all(|s| s.optimal),
            vacant_seats: vacant,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Sample mean and standard error (σ/√n with the n−1 estimator; 0 for n=1).
pub fn mean_se(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, (var / n).sqrt()))
}

/// One run's headline numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub central_seat_distance: Option<f64>,
    pub office_distance: Option<f64>,
    /// Solve time only; distance building is excluded.
    pub seconds: f64,
}

impl RunSummary {
    pub fn new(seed: u64, report: &RunReport, timing: &Timing) -> Self {
        Self {
            seed,
            central_seat_distance: report.averaged.mean_central_seat_distance,
            office_distance: report.averaged.mean_office_distance,
            seconds: timing.solve_seconds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchColumn {
    pub method: String,
    pub central_seat_distance: Option<Stat>,
    pub office_distance: Option<Stat>,
    pub exec_seconds: Option<Stat>,
}

fn stat(values: Vec<f64>) -> Option<Stat> {
    let n = values.len();
    mean_se(&values).map(|(mean, se)| Stat { mean, se, n })
}

/// Aggregates runs (in the given order) into one table column.
pub fn bench_column(method: &str, runs: &[RunSummary]) -> BenchColumn {
    BenchColumn {
        method: method.to_string(),
        central_seat_distance: stat(runs.iter().filter_map(|r| r.central_seat_distance).collect()),
        office_distance: stat(runs.iter().filter_map(|r| r.office_distance).collect()),
        exec_seconds: stat(runs.iter().map(|r| r.seconds).collect()),
    }
}

/// Plain-text table: one column per method, rows "Central Seat Distance",
/// "Office Distance" and "Exec. Time (s)", cells "mean ± standard error".
pub fn format_table(columns: &[BenchColumn]) -> String {
    let cell = |s: &Option<Stat>| match s {
        Some(s) => format!("{:.3} ± {:.3}", s.mean, s.se),
        None => "-".to_string(),
    };
    let rows: [(&str, Box<dyn Fn(&BenchColumn) -> String>); 3] = [
        ("Central Seat Distance", Box::new(|c| cell(&c.central_seat_distance))),
        ("Office Distance", Box::new(|c| cell(&c.office_distance))),
        ("Exec. Time (s)", Box::new(|c| cell(&c.exec_seconds))),
    ];
    let label_w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| {
            rows.iter()
                .map(|r| r.1(c).chars().count())
                .chain([c.method.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let _ = write!(out, "{:label_w$}", "");
    for (c, w) in columns.iter().zip(&widths) {
        let _ = write!(out, "  {:>w$}", c.method, w = *w);
    }
    out.push('\n');
    for (label, f) in &rows {
        let _ = write!(out, "{label:label_w$}");
        for (c, w) in columns.iter().zip(&widths) {
            let _ = write!(out, "  {:>w$}", f(c), w = *w);
        }
        out.push('\n');
    }
    out
}
