use seatalloc::report::{AveragedMetrics, LevelMetrics, RunReport};
use serde::Serialize;

/// Value in each scenario and `other - this`; the delta is absent when
/// either side is.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Paired {
    pub this: Option<f64>,
    pub other: Option<f64>,
    pub delta: Option<f64>,
}

impl Paired {
    fn new(this: Option<f64>, other: Option<f64>) -> Self {
        let delta = match (this, other) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        Self { this, other, delta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelDelta {
    pub level: usize,
    pub mean_central_seat_distance: Paired,
    pub max_central_seat_distance: Paired,
    pub total_central_seat_distance: Paired,
    pub mean_office_distance: Paired,
    pub total_office_distance: Paired,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragedDelta {
    pub mean_central_seat_distance: Paired,
    pub mean_office_distance: Paired,
    pub max_central_seat_distance: Paired,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub this: String,
    pub other: String,
    pub levels_this: usize,
    pub levels_other: usize,
    /// Levels present in both reports.
    pub per_level: Vec<LevelDelta>,
    pub averaged: AveragedDelta,
}

fn level_delta(a: &LevelMetrics, b: &LevelMetrics) -> LevelDelta {
    LevelDelta {
        level: a.level,
        mean_central_seat_distance: Paired::new(a.mean_central_seat_distance, b.mean_central_seat_distance),
        max_central_seat_distance: Paired::new(a.max_central_seat_distance, b.max_central_seat_distance),
        total_central_seat_distance: Paired::new(
            Some(a.total_central_seat_distance),
            Some(b.total_central_seat_distance),
        ),
        mean_office_distance: Paired::new(a.mean_office_distance, b.mean_office_distance),
        total_office_distance: Paired::new(Some(a.total_office_distance), Some(b.total_office_distance)),
    }
}

fn averaged_delta(a: &AveragedMetrics, b: &AveragedMetrics) -> AveragedDelta {
    AveragedDelta {
        mean_central_seat_distance: Paired::new(a.mean_central_seat_distance, b.mean_central_seat_distance),
        mean_office_distance: Paired::new(a.mean_office_distance, b.mean_office_distance),
        max_central_seat_distance: Paired::new(a.max_central_seat_distance, b.max_central_seat_distance),
    }
}

pub fn compare(this_id: &str, this: &RunReport, other_id: &str, other: &RunReport) -> Comparison {
    Comparison {
        this: this_id.to_string(),
        other: other_id.to_string(),
        levels_this: this.levels,
        levels_other: other.levels,
        per_level: this
            .per_level
            .iter()
            .zip(&other.per_level)
            .map(|(a, b)| level_delta(a, b))
            .collect(),
        averaged: averaged_delta(&this.averaged, &other.averaged),
    }
}
