//! Floor plan loading, validation and collision predicates.
//!
//! The document format is JSON with exactly four top-level keys:
//!
//! ```json
//! {
//!   "width": 40.0, "height": 30.0,
//!   "obstacles": [[[10, 0], [11, 0], [11, 20], [10, 20]]],
//!   "seats": [{"id": "d1", "kind": "desk", "x": 2.0, "y": 3.0}]
//! }
//! ```
//!
//! Unknown keys are rejected. Coordinates are length-units; predicates use an
//! absolute tolerance of [`EPS`], and touching an obstacle counts as blocked.

use crate::geometry::{Aabb, Point, Polygon, PolygonDefect, EPS};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::io::Read;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeatKind {
    Desk,
    Office,
}

impl std::fmt::Display for SeatKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeatKind::Desk => "desk",
            SeatKind::Office => "office",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seat {
    pub id: String,
    pub kind: SeatKind,
    pub pos: Point,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeatRecord {
    id: String,
    kind: SeatKind,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDocument {
    width: f64,
    height: f64,
    obstacles: Vec<Polygon>,
    seats: Vec<SeatRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("malformed floor plan: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read floor plan: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid floor plan: {}", join_violations(.0))]
    Invalid(Vec<PlanViolation>),
}

fn join_violations(v: &[PlanViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A single validation failure, naming the offending element.
#[derive(Clone, Debug, PartialEq, thiserror::Error, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum PlanViolation {
    #[error("plan extent {width}x{height} is not positive and finite")]
    BadExtent { width: f64, height: f64 },
    #[error("obstacle {index}: {reason}")]
    Obstacle { index: usize, reason: String },
    #[error("seat id {id:?} appears more than once")]
    DuplicateSeat { id: String },
    #[error("seat with empty id at index {index}")]
    EmptySeatId { index: usize },
    #[error("seat {id:?} lies outside the plan bounds")]
    SeatOutOfBounds { id: String },
    #[error("seat {id:?} lies inside or on obstacle {obstacle}")]
    SeatInObstacle { id: String, obstacle: usize },
}

impl PlanViolation {
    fn obstacle(index: usize, defect: PolygonDefect) -> Self {
        PlanViolation::Obstacle {
            index,
            reason: defect.to_string(),
        }
    }
}

/// A validated, immutable floor plan.
#[derive(Clone, Debug)]
pub struct FloorPlan {
    width: f64,
    height: f64,
    obstacles: Vec<Polygon>,
    obstacle_bounds: Vec<Aabb>,
    seats: Vec<Seat>,
}

impl FloorPlan {
    /// Builds and validates a plan; all violations are reported together.
    pub fn new(width: f64, height: f64, obstacles: Vec<Polygon>, seats: Vec<Seat>) -> Result<Self, PlanError> {
        let mut violations = Vec::new();
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(PlanError::Invalid(vec![PlanViolation::BadExtent { width, height }]));
        }
        for (i, poly) in obstacles.iter().enumerate() {
            if let Err(defect) = poly.validate() {
                violations.push(PlanViolation::obstacle(i, defect));
            }
        }
        if !violations.is_empty() {
            return Err(PlanError::Invalid(violations));
        }
        let obstacle_bounds = obstacles.iter().map(Polygon::bounds).collect();
        let plan = FloorPlan {
            width,
            height,
            obstacles,
            obstacle_bounds,
            seats,
        };

        let mut seen = HashSet::new();
        for (i, seat) in plan.seats.iter().enumerate() {
            if seat.id.is_empty() {
                violations.push(PlanViolation::EmptySeatId { index: i });
            }
            if !seen.insert(seat.id.as_str()) {
                violations.push(PlanViolation::DuplicateSeat { id: seat.id.clone() });
            }
            if !plan.in_bounds(seat.pos) {
                violations.push(PlanViolation::SeatOutOfBounds { id: seat.id.clone() });
            } else if let Some(obstacle) = plan.blocking_obstacle(seat.pos) {
                violations.push(PlanViolation::SeatInObstacle {
                    id: seat.id.clone(),
                    obstacle,
                });
            }
        }
        if violations.is_empty() {
            Ok(plan)
        } else {
            Err(PlanError::Invalid(violations))
        }
    }

    pub fn from_reader(mut source: impl Read) -> Result<Self, PlanError> {
        let mut buf = Vec::new();
        source.read_to_end(&mut buf)?;
        Self::from_slice(&buf)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, PlanError> {
        let doc: PlanDocument = serde_json::from_slice(bytes)?;
        let seats = doc
            .seats
            .into_iter()
            .map(|r| Seat {
                id: r.id,
                kind: r.kind,
                pos: Point::new(r.x, r.y),
            })
            .collect();
        Self::new(doc.width, doc.height, doc.obstacles, seats)
    }

    fn document(&self) -> PlanDocument {
        PlanDocument {
            width: self.width,
            height: self.height,
            obstacles: self.obstacles.clone(),
            seats: self
                .seats
                .iter()
                .map(|s| SeatRecord {
                    id: s.id.clone(),
                    kind: s.kind,
                    x: s.pos.x,
                    y: s.pos.y,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("plan serializes")
    }

    /// SHA-256 over the canonical compact serialization.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.document()).expect("plan serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn seats(&self) -> &[Seat] {
        &self.seats
    }

    pub fn seat(&self, id: &str) -> Option<&Seat> {
        self.seats.iter().find(|s| s.id == id)
    }

    pub fn count_kind(&self, kind: SeatKind) -> usize {
        self.seats.iter().filter(|s| s.kind == kind).count()
    }

    fn in_bounds(&self, p: Point) -> bool {
        p.is_finite()
            && p.x >= -EPS
            && p.y >= -EPS
            && p.x <= self.width + EPS
            && p.y <= self.height + EPS
    }

    fn blocking_obstacle(&self, p: Point) -> Option<usize> {
        let probe = Aabb { min: p, max: p };
        (0..self.obstacles.len()).find(|&i| {
            self.obstacle_bounds[i].overlaps(&probe, 2.0 * EPS) && self.obstacles[i].blocks_point(p)
        })
    }

    /// Inside the bounding box and strictly clear of every obstacle.
    pub fn point_free(&self, p: Point) -> bool {
        self.in_bounds(p) && self.blocking_obstacle(p).is_none()
    }

    /// Both endpoints free and the segment touches no obstacle edge.
    pub fn segment_free(&self, a: Point, b: Point) -> bool {
        // Canonical endpoint order keeps the predicate exactly symmetric.
        let (a, b) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
        if !self.point_free(a) || !self.point_free(b) {
            return false;
        }
        let seg = Aabb::of_points([&a, &b]).expect("two points");
        self.obstacles
            .iter()
            .zip(&self.obstacle_bounds)
            .all(|(poly, bb)| !bb.overlaps(&seg, 2.0 * EPS) || !poly.touches_segment(a, b))
    }
}
