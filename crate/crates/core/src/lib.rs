//! Hierarchical seat allocation.
//!
//! Walking distances between seats come from a probabilistic roadmap grown
//! over the floor plan ([`roadmap`], [`distance`]). Teams are then assigned
//! desks and offices by one of several engines ([`solvers`]), level by level
//! down an organizational hierarchy ([`hierarchy`]).

pub mod distance;
pub mod floorplan;
pub mod geometry;
pub mod hierarchy;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod render;
pub mod report;
pub mod rng;
pub mod roadmap;
pub mod solvers;
pub mod synth;
pub mod transport;

pub use distance::DistanceMatrix;
pub use floorplan::{FloorPlan, Seat, SeatKind};
pub use geometry::{Point, Polygon};
pub use model::{Allocation, CentralSeatMap, SaProblem, SolverParams, Team};
pub use roadmap::{Roadmap, RoadmapParams};
pub use solvers::{Method, SolveResult};
