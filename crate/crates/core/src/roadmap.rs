//! Probabilistic roadmap construction with RRT-style expansion.
//!
//! Seats are nodes of the graph (indices `0..|S|`, in floor plan order);
//! exploration nodes follow. The roadmap grows from one random free node:
//! each seat first tries to attach to the existing tree, and while it cannot,
//! random samples pull the tree outward by at most `cast_step` until the seat
//! attaches or the node budget runs out.

use crate::floorplan::FloorPlan;
use crate::geometry::{Point, EPS};
use crate::rng::{rng_from_seed, Rng};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Rejection sampling gives up after this many consecutive blocked draws.
const MAX_SAMPLE_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadmapParams {
    /// Maximum number of exploration nodes (K).
    pub max_nodes: usize,
    /// Maximum extension length of a single cast.
    pub cast_step: f64,
    /// Radius within which a seat links to roadmap nodes.
    pub seat_radius: f64,
    pub seed: u64,
}

impl RoadmapParams {
    /// Instance-relative defaults: K = 2000, cast step 4% and seat radius 6%
    /// of the plan diagonal.
    pub fn for_plan(plan: &FloorPlan, seed: u64) -> Self {
        let diag = plan.diagonal();
        Self {
            max_nodes: 2000,
            cast_step: 0.04 * diag,
            seat_radius: 0.06 * diag,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), RoadmapError> {
        if !(self.cast_step.is_finite() && self.cast_step > 0.0) {
            return Err(RoadmapError::BadParam("cast_step must be positive"));
        }
        if !(self.seat_radius.is_finite() && self.seat_radius > 0.0) {
            return Err(RoadmapError::BadParam("seat_radius must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RoadmapError {
    #[error("invalid roadmap parameter: {0}")]
    BadParam(&'static str),
    #[error("no collision-free position found after {0} samples")]
    NoFreeSpace(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeOrigin {
    Seat(String),
    Exploration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub pos: Point,
    pub origin: NodeOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected roadmap graph.
#[derive(Clone, Debug, Default)]
pub struct Roadmap {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_set: HashSet<(usize, usize)>,
    seat_count: usize,
    unconnected: Vec<String>,
}

impl Roadmap {
    /// A roadmap holding only the seat nodes of `plan`, no edges.
    pub fn with_seats(plan: &FloorPlan) -> Self {
        let mut rm = Roadmap::default();
        for seat in plan.seats() {
            rm.push_node(seat.pos, NodeOrigin::Seat(seat.id.clone()));
        }
        rm.seat_count = plan.seats().len();
        rm
    }

    pub fn push_node(&mut self, pos: Point, origin: NodeOrigin) -> usize {
        self.nodes.push(Node { pos, origin });
        self.adjacency.push(Vec::new());
        self.nodes.len() - 1
    }

    /// Adds the undirected edge `u–v` weighted by Euclidean length.
    /// Returns false if it already existed or is a self-loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let key = (u.min(v), u.max(v));
        if !self.edge_set.insert(key) {
            return false;
        }
        let weight = self.nodes[u].pos.distance(self.nodes[v].pos);
        self.edges.push(Edge { u: key.0, v: key.1, weight });
        self.adjacency[u].push((v, weight));
        self.adjacency[v].push((u, weight));
        true
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn seat_count(&self) -> usize {
        self.seat_count
    }

    pub fn exploration_count(&self) -> usize {
        self.nodes.len() - self.seat_count
    }

    /// Seat ids the construction failed to attach within the node budget.
    pub fn unconnected_seats(&self) -> &[String] {
        &self.unconnected
    }

    pub fn all_seats_connected(&self) -> bool {
        self.unconnected.is_empty()
    }

    pub fn seat_ids(&self) -> Vec<String> {
        self.nodes[..self.seat_count]
            .iter()
            .map(|n| match &n.origin {
                NodeOrigin::Seat(id) => id.clone(),
                NodeOrigin::Exploration => unreachable!("seat slots hold seats"),
            })
            .collect()
    }
}

fn sample_free(plan: &FloorPlan, rng: &mut Rng) -> Result<Point, RoadmapError> {
    for _ in 0..MAX_SAMPLE_ATTEMPTS {
        let p = Point::new(rng.gen::<f64>() * plan.width(), rng.gen::<f64>() * plan.height());
        if plan.point_free(p) {
            return Ok(p);
        }
    }
    Err(RoadmapError::NoFreeSpace(MAX_SAMPLE_ATTEMPTS))
}

/// Extends from `from` toward `toward` by at most `step`. Returns `None`
/// when the extension segment is blocked.
pub fn cast(plan: &FloorPlan, from: Point, toward: Point, step: f64) -> Option<Point> {
    let len = from.distance(toward);
    let target = if len <= step { toward } else { from.lerp(toward, step / len) };
    plan.segment_free(from, target).then_some(target)
}

/// Links seat node `seat` to every candidate within `radius` whose segment
/// is free. True if an edge was added or the seat already had one.
pub fn connect_seat(
    plan: &FloorPlan,
    roadmap: &mut Roadmap,
    seat: usize,
    candidates: &[usize],
    radius: f64,
) -> bool {
    let had_edge = roadmap.degree(seat) > 0;
    let origin = roadmap.nodes[seat].pos;
    let mut added = false;
    for &c in candidates {
        if c == seat {
            continue;
        }
        let pos = roadmap.nodes[c].pos;
        if origin.distance(pos) <= radius && plan.segment_free(origin, pos) {
            added |= roadmap.add_edge(seat, c);
        }
    }
    added || had_edge
}

/// Builds the roadmap. Deterministic in `(plan, params)`.
///
/// Seats that could not be attached before the exploration budget ran out
/// are listed in [`Roadmap::unconnected_seats`]; rerunning with a larger
/// `max_nodes` may connect them.
pub fn generate_prm(plan: &FloorPlan, params: &RoadmapParams) -> Result<Roadmap, RoadmapError> {
    params.validate()?;
    let mut rng = rng_from_seed(params.seed);
    let mut rm = Roadmap::with_seats(plan);
    let n_seats = rm.seat_count;

    let mut exploration: Vec<usize> = Vec::new();
    if params.max_nodes > 0 {
        let x_init = sample_free(plan, &mut rng)?;
        exploration.push(rm.push_node(x_init, NodeOrigin::Exploration));
    }

    for seat in 0..n_seats {
        // Tree members: exploration nodes and seats already attached.
        let candidates: Vec<usize> = (0..rm.nodes.len())
            .filter(|&i| i >= n_seats || rm.degree(i) > 0)
            .collect();
        let mut connected = connect_seat(plan, &mut rm, seat, &candidates, params.seat_radius);
        while !connected && exploration.len() < params.max_nodes {
            let x_rand = sample_free(plan, &mut rng)?;
            let nearest = nearest_node(&rm, &exploration, x_rand);
            let from = rm.nodes[nearest].pos;
            let Some(x_new) = cast(plan, from, x_rand, params.cast_step) else {
                continue;
            };
            if x_new.distance(from) <= EPS {
                continue;
            }
            let new = rm.push_node(x_new, NodeOrigin::Exploration);
            for other in 0..new {
                let pos = rm.nodes[other].pos;
                if (other == nearest || x_new.distance(pos) <= params.cast_step)
                    && plan.segment_free(x_new, pos)
                {
                    rm.add_edge(new, other);
                }
            }
            exploration.push(new);
            connected = connect_seat(plan, &mut rm, seat, &[new], params.seat_radius);
        }
    }

    // Edges are only ever added with a tree member as one endpoint, so any
    // seat with an edge is attached to the tree.
    let ids = rm.seat_ids();
    rm.unconnected = (0..n_seats)
        .filter(|&s| rm.degree(s) == 0)
        .map(|s| ids[s].clone())
        .collect();
    Ok(rm)
}

fn nearest_node(rm: &Roadmap, pool: &[usize], p: Point) -> usize {
    let mut best = pool[0];
    let mut best_d = f64::INFINITY;
    for &i in pool {
        let d = rm.nodes[i].pos.distance(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{Seat, SeatKind};
    use crate::geometry::Polygon;

    fn plan(obstacles: Vec<Polygon>, seats: &[(f64, f64)]) -> FloorPlan {
        let seats = seats
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Seat {
                id: format!("s{i}"),
                kind: SeatKind::Desk,
                pos: Point::new(x, y),
            })
            .collect();
        FloorPlan::new(10.0, 10.0, obstacles, seats).unwrap()
    }

    #[test]
    fn cast_moves_by_step() {
        let open = plan(vec![], &[]);
        let p = cast(&open, Point::new(0., 0.), Point::new(10., 0.), 4.0).unwrap();
        assert!((p.x - 4.0).abs() < 1e-12 && p.y == 0.0);
        let p = cast(&open, Point::new(0., 0.), Point::new(3., 0.), 10.0).unwrap();
        assert_eq!(p, Point::new(3., 0.));
    }

    #[test]
    fn cast_blocked_by_wall() {
        let walled = plan(vec![Polygon::rect(2.0, -1.0, 2.2, 11.0)], &[]);
        assert_eq!(cast(&walled, Point::new(0., 1.), Point::new(10., 1.), 4.0), None);
    }

    #[test]
    fn connect_seat_cases() {
        let walled = plan(vec![Polygon::rect(4.0, 0.0, 4.5, 10.0)], &[(3.0, 5.0)]);
        let mut rm = Roadmap::with_seats(&walled);
        let near = rm.push_node(Point::new(3.0, 6.0), NodeOrigin::Exploration);
        let far = rm.push_node(Point::new(3.0, 9.5), NodeOrigin::Exploration);
        let behind = rm.push_node(Point::new(5.5, 5.0), NodeOrigin::Exploration);

        assert!(!connect_seat(&walled, &mut rm, 0, &[far], 2.0));
        assert!(!connect_seat(&walled, &mut rm, 0, &[behind], 3.0));
        assert!(connect_seat(&walled, &mut rm, 0, &[near], 2.0));
        // Already attached.
        assert!(connect_seat(&walled, &mut rm, 0, &[far], 2.0));
        assert_eq!(rm.edges().len(), 1);
    }

    #[test]
    fn open_plan_connects_nearby_seats() {
        let open = plan(vec![], &[(4.0, 4.0), (5.0, 4.0)]);
        let params = RoadmapParams {
            max_nodes: 200,
            cast_step: 1.0,
            seat_radius: 2.0,
            seed: 1,
        };
        let rm = generate_prm(&open, &params).unwrap();
        assert!(rm.all_seats_connected());
        assert!(rm.exploration_count() <= 200);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = plan(vec![Polygon::rect(4.0, 0.0, 4.5, 8.0)], &[(1., 1.), (8., 1.), (2., 9.)]);
        let params = RoadmapParams {
            max_nodes: 300,
            cast_step: 1.0,
            seat_radius: 1.5,
            seed: 11,
        };
        let a = generate_prm(&p, &params).unwrap();
        let b = generate_prm(&p, &params).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn zero_budget_leaves_far_seats_unconnected() {
        let p = plan(vec![], &[(1., 1.), (9., 9.)]);
        let params = RoadmapParams {
            max_nodes: 0,
            cast_step: 1.0,
            seat_radius: 1.0,
            seed: 0,
        };
        let rm = generate_prm(&p, &params).unwrap();
        assert_eq!(rm.unconnected_seats(), &["s0".to_string(), "s1".to_string()]);
    }
}
