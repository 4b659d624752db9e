//! Seat allocation problem types and the quantities every engine shares.
//!
//! Seats and teams are stored sorted by id, so index order is lexicographic
//! id order and every "ties by smallest id" rule reduces to "ties by smallest
//! index". Results are therefore independent of input ordering.

use crate::distance::DistanceMatrix;
use crate::floorplan::SeatKind;
use crate::rng::rng_from_seed;
use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Team {
    pub id: String,
    pub desks: usize,
    pub offices: usize,
}

impl Team {
    pub fn new(id: impl Into<String>, desks: usize, offices: usize) -> Self {
        Self {
            id: id.into(),
            desks,
            offices,
        }
    }

    pub fn demand(&self, kind: SeatKind) -> usize {
        match kind {
            SeatKind::Desk => self.desks,
            SeatKind::Office => self.offices,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaSeat {
    pub id: String,
    pub kind: SeatKind,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("seat id {0:?} appears more than once")]
    DuplicateSeat(String),
    #[error("team id {0:?} appears more than once")]
    DuplicateTeam(String),
    #[error("team {0:?} requires no seats")]
    EmptyTeam(String),
    #[error("distance matrix has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("seat {0:?} is missing from the distance matrix")]
    UnknownSeat(String),
    #[error("{kind} demand {demand} exceeds supply {supply}")]
    Infeasible { kind: SeatKind, demand: usize, supply: usize },
    #[error("{teams} teams but only {seats} seats")]
    MoreTeamsThanSeats { teams: usize, seats: usize },
    #[error("central seat map has {got} entries for {teams} teams")]
    MissingCentral { teams: usize, got: usize },
    #[error("team {0:?} has no assigned seats")]
    NoAssignedSeats(String),
}

/// One seat allocation instance: seats with kinds, teams, pairwise distances.
#[derive(Clone, Debug)]
pub struct SaProblem {
    seats: Vec<SaSeat>,
    teams: Vec<Team>,
    dist: Vec<f64>,
}

impl SaProblem {
    /// `dist` is row-major in the order of `seats` as given.
    pub fn new(seats: Vec<SaSeat>, teams: Vec<Team>, dist: Vec<f64>) -> Result<Self, ModelError> {
        let n = seats.len();
        if dist.len() != n * n {
            return Err(ModelError::DimensionMismatch {
                expected: n * n,
                got: dist.len(),
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| seats[a].id.cmp(&seats[b].id));
        for w in order.windows(2) {
            if seats[w[0]].id == seats[w[1]].id {
                return Err(ModelError::DuplicateSeat(seats[w[0]].id.clone()));
            }
        }
        let mut sorted_dist = vec![0.0; n * n];
        for (i, &oi) in order.iter().enumerate() {
            for (j, &oj) in order.iter().enumerate() {
                sorted_dist[i * n + j] = dist[oi * n + oj];
            }
        }
        let sorted_seats = order.iter().map(|&i| seats[i].clone()).collect();
        Self::from_sorted(sorted_seats, teams, sorted_dist)
    }

    /// Seats taken from `matrix`, restricted to `seats` (any order).
    pub fn from_matrix(matrix: &DistanceMatrix, seats: &[SaSeat], teams: Vec<Team>) -> Result<Self, ModelError> {
        let idx: Vec<usize> = seats
            .iter()
            .map(|s| matrix.index_of(&s.id).ok_or_else(|| ModelError::UnknownSeat(s.id.clone())))
            .collect::<Result<_, _>>()?;
        let n = seats.len();
        let mut dist = vec![0.0; n * n];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                dist[a * n + b] = matrix.get(i, j);
            }
        }
        Self::new(seats.to_vec(), teams, dist)
    }

    fn from_sorted(seats: Vec<SaSeat>, mut teams: Vec<Team>, dist: Vec<f64>) -> Result<Self, ModelError> {
        teams.sort_by(|a, b| a.id.cmp(&b.id));
        for w in teams.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateTeam(w[0].id.clone()));
            }
        }
        if let Some(t) = teams.iter().find(|t| t.desks + t.offices == 0) {
            return Err(ModelError::EmptyTeam(t.id.clone()));
        }
        Ok(Self { seats, teams, dist })
    }

    /// Sub-problem over a subset of this problem's seats (indices), with new
    /// teams. Index order is preserved, so the subset stays id-sorted.
    pub fn restrict(&self, seat_indices: &[usize], teams: Vec<Team>) -> Result<Self, ModelError> {
        let mut idx = seat_indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let n = idx.len();
        let mut dist = vec![0.0; n * n];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                dist[a * n + b] = self.d(i, j);
            }
        }
        let seats = idx.iter().map(|&i| self.seats[i].clone()).collect();
        Self::from_sorted(seats, teams, dist)
    }

    pub fn seats(&self) -> &[SaSeat] {
        &self.seats
    }

    pub fn teams(&self) -> &[Team] {
        &self.teams
    }

    pub fn n_seats(&self) -> usize {
        self.seats.len()
    }

    pub fn n_teams(&self) -> usize {
        self.teams.len()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.seats.len() + j]
    }

    pub fn kind(&self, seat: usize) -> SeatKind {
        self.seats[seat].kind
    }

    pub fn seat_index(&self, id: &str) -> Option<usize> {
        self.seats.binary_search_by(|s| s.id.as_str().cmp(id)).ok()
    }

    pub fn team_index(&self, id: &str) -> Option<usize> {
        self.teams.binary_search_by(|t| t.id.as_str().cmp(id)).ok()
    }

    pub fn seats_of_kind(&self, kind: SeatKind) -> Vec<usize> {
        (0..self.seats.len()).filter(|&i| self.seats[i].kind == kind).collect()
    }

    pub fn supply(&self, kind: SeatKind) -> usize {
        self.seats.iter().filter(|s| s.kind == kind).count()
    }

    pub fn demand(&self, kind: SeatKind) -> usize {
        self.teams.iter().map(|t| t.demand(kind)).sum()
    }

    pub fn check_feasible(&self) -> Result<(), ModelError> {
        for kind in [SeatKind::Desk, SeatKind::Office] {
            let (demand, supply) = (self.demand(kind), self.supply(kind));
            if demand > supply {
                return Err(ModelError::Infeasible { kind, demand, supply });
            }
        }
        Ok(())
    }

    /// Seat indices sorted by distance from `from` (ties by index), excluding `from`.
    pub fn nearest_seats(&self, from: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.seats.len()).filter(|&i| i != from).collect();
        v.sort_by(|&a, &b| self.d(from, a).total_cmp(&self.d(from, b)).then(a.cmp(&b)));
        v
    }
}

/// Seat → team map (by index); `None` means vacant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    owner: Vec<Option<usize>>,
}

impl Allocation {
    pub fn empty(n_seats: usize) -> Self {
        Self {
            owner: vec![None; n_seats],
        }
    }

    pub fn from_owners(owner: Vec<Option<usize>>) -> Self {
        Self { owner }
    }

    pub fn owner(&self, seat: usize) -> Option<usize> {
        self.owner[seat]
    }

    pub fn owners(&self) -> &[Option<usize>] {
        &self.owner
    }

    pub fn assign(&mut self, seat: usize, team: Option<usize>) {
        self.owner[seat] = team;
    }

    pub fn seats_of(&self, team: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&s| self.owner[s] == Some(team)).collect()
    }

    pub fn assigned_count(&self) -> usize {
        self.owner.iter().filter(|o| o.is_some()).count()
    }

    /// `(seat id, team id)` pairs in seat order.
    pub fn pairs(&self, problem: &SaProblem) -> Vec<(String, String)> {
        self.owner
            .iter()
            .enumerate()
            .filter_map(|(s, t)| t.map(|t| (problem.seats[s].id.clone(), problem.teams[t].id.clone())))
            .collect()
    }
}

/// Team → central seat (by index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralSeatMap(pub Vec<usize>);

impl CentralSeatMap {
    pub fn seat(&self, team: usize) -> usize {
        self.0[team]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMethod {
    Random,
    #[serde(rename = "kmeans++")]
    KMeansPP,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegretMode {
    /// Second-nearest minus nearest distance, processed in descending order.
    #[default]
    Classic,
    /// Nearest minus second-nearest: the sign-flipped regret, kept for comparison.
    Inverted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    pub max_iterations: usize,
    /// Seconds per solve call.
    pub time_limit: f64,
    pub seed: u64,
    /// Nearest-neighbour count per central for local search candidates.
    pub neighbors: usize,
    pub init: InitMethod,
    #[serde(default)]
    pub regret: RegretMode,
    /// Deterministic cap on branch-and-bound nodes; `None` means unbounded.
    #[serde(default)]
    pub node_limit: Option<u64>,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            time_limit: 600.0,
            seed: 0,
            neighbors: 5,
            init: InitMethod::KMeansPP,
            regret: RegretMode::Classic,
            node_limit: None,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_iterations < 1 {
            return Err("max_iterations must be at least 1".into());
        }
        if self.neighbors < 1 {
            return Err("neighbors (s_n) must be at least 1".into());
        }
        if !(self.time_limit > 0.0) {
            return Err("time_limit must be positive".into());
        }
        Ok(())
    }
}

/// Σ_t Σ_{s assigned to t} D(s, central_t).
pub fn objective(problem: &SaProblem, alloc: &Allocation, centrals: &CentralSeatMap) -> Result<f64, ModelError> {
    if centrals.0.len() != problem.n_teams() {
        return Err(ModelError::MissingCentral {
            teams: problem.n_teams(),
            got: centrals.0.len(),
        });
    }
    Ok(alloc
        .owner
        .iter()
        .enumerate()
        .filter_map(|(s, t)| t.map(|t| problem.d(s, centrals.seat(t))))
        .sum())
}

/// The assigned seat with the smallest total distance to the team's other
/// assigned seats (ties by index).
pub fn best_central_seat(problem: &SaProblem, team: usize, alloc: &Allocation) -> Result<usize, ModelError> {
    let seats = alloc.seats_of(team);
    medoid(problem, &seats).ok_or_else(|| ModelError::NoAssignedSeats(problem.teams[team].id.clone()))
}

pub(crate) fn medoid(problem: &SaProblem, seats: &[usize]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for &c in seats {
        let total: f64 = seats.iter().map(|&i| problem.d(i, c)).sum();
        if best.is_none_or(|(b, _)| total < b) {
            best = Some((total, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Location step for every team; teams without seats keep `fallback`.
pub fn relocate(problem: &SaProblem, alloc: &Allocation, fallback: &CentralSeatMap) -> CentralSeatMap {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); problem.n_teams()];
    for (s, t) in alloc.owner.iter().enumerate() {
        if let Some(t) = t {
            members[*t].push(s);
        }
    }
    CentralSeatMap(
        members
            .iter()
            .enumerate()
            .map(|(t, m)| medoid(problem, m).unwrap_or(fallback.seat(t)))
            .collect(),
    )
}

/// k-means++ selection weights: squared distance from each seat to its
/// nearest already-chosen seat; chosen seats get weight zero.
pub fn kmeanspp_weights(problem: &SaProblem, chosen: &[usize]) -> Vec<f64> {
    (0..problem.n_seats())
        .map(|s| {
            if chosen.contains(&s) {
                0.0
            } else {
                let d = chosen.iter().map(|&c| problem.d(s, c)).fold(f64::INFINITY, f64::min);
                d * d
            }
        })
        .collect()
}

/// Picks one distinct central seat per team (team index order).
pub fn init_centrals(problem: &SaProblem, method: InitMethod, seed: u64) -> Result<CentralSeatMap, ModelError> {
    let (n, k) = (problem.n_seats(), problem.n_teams());
    if k > n {
        return Err(ModelError::MoreTeamsThanSeats { teams: k, seats: n });
    }
    let mut rng = rng_from_seed(seed);
    let chosen = match method {
        InitMethod::Random => sample(&mut rng, n, k).into_vec(),
        InitMethod::KMeansPP => {
            let mut chosen: Vec<usize> = Vec::with_capacity(k);
            if k > 0 {
                chosen.push(rng.gen_range(0..n));
            }
            while chosen.len() < k {
                let weights = kmeanspp_weights(problem, &chosen);
                let open: Vec<usize> = (0..n).filter(|s| !chosen.contains(s)).collect();
                let infinite: Vec<usize> = open.iter().copied().filter(|&s| weights[s].is_infinite()).collect();
                let total: f64 = open.iter().map(|&s| weights[s]).sum();
                let pick = if !infinite.is_empty() {
                    infinite[rng.gen_range(0..infinite.len())]
                } else if total > 0.0 {
                    let mut r = rng.gen::<f64>() * total;
                    let mut pick = None;
                    for &s in &open {
                        if weights[s] > 0.0 {
                            pick = Some(s);
                            if r < weights[s] {
                                break;
                            }
                            r -= weights[s];
                        }
                    }
                    pick.expect("positive total implies a positive weight")
                } else {
                    open[rng.gen_range(0..open.len())]
                };
                chosen.push(pick);
            }
            chosen
        }
    };
    Ok(CentralSeatMap(chosen))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    #[error("team {team:?} has {actual} desks, requires {required}")]
    DeskCount { team: String, required: usize, actual: usize },
    #[error("team {team:?} has {actual} offices, requires {required}")]
    OfficeCount { team: String, required: usize, actual: usize },
    #[error("seat {seat:?} is assigned to more than one team")]
    DuplicateAssignment { seat: String },
    #[error("unknown seat {seat:?}")]
    UnknownSeat { seat: String },
    #[error("unknown team {team:?}")]
    UnknownTeam { team: String },
}

/// Constraint check of an allocation against the team requirements.
pub fn validate(problem: &SaProblem, alloc: &Allocation) -> Vec<Violation> {
    let mut counts = vec![[0usize; 2]; problem.n_teams()];
    for (s, t) in alloc.owner.iter().enumerate() {
        if let Some(t) = *t {
            counts[t][(problem.kind(s) == SeatKind::Office) as usize] += 1;
        }
    }
    let mut out = Vec::new();
    for (t, team) in problem.teams.iter().enumerate() {
        if counts[t][0] != team.desks {
            out.push(Violation::DeskCount {
                team: team.id.clone(),
                required: team.desks,
                actual: counts[t][0],
            });
        }
        if counts[t][1] != team.offices {
            out.push(Violation::OfficeCount {
                team: team.id.clone(),
                required: team.offices,
                actual: counts[t][1],
            });
        }
    }
    out
}

/// Validates an external `(seat id, team id)` list, which unlike
/// [`Allocation`] can express double assignments.
pub fn validate_pairs(problem: &SaProblem, pairs: &[(String, String)]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut alloc = Allocation::empty(problem.n_seats());
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (seat, team) in pairs {
        let Some(s) = problem.seat_index(seat) else {
            out.push(Violation::UnknownSeat { seat: seat.clone() });
            continue;
        };
        let Some(t) = problem.team_index(team) else {
            out.push(Violation::UnknownTeam { team: team.clone() });
            continue;
        };
        let n = seen.entry(s).or_insert(0);
        *n += 1;
        if *n == 2 {
            out.push(Violation::DuplicateAssignment { seat: seat.clone() });
        }
        alloc.assign(s, Some(t));
    }
    if out.is_empty() {
        out = validate(problem, &alloc);
    }
    out
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Seats on the x axis at the given coordinates with D = |Δx|.
    pub fn line_problem(desks: &[f64], offices: &[f64], teams: Vec<Team>) -> SaProblem {
        let mut seats = Vec::new();
        let mut xs = Vec::new();
        for (i, &x) in desks.iter().enumerate() {
            seats.push(SaSeat {
                id: format!("d{i:02}"),
                kind: SeatKind::Desk,
            });
            xs.push(x);
        }
        for (i, &x) in offices.iter().enumerate() {
            seats.push(SaSeat {
                id: format!("o{i:02}"),
                kind: SeatKind::Office,
            });
            xs.push(x);
        }
        let n = xs.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = (xs[i] - xs[j]).abs();
            }
        }
        SaProblem::new(seats, teams, dist).unwrap()
    }
}
