//! Exact seat-to-team assignment with fixed per-team costs.
//!
//! Each team needs a fixed number of seats, each seat serves at most one
//! team, and assigning seat `s` to team `t` costs `cost(t, s)`. This is a
//! transportation problem; it is solved by successive shortest paths, one
//! seat at a time. Seats have unit capacity, so residual paths are condensed
//! onto team nodes: an arc `a → b` means "team `a` takes one of `b`'s seats",
//! priced at the cheapest such seat's cost difference, and a path ends with
//! its last team taking a free seat.

use crate::floorplan::SeatKind;
use crate::model::{Allocation, CentralSeatMap, ModelError, SaProblem};
use std::collections::VecDeque;

/// Bellman–Ford relaxations must improve by more than this.
const RELAX_TOL: f64 = 1e-9;

/// Minimum-cost assignment of `seats` (opaque ids) to teams with the given
/// `demands`. Returns the owning team per entry of `seats`, or `None` when
/// total demand exceeds the seat count.
pub fn min_cost_assignment(
    n_teams: usize,
    demands: &[usize],
    seats: &[usize],
    cost: impl Fn(usize, usize) -> f64,
) -> Option<Vec<Option<usize>>> {
    assert_eq!(demands.len(), n_teams);
    let total: usize = demands.iter().sum();
    if total > seats.len() {
        return None;
    }
    let n = seats.len();
    // c[t][k]: cost of the k-th seat for team t.
    let c: Vec<Vec<f64>> = (0..n_teams)
        .map(|t| seats.iter().map(|&s| cost(t, s)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut remaining = demands.to_vec();

    let mut steal = vec![vec![(f64::INFINITY, usize::MAX); n_teams]; n_teams];
    let mut dist = vec![f64::INFINITY; n_teams];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n_teams];
    let mut in_queue = vec![false; n_teams];

    for _ in 0..total {
        for row in steal.iter_mut() {
            row.fill((f64::INFINITY, usize::MAX));
        }
        let mut free_best = vec![(f64::INFINITY, usize::MAX); n_teams];
        for k in 0..n {
            match owner[k] {
                Some(b) => {
                    for a in 0..n_teams {
                        if a != b {
                            let delta = c[a][k] - c[b][k];
                            if delta < steal[a][b].0 {
                                steal[a][b] = (delta, k);
                            }
                        }
                    }
                }
                None => {
                    for a in 0..n_teams {
                        if c[a][k] < free_best[a].0 {
                            free_best[a] = (c[a][k], k);
                        }
                    }
                }
            }
        }

        dist.fill(f64::INFINITY);
        pred.fill(None);
        in_queue.fill(false);
        let mut queue = VecDeque::new();
        for t in 0..n_teams {
            if remaining[t] > 0 {
                dist[t] = 0.0;
                queue.push_back(t);
                in_queue[t] = true;
            }
        }
        let mut relaxations = 0usize;
        let budget = n_teams * n_teams * n_teams + n_teams + 1;
        while let Some(a) = queue.pop_front() {
            in_queue[a] = false;
            for b in 0..n_teams {
                let (delta, k) = steal[a][b];
                if k == usize::MAX {
                    continue;
                }
                let nd = dist[a] + delta;
                if nd < dist[b] - RELAX_TOL {
                    dist[b] = nd;
                    pred[b] = Some((a, k));
                    if !in_queue[b] {
                        queue.push_back(b);
                        in_queue[b] = true;
                    }
                }
            }
            relaxations += 1;
            assert!(relaxations <= budget, "negative cycle in assignment residual graph");
        }

        let mut end: Option<(f64, usize)> = None;
        for t in 0..n_teams {
            if dist[t].is_finite() && free_best[t].1 != usize::MAX {
                let total = dist[t] + free_best[t].0;
                if end.is_none_or(|(best, _)| total < best) {
                    end = Some((total, t));
                }
            }
        }
        let (_, mut cur) = end.expect("supply covers demand, so a free seat is reachable");
        owner[free_best[cur].1] = Some(cur);
        let mut hops = 0;
        while let Some((a, k)) = pred[cur] {
            owner[k] = Some(a);
            cur = a;
            hops += 1;
            assert!(hops <= n_teams, "cyclic predecessor chain");
        }
        remaining[cur] -= 1;
    }
    Some(owner)
}

/// Optimal allocation of seats to teams for fixed central seats, minimizing
/// Σ D(seat, central of its team). Desks and offices are independent
/// sub-problems.
///
/// When a team's central seat is of a kind the team needs but ended up with
/// another team (or vacant), it is swapped back if that does not increase
/// the cost; under a metric D this never does, and it keeps each central
/// inside its own team, which the location step relies on.
pub fn allocate_given_centrals(problem: &SaProblem, centrals: &CentralSeatMap) -> Result<Allocation, ModelError> {
    problem.check_feasible()?;
    if centrals.0.len() != problem.n_teams() {
        return Err(ModelError::MissingCentral {
            teams: problem.n_teams(),
            got: centrals.0.len(),
        });
    }
    let mut alloc = Allocation::empty(problem.n_seats());
    for kind in [SeatKind::Desk, SeatKind::Office] {
        let seats = problem.seats_of_kind(kind);
        let demands: Vec<usize> = problem.teams().iter().map(|t| t.demand(kind)).collect();
        let owner = min_cost_assignment(problem.n_teams(), &demands, &seats, |t, s| problem.d(s, centrals.seat(t)))
            .expect("feasibility checked above");
        for (k, &s) in seats.iter().enumerate() {
            alloc.assign(s, owner[k]);
        }
    }
    pull_centrals_home(problem, centrals, &mut alloc);
    Ok(alloc)
}

fn pull_centrals_home(problem: &SaProblem, centrals: &CentralSeatMap, alloc: &mut Allocation) {
    for t in 0..problem.n_teams() {
        let c = centrals.seat(t);
        let kind = problem.kind(c);
        if problem.teams()[t].demand(kind) == 0 || alloc.owner(c) == Some(t) {
            continue;
        }
        // The team's member of that kind farthest from its central.
        let Some(j) = (0..problem.n_seats())
            .filter(|&s| alloc.owner(s) == Some(t) && problem.kind(s) == kind)
            .fold(None, |best: Option<usize>, s| match best {
                Some(b) if problem.d(b, c) >= problem.d(s, c) => Some(b),
                _ => Some(s),
            })
        else {
            continue;
        };
        match alloc.owner(c) {
            None => {
                alloc.assign(j, None);
                alloc.assign(c, Some(t));
            }
            Some(u) => {
                let cu = centrals.seat(u);
                let old = problem.d(c, cu) + problem.d(j, c);
                let new = problem.d(j, cu);
                if new <= old + RELAX_TOL {
                    alloc.assign(j, Some(u));
                    alloc.assign(c, Some(t));
                }
            }
        }
    }
}
