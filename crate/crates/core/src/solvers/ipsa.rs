//! Exact seat allocation by branch-and-bound over central seat choices.
//!
//! With centrals fixed, the remaining problem is a transportation problem
//! solved exactly by [`min_cost_assignment`]. The search assigns a central
//! to one team per level (largest demand first) and prunes with a relaxation
//! that lets every team take its nearest seats regardless of the others:
//! team `t` at candidate `k` costs at least the sum of its `d_t` nearest desk
//! distances and `o_t` nearest office distances from `k`. Teams with
//! identical requirements are interchangeable, so their centrals are forced
//! into increasing candidate order.

use super::{check_params, ica_solve, Deadline, SolveError, SolveResult};
use crate::floorplan::SeatKind;
use crate::model::{objective, CentralSeatMap, InitMethod, SaProblem, SolverParams};
use crate::transport::{allocate_given_centrals, min_cost_assignment};

/// Prune when the bound cannot beat the incumbent by more than this.
const PRUNE_TOL: f64 = 1e-10;

pub(crate) struct BnbOutcome {
    /// Best centrals found that beat the warm start, with their cost.
    pub improved: Option<(f64, CentralSeatMap)>,
    pub complete: bool,
    pub nodes: u64,
}

struct Search<'a> {
    problem: &'a SaProblem,
    candidates: &'a [usize],
    order: Vec<usize>,
    same_as_prev: Vec<bool>,
    relaxed: Vec<Vec<f64>>,
    cand_order: Vec<Vec<usize>>,
    suffix_min: Vec<f64>,
    best_cost: f64,
    best: Option<Vec<usize>>,
    nodes: u64,
    node_limit: Option<u64>,
    deadline: &'a Deadline,
    aborted: bool,
}

/// Exact cost of `centrals` (one seat per team): desks and offices are
/// assigned separately by minimum-cost transportation.
pub(crate) fn exact_cost(problem: &SaProblem, centrals: &[usize]) -> f64 {
    let mut total = 0.0;
    for kind in [SeatKind::Desk, SeatKind::Office] {
        let seats = problem.seats_of_kind(kind);
        let demands: Vec<usize> = problem.teams().iter().map(|t| t.demand(kind)).collect();
        let owner = min_cost_assignment(centrals.len(), &demands, &seats, |t, s| problem.d(s, centrals[t]))
            .expect("feasible");
        total += owner
            .iter()
            .zip(seats.iter())
            .filter_map(|(o, &s)| o.map(|t| problem.d(s, centrals[t])))
            .sum::<f64>();
    }
    total
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize, chosen: &mut Vec<usize>, used: &mut [bool], partial: f64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) || (self.nodes % 64 == 0 && self.deadline.expired()) {
            self.aborted = true;
            return;
        }
        let n_teams = self.order.len();
        if depth == n_teams {
            let mut centrals = vec![0; n_teams];
            for (pos, &ci) in chosen.iter().enumerate() {
                centrals[self.order[pos]] = self.candidates[ci];
            }
            let cost = exact_cost(self.problem, &centrals);
            if cost < self.best_cost - PRUNE_TOL {
                self.best_cost = cost;
                self.best = Some(centrals);
            }
            return;
        }
        let t = self.order[depth];
        let rest = self.suffix_min[depth + 1];
        let floor = if self.same_as_prev[depth] { chosen[depth - 1] + 1 } else { 0 };
        for idx in 0..self.cand_order[t].len() {
            let ci = self.cand_order[t][idx];
            let lb = self.relaxed[t][ci];
            if partial + lb + rest >= self.best_cost - PRUNE_TOL {
                break;
            }
            if used[ci] || ci < floor {
                continue;
            }
            used[ci] = true;
            chosen.push(ci);
            self.dfs(depth + 1, chosen, used, partial + lb);
            chosen.pop();
            used[ci] = false;
            if self.aborted {
                return;
            }
        }
    }
}

fn prefix_sums(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for x in v {
        acc += x;
        out.push(acc);
    }
    out
}

/// Searches central assignments drawn from `candidates` (sorted seat
/// indices, at least one per team) for a cost below `warm_cost`.
pub(crate) fn branch_and_bound(
    problem: &SaProblem,
    candidates: &[usize],
    warm_cost: f64,
    node_limit: Option<u64>,
    deadline: &Deadline,
) -> BnbOutcome {
    let n_teams = problem.n_teams();
    let desks = problem.seats_of_kind(SeatKind::Desk);
    let offices = problem.seats_of_kind(SeatKind::Office);

    let relaxed: Vec<Vec<f64>> = {
        let per_cand: Vec<(Vec<f64>, Vec<f64>)> = candidates
            .iter()
            .map(|&k| {
                (
                    prefix_sums(desks.iter().map(|&s| problem.d(s, k)).collect()),
                    prefix_sums(offices.iter().map(|&s| problem.d(s, k)).collect()),
                )
            })
            .collect();
        problem
            .teams()
            .iter()
            .map(|team| {
                per_cand
                    .iter()
                    .map(|(pd, po)| pd[team.desks] + po[team.offices])
                    .collect()
            })
            .collect()
    };
    let cand_order: Vec<Vec<usize>> = relaxed
        .iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..candidates.len()).collect();
            idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let min_relaxed: Vec<f64> = relaxed
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();

    let teams = problem.teams();
    let mut order: Vec<usize> = (0..n_teams).collect();
    order.sort_by(|&a, &b| {
        let key = |t: usize| (teams[t].desks + teams[t].offices, teams[t].offices);
        key(b).cmp(&key(a)).then(a.cmp(&b))
    });
    let same_as_prev: Vec<bool> = (0..n_teams)
        .map(|i| {
            i > 0
                && teams[order[i]].desks == teams[order[i - 1]].desks
                && teams[order[i]].offices == teams[order[i - 1]].offices
        })
        .collect();
    let mut suffix_min = vec![0.0; n_teams + 1];
    for i in (0..n_teams).rev() {
        suffix_min[i] = suffix_min[i + 1] + min_relaxed[order[i]];
    }

    let mut search = Search {
        problem,
        candidates,
        order,
        same_as_prev,
        relaxed,
        cand_order,
        suffix_min,
        best_cost: warm_cost,
        best: None,
        nodes: 0,
        node_limit,
        deadline,
        aborted: false,
    };
    let mut used = vec![false; candidates.len()];
    search.dfs(0, &mut Vec::with_capacity(n_teams), &mut used, 0.0);
    BnbOutcome {
        improved: search.best.map(|c| (search.best_cost, CentralSeatMap(c))),
        complete: !search.aborted,
        nodes: search.nodes,
    }
}

/// Exact solve. Warm-started from an ICA++ run; if the time or node limit
/// stops the search, the best solution found is returned with
/// `optimal = false`.
pub fn ipsa_solve(problem: &SaProblem, params: &SolverParams) -> Result<SolveResult, SolveError> {
    check_params(params)?;
    problem.check_feasible()?;
    let deadline = Deadline::new(params.time_limit);
    if problem.n_teams() == 0 {
        return Ok(SolveResult::trivial(problem));
    }
    let warm = ica_solve(
        problem,
        &SolverParams {
            init: InitMethod::KMeansPP,
            ..params.clone()
        },
    )?;
    let candidates: Vec<usize> = (0..problem.n_seats()).collect();
    let outcome = branch_and_bound(problem, &candidates, warm.objective, params.node_limit, &deadline);
    let mut result = match outcome.improved {
        Some((_, centrals)) => {
            let allocation = allocate_given_centrals(problem, &centrals)?;
            let objective = objective(problem, &allocation, &centrals)?;
            SolveResult {
                allocation,
                centrals,
                objective,
                optimal: false,
                iterations: 0,
                elapsed: 0.0,
                trace: Vec::new(),
            }
        }
        None => warm,
    };
    result.optimal = outcome.complete;
    result.iterations = outcome.nodes as usize;
    result.elapsed = deadline.elapsed();
    result.trace.clear();
    Ok(result)
}
