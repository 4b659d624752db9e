use super::ica::location_allocation;
use super::{check_params, Deadline, SolveError, SolveResult};
use crate::floorplan::SeatKind;
use crate::model::{init_centrals, Allocation, CentralSeatMap, InitMethod, RegretMode, SaProblem, SolverParams};
use crate::rng::derive_seed;

/// Per-seat bookkeeping of the greedy allocation phase.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyState {
    pub regret: Vec<f64>,
    /// Nearest and second-nearest team (by distance to its central).
    pub nearest: Vec<(usize, usize)>,
    /// Seats in processing order.
    pub order: Vec<usize>,
    /// Remaining `[desks, offices]` per team after the pass.
    pub remaining: Vec<[usize; 2]>,
}

fn team_order(problem: &SaProblem, centrals: &CentralSeatMap, seat: usize) -> Vec<usize> {
    let mut teams: Vec<usize> = (0..problem.n_teams()).collect();
    teams.sort_by(|&a, &b| {
        problem
            .d(seat, centrals.seat(a))
            .total_cmp(&problem.d(seat, centrals.seat(b)))
            .then(a.cmp(&b))
    });
    teams
}

/// Regret-ordered greedy assignment for fixed centrals.
///
/// Seats are visited by decreasing regret; each goes to the nearest team
/// (by distance to that team's central) that still needs a seat of its kind.
/// With a single team both nearest centrals coincide and every regret is 0.
pub fn greedy_allocation(problem: &SaProblem, centrals: &CentralSeatMap, mode: RegretMode) -> (Allocation, GreedyState) {
    let n = problem.n_seats();
    let orders: Vec<Vec<usize>> = (0..n).map(|s| team_order(problem, centrals, s)).collect();
    let nearest: Vec<(usize, usize)> = orders
        .iter()
        .map(|o| (o[0], *o.get(1).unwrap_or(&o[0])))
        .collect();
    let regret: Vec<f64> = (0..n)
        .map(|s| {
            let (c1, c2) = nearest[s];
            let d1 = problem.d(s, centrals.seat(c1));
            let d2 = problem.d(s, centrals.seat(c2));
            match mode {
                RegretMode::Classic => d2 - d1,
                RegretMode::Inverted => d1 - d2,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| regret[b].total_cmp(&regret[a]).then(a.cmp(&b)));

    let mut remaining: Vec<[usize; 2]> = problem.teams().iter().map(|t| [t.desks, t.offices]).collect();
    let mut alloc = Allocation::empty(n);
    for &s in &order {
        let k = (problem.kind(s) == SeatKind::Office) as usize;
        if let Some(&t) = orders[s].iter().find(|&&t| remaining[t][k] > 0) {
            alloc.assign(s, Some(t));
            remaining[t][k] -= 1;
        }
    }
    let state = GreedyState {
        regret,
        nearest,
        order,
        remaining,
    };
    (alloc, state)
}

/// Greedy seat allocation inside the location–allocation loop, started from
/// k-means++ centrals.
pub fn gsa_solve(problem: &SaProblem, params: &SolverParams) -> Result<SolveResult, SolveError> {
    check_params(params)?;
    problem.check_feasible()?;
    let deadline = Deadline::new(params.time_limit);
    if problem.n_teams() == 0 {
        return Ok(SolveResult::trivial(problem));
    }
    let init = init_centrals(problem, InitMethod::KMeansPP, derive_seed(params.seed, "init"))?;
    location_allocation(problem, params, init, &deadline, |c| {
        Ok(greedy_allocation(problem, c, params.regret).0)
    })
}
