//! Exhaustive reference solvers for tiny instances.
//!
//! These enumerate every feasible kind-respecting assignment directly and
//! share no code with the engines in [`crate::solvers`], so they can serve as
//! independent checks.

use crate::floorplan::SeatKind;
use crate::model::{Allocation, CentralSeatMap, SaProblem};

pub const SA_MAX_SEATS: usize = 12;
pub const MIQP_MAX_SEATS: usize = 10;
pub const MAX_TEAMS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub allocation: Allocation,
    pub centrals: Option<CentralSeatMap>,
    /// Feasible allocations examined.
    pub enumerated: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {seats} seats and {teams} teams; the oracle is limited to {max_seats} seats and {max_teams} teams")]
    TooLarge {
        seats: usize,
        teams: usize,
        max_seats: usize,
        max_teams: usize,
    },
    #[error("no feasible allocation exists")]
    Infeasible,
}

/// Calls `visit` with every owner vector that meets each team's desk and
/// office requirement exactly.
fn for_each_feasible(problem: &SaProblem, mut visit: impl FnMut(&[Option<usize>])) -> u64 {
    let n = problem.n_seats();
    let kinds: Vec<usize> = (0..n).map(|s| (problem.kind(s) == SeatKind::Office) as usize).collect();
    // suffix[s][k]: seats of kind k at positions >= s.
    let mut suffix = vec![[0usize; 2]; n + 1];
    for s in (0..n).rev() {
        suffix[s] = suffix[s + 1];
        suffix[s][kinds[s]] += 1;
    }
    let mut need: Vec<[usize; 2]> = problem.teams().iter().map(|t| [t.desks, t.offices]).collect();
    let mut owner = vec![None; n];
    let mut count = 0;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        s: usize,
        kinds: &[usize],
        suffix: &[[usize; 2]],
        need: &mut [[usize; 2]],
        owner: &mut [Option<usize>],
        count: &mut u64,
        visit: &mut dyn FnMut(&[Option<usize>]),
    ) {
        for k in 0..2 {
            let left: usize = need.iter().map(|n| n[k]).sum();
            if left > suffix[s][k] {
                return;
            }
        }
        if s == kinds.len() {
            *count += 1;
            visit(owner);
            return;
        }
        owner[s] = None;
        rec(s + 1, kinds, suffix, need, owner, count, visit);
        for t in 0..need.len() {
            if need[t][kinds[s]] > 0 {
                need[t][kinds[s]] -= 1;
                owner[s] = Some(t);
                rec(s + 1, kinds, suffix, need, owner, count, visit);
                need[t][kinds[s]] += 1;
            }
        }
        owner[s] = None;
    }

    rec(0, &kinds, &suffix, &mut need, &mut owner, &mut count, &mut visit);
    count
}

fn guard(problem: &SaProblem, max_seats: usize) -> Result<(), OracleError> {
    if problem.n_seats() > max_seats || problem.n_teams() > MAX_TEAMS {
        return Err(OracleError::TooLarge {
            seats: problem.n_seats(),
            teams: problem.n_teams(),
            max_seats,
            max_teams: MAX_TEAMS,
        });
    }
    Ok(())
}

/// Global optimum of the central-seat objective: every feasible allocation,
/// and for each the best distinct central seat per team.
pub fn brute_force_sa(problem: &SaProblem) -> Result<OracleResult, OracleError> {
    guard(problem, SA_MAX_SEATS)?;
    let n = problem.n_seats();
    let n_teams = problem.n_teams();
    let mut best: Option<(f64, Vec<Option<usize>>, Vec<usize>)> = None;
    let enumerated = for_each_feasible(problem, |owner| {
        // cost[t][k]: total distance from team t's seats to seat k.
        let mut cost = vec![vec![0.0; n]; n_teams];
        for (s, o) in owner.iter().enumerate() {
            if let Some(t) = *o {
                for k in 0..n {
                    cost[t][k] += problem.d(s, k);
                }
            }
        }
        // A best distinct choice uses one of each team's n_teams cheapest seats.
        let shortlist: Vec<Vec<usize>> = cost
            .iter()
            .map(|row| {
                let mut ks: Vec<usize> = (0..n).collect();
                ks.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
                ks.truncate(n_teams);
                ks
            })
            .collect();
        let mut pick = vec![0usize; n_teams];
        let mut choose = |pick: &[usize]| {
            for i in 0..n_teams {
                for j in 0..i {
                    if pick[i] == pick[j] {
                        return;
                    }
                }
            }
            let value: f64 = (0..n_teams).map(|t| cost[t][pick[t]]).sum();
            if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
                best = Some((value, owner.to_vec(), pick.to_vec()));
            }
        };
        enumerate_product(&shortlist, 0, &mut pick, &mut choose);
    });
    let (objective, owner, centrals) = best.ok_or(OracleError::Infeasible)?;
    Ok(OracleResult {
        objective,
        allocation: Allocation::from_owners(owner),
        centrals: Some(CentralSeatMap(centrals)),
        enumerated,
    })
}

fn enumerate_product(lists: &[Vec<usize>], depth: usize, pick: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if depth == lists.len() {
        f(pick);
        return;
    }
    for &k in &lists[depth] {
        pick[depth] = k;
        enumerate_product(lists, depth + 1, pick, f);
    }
}

/// Σ_t Σ_{k, j assigned to t} D(k, j) over ordered pairs.
pub fn miqp_objective(problem: &SaProblem, alloc: &Allocation) -> f64 {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); problem.n_teams()];
    for (s, o) in alloc.owners().iter().enumerate() {
        if let Some(t) = *o {
            members[t].push(s);
        }
    }
    members
        .iter()
        .map(|m| m.iter().flat_map(|&k| m.iter().map(move |&j| (k, j))).map(|(k, j)| problem.d(k, j)).sum::<f64>())
        .sum()
}

/// Exhaustive minimizer of [`miqp_objective`]; there are no centrals.
pub fn brute_force_miqp(problem: &SaProblem) -> Result<OracleResult, OracleError> {
    guard(problem, MIQP_MAX_SEATS)?;
    let mut best: Option<(f64, Vec<Option<usize>>)> = None;
    let enumerated = for_each_feasible(problem, |owner| {
        let alloc = Allocation::from_owners(owner.to_vec());
        let value = miqp_objective(problem, &alloc);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, owner.to_vec()));
        }
    });
    let (objective, owner) = best.ok_or(OracleError::Infeasible)?;
    Ok(OracleResult {
        objective,
        allocation: Allocation::from_owners(owner),
        centrals: None,
        enumerated,
    })
}
