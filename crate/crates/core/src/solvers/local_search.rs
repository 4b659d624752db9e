use super::ipsa::{branch_and_bound, exact_cost};
use super::{check_params, Deadline, SolveError, SolveResult};
use crate::model::{objective, validate, CentralSeatMap, SaProblem, SolverParams};
use crate::transport::allocate_given_centrals;

/// Incumbent centrals plus the `neighbors` nearest seats (by D, ties by
/// index) of each, sorted and deduplicated.
pub fn candidate_centrals(problem: &SaProblem, centrals: &[usize], neighbors: usize) -> Vec<usize> {
    let mut out: Vec<usize> = centrals.to_vec();
    for &c in centrals {
        out.extend(problem.nearest_seats(c).into_iter().take(neighbors));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Best-improvement descent that moves one team's central at a time within
/// `candidates`. Each exact evaluation counts against `budget`.
fn swap_descent(
    problem: &SaProblem,
    candidates: &[usize],
    centrals: &mut [usize],
    cost: &mut f64,
    budget: &mut Option<u64>,
    deadline: &Deadline,
) {
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for t in 0..centrals.len() {
            for &k in candidates {
                if centrals.contains(&k) {
                    continue;
                }
                if budget.is_some_and(|b| b == 0) || deadline.expired() {
                    break;
                }
                if let Some(b) = budget.as_mut() {
                    *b -= 1;
                }
                let old = centrals[t];
                centrals[t] = k;
                let c = exact_cost(problem, centrals);
                centrals[t] = old;
                if c < best.map_or(*cost, |b| b.0) - 1e-10 {
                    best = Some((c, t, k));
                }
            }
        }
        match best {
            Some((c, t, k)) => {
                centrals[t] = k;
                *cost = c;
            }
            None => return,
        }
    }
}

/// Re-solves the exact model with centrals restricted to the incumbent's
/// neighbourhood, warm-started from the incumbent. Never returns a worse
/// objective than `incumbent`.
///
/// The warm start is the incumbent's centrals with an exact re-allocation,
/// improved by single-team central moves; branch-and-bound then spends what
/// is left of the node budget proving or improving it.
pub fn ls_improve(problem: &SaProblem, incumbent: &SolveResult, params: &SolverParams) -> Result<SolveResult, SolveError> {
    check_params(params)?;
    let deadline = Deadline::new(params.time_limit);
    if problem.n_teams() == 0 {
        return Ok(incumbent.clone());
    }
    let violations = validate(problem, &incumbent.allocation);
    if let Some(v) = violations.into_iter().next() {
        return Err(SolveError::Params(format!("incumbent is infeasible: {v}")));
    }
    let candidates = candidate_centrals(problem, incumbent.centrals.as_slice(), params.neighbors);
    let mut centrals = incumbent.centrals.0.clone();
    let mut cost = exact_cost(problem, &centrals);
    let mut budget = params.node_limit;
    swap_descent(problem, &candidates, &mut centrals, &mut cost, &mut budget, &deadline);
    let outcome = branch_and_bound(problem, &candidates, cost, budget, &deadline);
    if let Some((c, found)) = outcome.improved {
        cost = c;
        centrals = found.0;
    }
    let mut result = incumbent.clone();
    if cost < incumbent.objective {
        let centrals = CentralSeatMap(centrals);
        let allocation = allocate_given_centrals(problem, &centrals)?;
        let value = objective(problem, &allocation, &centrals)?;
        if value < incumbent.objective {
            result.allocation = allocation;
            result.centrals = centrals;
            result.objective = value;
            result.trace.push(value);
        }
    }
    result.optimal = incumbent.optimal;
    result.elapsed = incumbent.elapsed + deadline.elapsed();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_support::line_problem;
    use crate::model::{InitMethod, Team};
    use crate::solvers::{ica_solve, ipsa_solve};

    #[test]
    fn candidates_include_incumbents_and_neighbors() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let teams: Vec<Team> = (0..4).map(|i| Team::new(format!("t{i}"), 5, 0)).collect();
        let p = line_problem(&xs, &[], teams);
        let centrals = [0, 10, 20, 39];
        let c = candidate_centrals(&p, &centrals, 5);
        assert!(centrals.iter().all(|x| c.contains(x)));
        assert!(c.len() <= 5 * 4 + 4);
        assert_eq!(candidate_centrals(&p, &[0], 2), vec![0, 1, 2]);
    }

    #[test]
    fn optimal_incumbent_is_unchanged() {
        let p = line_problem(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0], &[], vec![Team::new("a", 3, 0), Team::new("b", 3, 0)]);
        let best = ipsa_solve(&p, &SolverParams::default()).unwrap();
        let after = ls_improve(&p, &best, &SolverParams::default()).unwrap();
        assert_eq!(after.objective, best.objective);
        assert_eq!(after.allocation, best.allocation);
    }

    #[test]
    fn improves_a_poor_start() {
        // Two clusters; a one-iteration random-start ICA leaves both centrals
        // in one cluster on some seed, and local search repairs it.
        let p = line_problem(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 20.0, 21.0, 22.0, 23.0, 24.0],
            &[],
            vec![Team::new("a", 5, 0), Team::new("b", 5, 0)],
        );
        let opt = ipsa_solve(&p, &SolverParams::default()).unwrap().objective;
        let mut improved_any = false;
        for seed in 0..50 {
            let params = SolverParams {
                seed,
                init: InitMethod::Random,
                max_iterations: 1,
                ..Default::default()
            };
            let start = ica_solve(&p, &params).unwrap();
            let after = ls_improve(&p, &start, &params).unwrap();
            assert!(after.objective <= start.objective);
            if start.objective > opt + 1e-9 {
                assert!(after.objective < start.objective);
                assert!((after.objective - opt).abs() < 1e-9);
                improved_any = true;
            }
        }
        assert!(improved_any);
    }
}
