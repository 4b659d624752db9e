use super::{check_params, Deadline, SolveError, SolveResult};
use crate::model::{init_centrals, objective, relocate, Allocation, CentralSeatMap, ModelError, SaProblem, SolverParams};
use crate::rng::derive_seed;
use crate::transport::allocate_given_centrals;

/// Alternates an allocation phase and the location step until the centrals
/// stop moving, `max_iterations` is reached, or time runs out.
pub(crate) fn location_allocation(
    problem: &SaProblem,
    params: &SolverParams,
    mut centrals: CentralSeatMap,
    deadline: &Deadline,
    mut allocate: impl FnMut(&CentralSeatMap) -> Result<Allocation, ModelError>,
) -> Result<SolveResult, SolveError> {
    let mut trace = Vec::new();
    let mut iteration = 1;
    loop {
        let alloc = allocate(&centrals)?;
        let moved = relocate(problem, &alloc, &centrals);
        trace.push(objective(problem, &alloc, &moved)?);
        if moved == centrals || iteration >= params.max_iterations || deadline.expired() {
            return Ok(SolveResult {
                objective: *trace.last().expect("at least one iteration"),
                allocation: alloc,
                centrals: moved,
                optimal: false,
                iterations: iteration,
                elapsed: deadline.elapsed(),
                trace,
            });
        }
        centrals = moved;
        iteration += 1;
    }
}

/// Iterative clustering: `params.init` picks random (ICA) or k-means++
/// (ICA++) starting centrals.
pub fn ica_solve(problem: &SaProblem, params: &SolverParams) -> Result<SolveResult, SolveError> {
    check_params(params)?;
    problem.check_feasible()?;
    let deadline = Deadline::new(params.time_limit);
    if problem.n_teams() == 0 {
        return Ok(SolveResult::trivial(problem));
    }
    let init = init_centrals(problem, params.init, derive_seed(params.seed, "init"))?;
    location_allocation(problem, params, init, &deadline, |c| allocate_given_centrals(problem, c))
}
