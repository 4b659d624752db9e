//! Seat allocation engines.
//!
//! * [`ipsa_solve`]: exact branch-and-bound over central seat choices.
//! * [`ica_solve`]: location–allocation iterations from random or k-means++
//!   centrals, with an exact allocation phase.
//! * [`gsa_solve`]: the same outer loop with a regret-ordered greedy
//!   allocation phase.
//! * [`ls_improve`]: restricted exact re-solve around an incumbent's centrals.

mod gsa;
mod ica;
mod ipsa;
mod local_search;

pub use gsa::{greedy_allocation, gsa_solve};
pub use ica::ica_solve;
pub use ipsa::ipsa_solve;
pub use local_search::{candidate_centrals, ls_improve};

use crate::model::{Allocation, CentralSeatMap, InitMethod, ModelError, SaProblem, SolverParams};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid solver parameters: {0}")]
    Params(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub allocation: Allocation,
    pub centrals: CentralSeatMap,
    pub objective: f64,
    /// True only when the engine proved global optimality.
    pub optimal: bool,
    pub iterations: usize,
    pub elapsed: f64,
    /// Objective after each location step (location–allocation engines).
    pub trace: Vec<f64>,
}

impl SolveResult {
    pub(crate) fn trivial(problem: &SaProblem) -> Self {
        Self {
            allocation: Allocation::empty(problem.n_seats()),
            centrals: CentralSeatMap(Vec::new()),
            objective: 0.0,
            optimal: true,
            iterations: 0,
            elapsed: 0.0,
            trace: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ipsa")]
    Ipsa,
    #[serde(rename = "ica")]
    Ica,
    #[serde(rename = "ica++")]
    IcaPlusPlus,
    #[serde(rename = "gsa")]
    Gsa,
    #[serde(rename = "ica+ls")]
    IcaLs,
    #[serde(rename = "gsa+ls")]
    GsaLs,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Ipsa,
        Method::Ica,
        Method::IcaPlusPlus,
        Method::Gsa,
        Method::IcaLs,
        Method::GsaLs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ipsa => "ipsa",
            Method::Ica => "ica",
            Method::IcaPlusPlus => "ica++",
            Method::Gsa => "gsa",
            Method::IcaLs => "ica+ls",
            Method::GsaLs => "gsa+ls",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected one of ipsa, ica, ica++, gsa, ica+ls, gsa+ls)"))
    }
}

/// Runs one engine (or engine + local search) on a single SA instance.
pub fn solve(problem: &SaProblem, method: Method, params: &SolverParams) -> Result<SolveResult, SolveError> {
    let with_init = |init| SolverParams {
        init,
        ..params.clone()
    };
    match method {
        Method::Ipsa => ipsa_solve(problem, params),
        Method::Ica => ica_solve(problem, &with_init(InitMethod::Random)),
        Method::IcaPlusPlus => ica_solve(problem, &with_init(InitMethod::KMeansPP)),
        Method::Gsa => gsa_solve(problem, params),
        Method::IcaLs => {
            let start = ica_solve(problem, &with_init(InitMethod::Random))?;
            ls_improve(problem, &start, params)
        }
        Method::GsaLs => {
            let start = gsa_solve(problem, params)?;
            ls_improve(problem, &start, params)
        }
    }
}

pub(crate) struct Deadline {
    start: Instant,
    limit: Duration,
}

impl Deadline {
    pub(crate) fn new(seconds: f64) -> Self {
        Self {
            start: Instant::now(),
            limit: Duration::from_secs_f64(seconds.min(1e9)),
        }
    }

    pub(crate) fn expired(&self) -> bool {
        self.start.elapsed() >= self.limit
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

pub(crate) fn check_params(params: &SolverParams) -> Result<(), SolveError> {
    params.validate().map_err(SolveError::Params)
}
