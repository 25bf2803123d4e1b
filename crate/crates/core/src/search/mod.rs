//! Backward search, the breadth-first optimal-plan oracle and IW(k).

use alloc::vec::Vec;
use core::fmt;

use crate::model::{ActionId, ModelError, Problem, State};

mod bwd;
mod iw;
mod opt;

pub use bwd::{bwd, Bwd, BwdStats, DEFAULT_BWD_BUDGET};
pub use iw::{iw, IwStats};
pub use opt::{opt_search, OptSearch, DEFAULT_STATE_CAP};

pub type Plan = Vec<ActionId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchError {
    /// The configured expansion budget ran out before a decision was reached.
    DepthBudgetExceeded { budget: usize },
    /// More states (or plans) than the cap allows.
    StateSpaceCapExceeded { cap: usize },
    /// IW pruned every frontier node: the instance needs a larger k.
    Exhausted,
    PermutationCapExceeded { arity: usize, cap: usize },
    /// Recursive plan extraction made more calls than allowed.
    RecursionBudgetExceeded { budget: usize },
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::DepthBudgetExceeded { budget } => write!(f, "budget of {budget} expansions exceeded"),
            SearchError::StateSpaceCapExceeded { cap } => write!(f, "state-space cap of {cap} exceeded"),
            SearchError::Exhausted => write!(f, "novelty-pruned frontier exhausted"),
            SearchError::PermutationCapExceeded { arity, cap } => {
                write!(f, "{arity} preconditions exceed the permutation cap {cap}")
            }
            SearchError::RecursionBudgetExceeded { budget } => write!(f, "recursion budget of {budget} calls exceeded"),
        }
    }
}

/// Failing step of an invalid plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayError {
    pub step: usize,
    pub error: ModelError,
}

/// States visited by `plan` from `s0`, including `s0`.
pub fn replay(problem: &Problem, s0: &State, plan: &[ActionId]) -> Result<Vec<State>, ReplayError> {
    let mut states = Vec::with_capacity(plan.len() + 1);
    states.push(s0.clone());
    for (step, &a) in plan.iter().enumerate() {
        let next = problem.apply(states.last().unwrap(), a).map_err(|error| ReplayError { step, error })?;
        states.push(next);
    }
    Ok(states)
}

/// Plan replays from `s0` and ends in a state containing the goal atom.
pub fn plan_achieves(problem: &Problem, s0: &State, plan: &[ActionId], goal: &[u32]) -> bool {
    replay(problem, s0, plan).is_ok_and(|st| st.last().unwrap().contains_all(goal))
}
