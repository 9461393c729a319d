use thiserror::Error;

use crate::model::ModelError;
use crate::poly::Mpd;

/// Failure of a solver, the engine or the sampler.
#[derive(Debug, Clone, Error)]
pub enum SolveError {
    /// A solver was called outside its precondition.
    #[error("misuse: {0}")]
    Misuse(String),
    /// The search exceeded its node budget. The best consistent sample seen
    /// so far is attached when there is one.
    #[error("node budget of {budget} exceeded")]
    NodeBudget { budget: u64, incumbent: Option<Box<Mpd>> },
    /// The instance has more worlds than an exponential solver may visit.
    #[error("{worlds} worlds exceed the budget of {cap}")]
    WorldBudget { worlds: u128, cap: u128 },
    /// Polynomial solving was requested but some part has no polynomial plan.
    #[error("no polynomial-time plan: {0}")]
    NoPolyPlan(String),
    /// The instance has no consistent sample.
    #[error("no consistent sample exists")]
    Infeasible,
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SolveError {
    pub fn misuse(message: impl Into<String>) -> Self {
        SolveError::Misuse(message.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, SolveError::NodeBudget { .. } | SolveError::WorldBudget { .. })
    }
}
