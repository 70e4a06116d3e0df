use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// No unassigned observation admits `rank` (1-based) in the greedy
    /// assignment, so the restricted space is empty.
    #[error("infeasible rank bounds: no observation can take rank {rank}")]
    InfeasibleBounds { rank: usize },

    #[error("restricted space has more than {limit} members")]
    Capacity { limit: usize },

    #[error("state has no feasible transposition (isolated node)")]
    IsolatedNode,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("permutation null has zero variance")]
    DegenerateNull,

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidDataset(msg.into())
    }
}
