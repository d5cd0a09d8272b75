use crate::model::{AgentId, GoodId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown good id {0}")]
    UnknownGood(GoodId),
    #[error("unknown agent id {0}")]
    UnknownAgent(AgentId),
    #[error("agent {agent} has {found} values, expected one per good ({expected})")]
    ValueCountMismatch {
        agent: AgentId,
        expected: usize,
        found: usize,
    },
    #[error("negative {what}")]
    Negative { what: String },
    #[error("good {0} appears in more than one bundle")]
    OverlappingBundles(GoodId),
    #[error("good {0} is allocated but lies outside the allocation scope")]
    OutOfScope(GoodId),
    #[error("allocation has {found} bundles but the instance has {expected} agents")]
    BundleCountMismatch { expected: usize, found: usize },
    #[error("expected {expected} agents, found {found}")]
    AgentCount { expected: usize, found: usize },
    #[error("degenerate optimum: agent {0} has zero value in the reference allocation")]
    DegenerateOptimum(AgentId),
    #[error("search budget exhausted after {0} assignments")]
    SearchBudgetExhausted(u64),
    #[error("no complete EFx allocation exists for pool {pool}; instance: {instance}")]
    ExistenceViolation { pool: String, instance: String },
    #[error("preprocess infeasible: no set-aside matching satisfies the optimum constraint")]
    PreprocessInfeasible,
    #[error("alpha {0} is outside the permitted range")]
    AlphaOutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
