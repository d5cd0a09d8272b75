//! Exact fair allocation of indivisible goods among agents with budgets.
//!
//! Agents have additive values and a budget; a bundle is only worth to an
//! agent what she can afford out of it. The crate provides the budget-aware
//! fairness predicates, exhaustive oracles (maximum Nash welfare, complete
//! EFx, leximin++ splits), an EFx procedure for two agents and a constant
//! factor Nash welfare EFx procedure for three agents. All arithmetic is over
//! arbitrary precision rationals.

pub mod certificate;
pub mod efx_three;
pub mod efx_two;
pub mod error;
pub mod fairness;
pub mod fixtures;
pub mod model;
pub mod oracles;
pub mod rational;
pub mod valuation;

pub use certificate::{all_hold, certify_two_agent, failures, Check};
pub use efx_three::{certify, efx_3a, AlphaParams, Branch, SetAside, ThreeAgentResult};
pub use efx_two::{
    build_feasibility_graph, efx_2a, select_perfect_matching, FeasibilityGraph, TwoAgentPath, TwoAgentResult,
    TwoAgentTrace,
};
pub use error::{Error, Result};
pub use fairness::{
    efx_envies, efx_envies_literal, efx_violation, envies, is_ef1, is_efx, is_envy_free, normalize,
    nsw_product, EfxViolation, WelfareKey,
};
pub use model::{
    allocation_values, bundle_cost, bundle_value, is_budget_feasible, Agent, AgentId, Allocation,
    Bundle, GoodId, Instance,
};
pub use oracles::{
    best_allocation_under_predicate, complete_efx_allocation, is_pareto_efficient,
    leximin_pp_split, max_nsw_allocation, max_nsw_allocation_unpruned, Predicate, SearchBudget,
    SplitPair,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use valuation::{knapsack_vmax, monopoly_value, KnapsackAnswer};
