//! Three agents sharing one budget: trim the optimum until everything left is
//! affordable to everyone, split it EFx, then remove envy cycles.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{AgentId, Allocation, Bundle, GoodId, Instance};
use crate::oracles::{complete_efx_allocation, max_nsw_allocation, SearchBudget};
use crate::rational::{int, Rational};
use crate::valuation::vmax;

const MAX_ENVY_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualBudgetOutcome {
    /// Nash optimum over the pool under the common budget.
    pub opt_on_pool: Allocation,
    /// Each agent's optimum bundle after trimming to a third of the budget.
    pub trimmed: Vec<Bundle>,
    /// Goods removed during trimming, per agent, in removal order.
    pub trimmed_away: Vec<Vec<GoodId>>,
    /// The complete EFx allocation of the trimmed goods.
    pub complete: Allocation,
    /// Bundle exchanges performed to remove envy cycles, as agent lists.
    pub exchanges: Vec<Vec<AgentId>>,
    pub allocation: Allocation,
}

/// Removes the agent's lowest value-per-cost good until the bundle costs at
/// most `cap`. Zero-cost goods are never removed; ties go to the lowest id.
pub fn trim_to_cost(instance: &Instance, agent: AgentId, bundle: &Bundle, cap: &Rational) -> (Bundle, Vec<GoodId>) {
    let mut kept = bundle.clone();
    let mut removed = Vec::new();
    while instance.cost_of(&kept) > *cap {
        let g = kept
            .iter()
            .filter(|&g| *instance.cost(g) > int(0))
            .min_by(|&g, &h| density_order(instance, agent, g, h).then(g.cmp(&h)))
            .expect("a bundle over a non-negative cap holds a good of positive cost");
        kept.remove(g);
        removed.push(g);
    }
    (kept, removed)
}

/// Compares `v(g)/c(g)` with `v(h)/c(h)` for goods of positive cost.
fn density_order(instance: &Instance, agent: AgentId, g: GoodId, h: GoodId) -> Ordering {
    let lhs = instance.value(agent, g) * instance.cost(h);
    let rhs = instance.value(agent, h) * instance.cost(g);
    lhs.cmp(&rhs)
}

/// `agents` must all share one budget in `instance`; `pool` is what is left
/// after the reserved goods are taken out.
pub fn equal_budget_procedure(
    instance: &Instance,
    agents: &[AgentId],
    pool: &Bundle,
    budget: &SearchBudget,
) -> Result<EqualBudgetOutcome> {
    let common = instance.budget(agents[0]).clone();
    if agents.iter().any(|&a| *instance.budget(a) != common) {
        return Err(Error::Precondition("agents do not share one budget".into()));
    }
    let opt_on_pool = max_nsw_allocation(instance, agents, pool, budget)?;
    let cap = &common / int(agents.len() as i64);
    let mut trimmed = Vec::new();
    let mut trimmed_away = Vec::new();
    for &a in agents {
        let (kept, removed) = trim_to_cost(instance, a, opt_on_pool.bundle(a), &cap);
        trimmed.push(kept);
        trimmed_away.push(removed);
    }
    let z = trimmed.iter().fold(Bundle::new(), |acc, b| acc.union(b));
    let complete = complete_efx_allocation(instance, agents, &z, budget)?;

    let mut bundles: Vec<Bundle> = complete.bundles().to_vec();
    let mut exchanges = Vec::new();
    while let Some(cycle) = envy_cycle(instance, agents, &bundles) {
        if exchanges.len() == MAX_ENVY_ROUNDS {
            return Err(Error::Invariant(format!("envy cycles persist after {MAX_ENVY_ROUNDS} exchanges")));
        }
        // Each agent on the cycle takes the bundle of the agent she envies.
        let taken: Vec<Bundle> = (0..cycle.len())
            .map(|k| bundles[cycle[(k + 1) % cycle.len()]].clone())
            .collect();
        for (k, &a) in cycle.iter().enumerate() {
            bundles[a] = taken[k].clone();
        }
        exchanges.push(cycle);
    }
    let allocation = Allocation::new(bundles, pool.clone())?;
    Ok(EqualBudgetOutcome { opt_on_pool, trimmed, trimmed_away, complete, exchanges, allocation })
}

fn envies(instance: &Instance, bundles: &[Bundle], i: AgentId, j: AgentId) -> bool {
    vmax(instance, i, &bundles[j]) > instance.value_of(i, &bundles[i])
}

/// A three-agent envy cycle `i -> j -> k -> i`, else a mutually envious pair.
fn envy_cycle(instance: &Instance, agents: &[AgentId], bundles: &[Bundle]) -> Option<Vec<AgentId>> {
    let n = agents.len();
    if n == 3 {
        let (a, b, c) = (agents[0], agents[1], agents[2]);
        for cycle in [[a, b, c], [a, c, b]] {
            if (0..3).all(|k| envies(instance, bundles, cycle[k], cycle[(k + 1) % 3])) {
                return Some(cycle.to_vec());
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            let (i, j) = (agents[x], agents[y]);
            if envies(instance, bundles, i, j) && envies(instance, bundles, j, i) {
                return Some(vec![i, j]);
            }
        }
    }
    None
}
