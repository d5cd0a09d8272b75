//! The unequal-budget route: the lowest-budget agent takes her best bundle,
//! the other two share the rest, and envy toward her is repaired if needed.

use crate::efx_two::{efx_2a, TwoAgentResult};
use crate::error::Result;
use crate::model::{AgentId, Allocation, Bundle, GoodId, Instance};
use crate::oracles::{max_nsw_allocation, SearchBudget, SplitPair};
use crate::rational::Rational;
use crate::valuation::best_subset;

use super::Branch;

/// Splits `pool` in two by letting `agent` pick alternately for each side,
/// highest value first (ties to the lowest id), starting with `first`.
pub fn round_robin_self_split(instance: &Instance, agent: AgentId, pool: &Bundle) -> SplitPair {
    let mut goods: Vec<GoodId> = pool.to_vec();
    goods.sort_by(|&g, &h| instance.value(agent, h).cmp(instance.value(agent, g)).then(g.cmp(&h)));
    let mut pair = SplitPair { first: Bundle::new(), second: Bundle::new() };
    for (k, g) in goods.into_iter().enumerate() {
        if k % 2 == 0 {
            pair.first.insert(g);
        } else {
            pair.second.insert(g);
        }
    }
    pair
}

/// Everything the unequal-budget route decided, for certification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElseOutcome {
    pub branch: Branch,
    /// Agents in role order after the possible exchange of roles two and three.
    pub roles: [AgentId; 3],
    /// Roles two and three were exchanged so that the third has low monopoly value.
    pub roles_exchanged: bool,
    /// Best affordable bundle of the first role out of the pool.
    pub x1: Bundle,
    /// Nash optimum of the other two roles over the rest of the pool.
    pub opt_rest: Allocation,
    /// The two-agent EFx repair between roles two and three.
    pub pair_23: TwoAgentResult,
    /// The two-agent repair between roles one and two, when it ran.
    pub pair_12: Option<TwoAgentResult>,
    /// Role three's self-split of her bundle, when it ran.
    pub split_3: Option<SplitPair>,
    /// The half of role three's bundle given up, when it ran.
    pub dropped_3: Option<Bundle>,
    /// Role one's best affordable part of what role three kept, when computed.
    pub x1_alt: Option<Bundle>,
    pub allocation: Allocation,
}

/// `roles` lists the agents by increasing budget. `monopoly` holds the best
/// value of roles two and three over the pool at the first role's budget.
pub fn else_procedure(
    instance: &Instance,
    roles: [AgentId; 3],
    pool: &Bundle,
    alpha: &Rational,
    monopoly: [&Rational; 2],
    budget: &SearchBudget,
) -> Result<ElseOutcome> {
    let [r1, r2, r3] = roles;
    let x1 = best_subset(instance, r1, pool).witness;
    let rest = pool.difference(&x1);
    let opt_rest = max_nsw_allocation(instance, &[r2, r3], &rest, budget)?;
    let mut seed = vec![Bundle::new(); instance.num_agents()];
    seed[r1] = x1.clone();
    seed[r2] = opt_rest.bundle(r2).clone();
    seed[r3] = opt_rest.bundle(r3).clone();
    let pair_23 = efx_2a(instance, (r2, r3), &Allocation::new(seed, pool.clone())?)?;

    let mut out = ElseOutcome {
        branch: Branch::Return1,
        roles,
        roles_exchanged: false,
        x1: x1.clone(),
        opt_rest,
        pair_23: pair_23.clone(),
        pair_12: None,
        split_3: None,
        dropped_3: None,
        x1_alt: None,
        allocation: pair_23.allocation.clone(),
    };
    let [m2, m3] = monopoly;
    if m2 < alpha && m3 < alpha {
        return Ok(out);
    }
    let (r2, r3) = if m3 < alpha { (r2, r3) } else { (r3, r2) };
    out.roles_exchanged = r2 != roles[1];
    out.roles = [r1, r2, r3];

    let x2 = pair_23.allocation.bundle(r2).clone();
    let x3 = pair_23.allocation.bundle(r3).clone();
    if instance.value_of(r2, &x2) >= instance.value_of(r2, &x1) {
        out.branch = Branch::Return2;
        return Ok(out);
    }

    let mut seed = vec![Bundle::new(); instance.num_agents()];
    seed[r2] = x1.clone();
    seed[r3] = x3.clone();
    let pair_12 = efx_2a(instance, (r1, r2), &Allocation::new(seed, pool.clone())?)?;
    let x1_prime = pair_12.allocation.bundle(r1).clone();
    let x2_prime = pair_12.allocation.bundle(r2).clone();

    let split = round_robin_self_split(instance, r3, &x3);
    let dropped = if instance.value_of(r2, &split.first) >= instance.value_of(r2, &split.second) {
        split.first.clone()
    } else {
        split.second.clone()
    };
    let mut x3_star = x3.difference(&dropped);
    let x1_alt = best_subset(instance, r1, &x3_star).witness;
    let x1_star = if instance.value_of(r1, &x1_prime) < instance.value_of(r1, &x1_alt) {
        x3_star = x3_star.difference(&x1_alt);
        x1_alt.clone()
    } else {
        x1_prime
    };

    let mut bundles = vec![Bundle::new(); instance.num_agents()];
    bundles[r1] = x1_star;
    bundles[r2] = x2_prime;
    bundles[r3] = x3_star;
    out.allocation = Allocation::new(bundles, pool.clone())?;
    out.branch = Branch::Return3;
    out.pair_12 = Some(pair_12);
    out.split_3 = Some(split);
    out.dropped_3 = Some(dropped);
    out.x1_alt = Some(x1_alt);
    Ok(out)
}
