#![allow(dead_code)]

use budgeted_efx::{Agent, Instance};
use num_rational::BigRational;
use proptest::prelude::*;

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Integer costs in `1..=20`, values in `0..=20`, budgets within a factor `spread` of each other.
pub fn instance(n: usize, goods: std::ops::RangeInclusive<usize>, spread: i64) -> impl Strategy<Value = Instance> {
    goods.prop_flat_map(move |m| {
        let costs = prop::collection::vec(1i64..=20, m);
        let values = prop::collection::vec(prop::collection::vec(0i64..=20, m), n);
        let base = 5i64..=40;
        let factors = prop::collection::vec(10i64..=10 * spread, n);
        (costs, values, base, factors).prop_map(|(costs, values, base, factors)| {
            let agents = values
                .into_iter()
                .zip(factors)
                .map(|(vs, f)| Agent::new(int(base * f) / int(10), vs.into_iter().map(int).collect()))
                .collect();
            Instance::new(costs.into_iter().map(int).collect(), agents).unwrap()
        })
    })
}

/// One agent, up to `max_goods` goods, with costs possibly zero and any budget up to the total cost.
pub fn single_agent(max_goods: usize) -> impl Strategy<Value = Instance> {
    (0..=max_goods).prop_flat_map(|m| {
        (prop::collection::vec(0i64..=20, m), prop::collection::vec(0i64..=20, m), 0i64..=200).prop_map(
            |(costs, values, budget)| {
                let agent = Agent::new(int(budget), values.into_iter().map(int).collect());
                Instance::new(costs.into_iter().map(int).collect(), vec![agent]).unwrap()
            },
        )
    })
}

/// A random subset of `0..m`.
pub fn subset(m: usize) -> impl Strategy<Value = budgeted_efx::Bundle> {
    prop::collection::vec(any::<bool>(), m)
        .prop_map(|bits| bits.into_iter().enumerate().filter(|(_, b)| *b).map(|(g, _)| g).collect())
}

/// Every subset of `pool`, by brute force.
pub fn all_subsets(pool: &budgeted_efx::Bundle) -> Vec<budgeted_efx::Bundle> {
    let goods = pool.to_vec();
    (0u32..1 << goods.len())
        .map(|mask| goods.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &g)| g).collect())
        .collect()
}

/// Best affordable subset by enumeration: most value, then most goods, then smallest ids.
pub fn brute_force_best(instance: &Instance, agent: usize, pool: &budgeted_efx::Bundle, budget: &BigRational) -> (BigRational, budgeted_efx::Bundle) {
    let mut best: Option<(BigRational, budgeted_efx::Bundle)> = None;
    for s in all_subsets(pool) {
        if instance.cost_of(&s) > *budget {
            continue;
        }
        let v = instance.value_of(agent, &s);
        let better = match &best {
            None => true,
            Some((bv, bs)) => v > *bv || (v == *bv && (s.len() > bs.len() || (s.len() == bs.len() && s < *bs))),
        };
        if better {
            best = Some((v, s));
        }
    }
    best.expect("the empty set is affordable")
}

/// A random budget-feasible allocation of some goods to the instance's agents.
pub fn feasible_allocation(instance: &Instance, choices: &[usize]) -> budgeted_efx::Allocation {
    let n = instance.num_agents();
    let mut bundles = vec![budgeted_efx::Bundle::new(); n];
    for (g, &c) in choices.iter().enumerate().take(instance.num_goods()) {
        let i = c % (n + 1);
        if i < n {
            let mut next = bundles[i].clone();
            next.insert(g);
            if instance.is_affordable(i, &next) {
                bundles[i] = next;
            }
        }
    }
    budgeted_efx::Allocation::over(instance, bundles).unwrap()
}
