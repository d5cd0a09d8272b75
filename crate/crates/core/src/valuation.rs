//! Budget-constrained best responses: `v^max`, `S^max` and monopoly values.

use num_traits::Zero;

use crate::error::Result;
use crate::model::{AgentId, Bundle, GoodId, Instance};
use crate::rational::Rational;

/// Best budget-feasible sub-bundle of a pool for one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackAnswer {
    pub value: Rational,
    pub witness: Bundle,
}

/// Maximum additive value of `agent` over subsets of `pool` costing at most
/// `budget`.
///
/// Among subsets of maximum value the witness is the one with the most goods,
/// then the lexicographically smallest sorted id sequence. An affordable pool
/// is therefore always its own witness.
pub fn knapsack_vmax(
    instance: &Instance,
    agent: AgentId,
    pool: &Bundle,
    budget: &Rational,
) -> Result<KnapsackAnswer> {
    instance.check_agent(agent)?;
    instance.check_bundle(pool)?;
    Ok(knapsack(instance, agent, pool, budget))
}

/// `v^max` / `S^max` under the agent's own budget.
pub fn best_subset(instance: &Instance, agent: AgentId, pool: &Bundle) -> KnapsackAnswer {
    knapsack(instance, agent, pool, instance.budget(agent))
}

/// `v^max_i(pool)` under the agent's own budget.
pub fn vmax(instance: &Instance, agent: AgentId, pool: &Bundle) -> Rational {
    knapsack(instance, agent, pool, instance.budget(agent)).value
}

/// Best value `agent` could reach choosing freely from all goods with `budget`.
pub fn monopoly_value(instance: &Instance, agent: AgentId, budget: &Rational) -> Result<Rational> {
    instance.check_agent(agent)?;
    Ok(knapsack(instance, agent, &instance.all_goods(), budget).value)
}

struct Search<'a> {
    goods: Vec<GoodId>,
    costs: Vec<&'a Rational>,
    values: Vec<&'a Rational>,
    /// `suffix[k]` = sum of values of `goods[k..]`.
    suffix: Vec<Rational>,
    budget: &'a Rational,
    current: Vec<GoodId>,
    best_value: Rational,
    best: Vec<GoodId>,
}

impl Search<'_> {
    fn visit(&mut self, start: usize, cost: &Rational, value: &Rational) {
        if *value > self.best_value
            || (*value == self.best_value && self.current.len() > self.best.len())
        {
            self.best_value = value.clone();
            self.best = self.current.clone();
        }
        for j in start..self.goods.len() {
            let reachable = value + &self.suffix[j];
            let remaining = self.goods.len() - j;
            if reachable < self.best_value
                || (reachable == self.best_value
                    && self.current.len() + remaining <= self.best.len())
            {
                break;
            }
            let next_cost = cost + self.costs[j];
            if next_cost > *self.budget {
                continue;
            }
            let next_value = value + self.values[j];
            self.current.push(self.goods[j]);
            self.visit(j + 1, &next_cost, &next_value);
            self.current.pop();
        }
    }
}

pub(crate) fn knapsack(
    instance: &Instance,
    agent: AgentId,
    pool: &Bundle,
    budget: &Rational,
) -> KnapsackAnswer {
    let goods = pool.to_vec();
    let values: Vec<&Rational> = goods.iter().map(|&g| instance.value(agent, g)).collect();
    let costs: Vec<&Rational> = goods.iter().map(|&g| instance.cost(g)).collect();
    let mut suffix = vec![Rational::zero(); goods.len() + 1];
    for k in (0..goods.len()).rev() {
        suffix[k] = &suffix[k + 1] + values[k];
    }
    let mut search = Search {
        goods,
        costs,
        values,
        suffix,
        budget,
        current: Vec::new(),
        best_value: Rational::zero(),
        best: Vec::new(),
    };
    if Rational::zero() <= *budget {
        search.visit(0, &Rational::zero(), &Rational::zero());
    }
    KnapsackAnswer {
        value: search.best_value,
        witness: search.best.into_iter().collect(),
    }
}
