//! Instances, bundles and allocations.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{format_rational, is_nonnegative, Rational};

pub type GoodId = usize;
pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub budget: Rational,
    pub values: Vec<Rational>,
}

impl Agent {
    pub fn new(budget: Rational, values: Vec<Rational>) -> Self {
        Agent { budget, values }
    }
}

/// Goods with costs and agents with budgets and additive values.
///
/// Good and agent ids are dense indices into `costs` and `agents`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    costs: Vec<Rational>,
    agents: Vec<Agent>,
}

impl Instance {
    pub fn new(costs: Vec<Rational>, agents: Vec<Agent>) -> Result<Self> {
        for (g, cost) in costs.iter().enumerate() {
            if !is_nonnegative(cost) {
                return Err(Error::Negative { what: format!("cost of good {g}") });
            }
        }
        for (i, agent) in agents.iter().enumerate() {
            if agent.values.len() != costs.len() {
                return Err(Error::ValueCountMismatch {
                    agent: i,
                    expected: costs.len(),
                    found: agent.values.len(),
                });
            }
            if !is_nonnegative(&agent.budget) {
                return Err(Error::Negative { what: format!("budget of agent {i}") });
            }
            if let Some(g) = agent.values.iter().position(|v| !is_nonnegative(v)) {
                return Err(Error::Negative { what: format!("value of agent {i} for good {g}") });
            }
        }
        Ok(Instance { costs, agents })
    }

    pub fn num_goods(&self) -> usize {
        self.costs.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn costs(&self) -> &[Rational] {
        &self.costs
    }

    pub fn cost(&self, good: GoodId) -> &Rational {
        &self.costs[good]
    }

    pub fn budget(&self, agent: AgentId) -> &Rational {
        &self.agents[agent].budget
    }

    pub fn value(&self, agent: AgentId, good: GoodId) -> &Rational {
        &self.agents[agent].values[good]
    }

    pub fn values(&self, agent: AgentId) -> &[Rational] {
        &self.agents[agent].values
    }

    /// The bundle of every good, `M`.
    pub fn all_goods(&self) -> Bundle {
        (0..self.num_goods()).collect()
    }

    pub fn agent_ids(&self) -> std::ops::Range<AgentId> {
        0..self.num_agents()
    }

    /// Total cost of a bundle. Ids must be valid.
    pub fn cost_of(&self, bundle: &Bundle) -> Rational {
        bundle.iter().fold(Rational::zero(), |acc, g| acc + &self.costs[g])
    }

    /// Additive value of a bundle to `agent`. Ids must be valid.
    pub fn value_of(&self, agent: AgentId, bundle: &Bundle) -> Rational {
        let values = &self.agents[agent].values;
        bundle.iter().fold(Rational::zero(), |acc, g| acc + &values[g])
    }

    pub fn is_affordable(&self, agent: AgentId, bundle: &Bundle) -> bool {
        self.cost_of(bundle) <= self.agents[agent].budget
    }

    pub fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent < self.num_agents() {
            Ok(())
        } else {
            Err(Error::UnknownAgent(agent))
        }
    }

    pub fn check_bundle(&self, bundle: &Bundle) -> Result<()> {
        match bundle.iter().find(|&g| g >= self.num_goods()) {
            Some(g) => Err(Error::UnknownGood(g)),
            None => Ok(()),
        }
    }

    pub fn check_allocation(&self, allocation: &Allocation) -> Result<()> {
        if allocation.num_agents() != self.num_agents() {
            return Err(Error::BundleCountMismatch {
                expected: self.num_agents(),
                found: allocation.num_agents(),
            });
        }
        self.check_bundle(allocation.scope())
    }

    /// Same goods and values, different budgets.
    pub fn with_budgets(&self, budgets: &[Rational]) -> Result<Instance> {
        if budgets.len() != self.num_agents() {
            return Err(Error::AgentCount {
                expected: self.num_agents(),
                found: budgets.len(),
            });
        }
        let agents = self
            .agents
            .iter()
            .zip(budgets)
            .map(|(a, b)| Agent::new(b.clone(), a.values.clone()))
            .collect();
        Instance::new(self.costs.clone(), agents)
    }

    /// Same goods and budgets, each agent's values multiplied by its factor.
    pub fn with_scaled_values(&self, factors: &[Rational]) -> Result<Instance> {
        if factors.len() != self.num_agents() {
            return Err(Error::AgentCount {
                expected: self.num_agents(),
                found: factors.len(),
            });
        }
        let agents = self
            .agents
            .iter()
            .zip(factors)
            .map(|(a, f)| Agent::new(a.budget.clone(), a.values.iter().map(|v| v * f).collect()))
            .collect();
        Instance::new(self.costs.clone(), agents)
    }
}

/// A set of goods.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(BTreeSet<GoodId>);

impl Bundle {
    pub fn new() -> Self {
        Bundle(BTreeSet::new())
    }

    pub fn singleton(good: GoodId) -> Self {
        Bundle(BTreeSet::from([good]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, good: GoodId) -> bool {
        self.0.contains(&good)
    }

    pub fn insert(&mut self, good: GoodId) -> bool {
        self.0.insert(good)
    }

    pub fn remove(&mut self, good: GoodId) -> bool {
        self.0.remove(&good)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = GoodId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<GoodId> {
        self.iter().collect()
    }

    pub fn without(&self, good: GoodId) -> Bundle {
        let mut out = self.clone();
        out.remove(good);
        out
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &Bundle) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<GoodId> for Bundle {
    fn from_iter<T: IntoIterator<Item = GoodId>>(iter: T) -> Self {
        Bundle(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[GoodId; N]> for Bundle {
    fn from(goods: [GoodId; N]) -> Self {
        goods.into_iter().collect()
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Disjoint bundles, one per agent, drawn from `scope`. Goods in scope but in
/// no bundle form the unallocated pool.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    bundles: Vec<Bundle>,
    scope: Bundle,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>, scope: Bundle) -> Result<Self> {
        let mut seen = Bundle::new();
        for bundle in &bundles {
            for g in bundle.iter() {
                if !scope.contains(g) {
                    return Err(Error::OutOfScope(g));
                }
                if !seen.insert(g) {
                    return Err(Error::OverlappingBundles(g));
                }
            }
        }
        Ok(Allocation { bundles, scope })
    }

    /// Bundles over the full good set of `instance`.
    pub fn over(instance: &Instance, bundles: Vec<Bundle>) -> Result<Self> {
        if bundles.len() != instance.num_agents() {
            return Err(Error::BundleCountMismatch {
                expected: instance.num_agents(),
                found: bundles.len(),
            });
        }
        Allocation::new(bundles, instance.all_goods())
    }

    pub fn empty(num_agents: usize, scope: Bundle) -> Self {
        Allocation { bundles: vec![Bundle::new(); num_agents], scope }
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: AgentId) -> &Bundle {
        &self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn scope(&self) -> &Bundle {
        &self.scope
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles.iter().fold(Bundle::new(), |acc, b| acc.union(b))
    }

    pub fn unallocated(&self) -> Bundle {
        self.scope.difference(&self.allocated())
    }

    /// Copy with `agent`'s bundle replaced.
    pub fn with_bundle(&self, agent: AgentId, bundle: Bundle) -> Result<Allocation> {
        let mut bundles = self.bundles.clone();
        bundles[agent] = bundle;
        Allocation::new(bundles, self.scope.clone())
    }

    /// Copy with a wider (or narrower) scope.
    pub fn with_scope(&self, scope: Bundle) -> Result<Allocation> {
        Allocation::new(self.bundles.clone(), scope)
    }

    pub fn into_bundles(self) -> Vec<Bundle> {
        self.bundles
    }
}

/// Exact cost of a bundle.
pub fn bundle_cost(instance: &Instance, bundle: &Bundle) -> Result<Rational> {
    instance.check_bundle(bundle)?;
    Ok(instance.cost_of(bundle))
}

/// Exact additive value of a bundle to `agent`.
pub fn bundle_value(instance: &Instance, agent: AgentId, bundle: &Bundle) -> Result<Rational> {
    instance.check_agent(agent)?;
    instance.check_bundle(bundle)?;
    Ok(instance.value_of(agent, bundle))
}

pub fn is_budget_feasible(instance: &Instance, allocation: &Allocation) -> bool {
    allocation
        .bundles()
        .iter()
        .enumerate()
        .all(|(i, b)| instance.is_affordable(i, b))
}

/// Per-agent values `v_i(X_i)`.
pub fn allocation_values(instance: &Instance, allocation: &Allocation) -> Vec<Rational> {
    allocation
        .bundles()
        .iter()
        .enumerate()
        .map(|(i, b)| instance.value_of(i, b))
        .collect()
}

pub(crate) fn describe_instance(instance: &Instance) -> String {
    let costs: Vec<String> = instance.costs().iter().map(format_rational).collect();
    let agents: Vec<String> = instance
        .agents()
        .iter()
        .map(|a| {
            let values: Vec<String> = a.values.iter().map(format_rational).collect();
            format!("{{budget: {}, values: [{}]}}", format_rational(&a.budget), values.join(", "))
        })
        .collect();
    format!("{{costs: [{}], agents: [{}]}}", costs.join(", "), agents.join(", "))
}
