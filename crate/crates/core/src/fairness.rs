//! Budget-aware envy notions, Nash welfare and normalization.
//!
//! Envy is always measured against the best sub-bundle of the other agent's
//! bundle that the envious agent could afford.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{allocation_values, AgentId, Allocation, Bundle, GoodId, Instance};
use crate::rational::Rational;
use crate::valuation::{knapsack, vmax};

/// `agent` would rather have an affordable part of `target` than her own bundle.
pub fn envies(instance: &Instance, allocation: &Allocation, agent: AgentId, target: &Bundle) -> bool {
    vmax(instance, agent, target) > instance.value_of(agent, allocation.bundle(agent))
}

/// EFx-envy of `agent`, holding a bundle worth `own_value`, toward `target`:
/// some good `g` of `target` leaves `v^max(target \ {g}) > own_value`.
///
/// This is the form used by the feasibility graph. Every literal EFx-envy
/// (see [`efx_envies_literal`]) is also an EFx-envy here, but not conversely,
/// because `S^max(target \ {g}) + g` need not be affordable.
pub fn efx_envies(instance: &Instance, own_value: &Rational, agent: AgentId, target: &Bundle) -> bool {
    efx_envy_good(instance, own_value, agent, target).is_some()
}

/// The first good (by id) whose removal leaves an envied affordable part.
pub fn efx_envy_good(
    instance: &Instance,
    own_value: &Rational,
    agent: AgentId,
    target: &Bundle,
) -> Option<GoodId> {
    // Removing a good the agent does not pick anyway changes nothing, so start
    // with a cheap bound: v^max(target) itself must exceed own_value.
    let full = knapsack(instance, agent, target, instance.budget(agent));
    if full.value <= *own_value {
        return None;
    }
    target
        .iter()
        .find(|&g| knapsack(instance, agent, &target.without(g), instance.budget(agent)).value > *own_value)
}

/// Quantifier form: some affordable `S ⊆ target` and `g ∈ S` with
/// `v(S \ {g}) > own_value`. Exponential in `|target|`.
pub fn efx_envies_literal(
    instance: &Instance,
    own_value: &Rational,
    agent: AgentId,
    target: &Bundle,
) -> bool {
    literal_efx_witness(instance, own_value, agent, target).is_some()
}

/// Smallest `(S, g)` (by `|S|`, then ids) witnessing literal EFx-envy.
pub fn literal_efx_witness(
    instance: &Instance,
    own_value: &Rational,
    agent: AgentId,
    target: &Bundle,
) -> Option<(Bundle, GoodId)> {
    let mut subsets = affordable_subsets(instance, agent, target);
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets.into_iter().find_map(|s| {
        s.iter()
            .find(|&g| instance.value_of(agent, &s.without(g)) > *own_value)
            .map(|g| (s.clone(), g))
    })
}

fn affordable_subsets(instance: &Instance, agent: AgentId, pool: &Bundle) -> Vec<Bundle> {
    let goods = pool.to_vec();
    let budget = instance.budget(agent);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << goods.len()) {
        let s: Bundle = goods
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &g)| g)
            .collect();
        if instance.cost_of(&s) <= *budget {
            out.push(s);
        }
    }
    out
}

/// No agent EFx-envies another.
pub fn is_efx(instance: &Instance, allocation: &Allocation) -> bool {
    efx_violation(instance, allocation).is_none()
}

/// An ordered pair `(agent, owner)` and the good whose removal exposes envy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfxViolation {
    pub agent: AgentId,
    pub owner: AgentId,
    pub removed: GoodId,
    /// `S^max_agent(X_owner \ {removed})`, worth more than the agent's bundle.
    pub envied_part: Bundle,
}

pub fn efx_violation(instance: &Instance, allocation: &Allocation) -> Option<EfxViolation> {
    let values = allocation_values(instance, allocation);
    for (agent, own) in values.iter().enumerate() {
        for owner in 0..allocation.num_agents() {
            if agent == owner {
                continue;
            }
            let target = allocation.bundle(owner);
            if let Some(removed) = efx_envy_good(instance, own, agent, target) {
                let envied_part =
                    knapsack(instance, agent, &target.without(removed), instance.budget(agent)).witness;
                return Some(EfxViolation { agent, owner, removed, envied_part });
            }
        }
    }
    None
}

/// EFx restricted to the ordered pairs inside `agents`.
pub fn is_efx_among(instance: &Instance, allocation: &Allocation, agents: &[AgentId]) -> bool {
    agents.iter().all(|&i| {
        let own = instance.value_of(i, allocation.bundle(i));
        agents
            .iter()
            .filter(|&&j| j != i)
            .all(|&j| !efx_envies(instance, &own, i, allocation.bundle(j)))
    })
}

/// Every affordable `S ⊆ X_j` loses its envy after dropping its best good.
pub fn is_ef1(instance: &Instance, allocation: &Allocation) -> bool {
    let values = allocation_values(instance, allocation);
    (0..allocation.num_agents()).all(|i| {
        (0..allocation.num_agents()).filter(|&j| j != i).all(|j| {
            affordable_subsets(instance, i, allocation.bundle(j)).iter().all(|s| {
                s.is_empty()
                    || s.iter()
                        .any(|g| instance.value_of(i, &s.without(g)) <= values[i])
            })
        })
    })
}

pub fn is_envy_free(instance: &Instance, allocation: &Allocation) -> bool {
    (0..allocation.num_agents()).all(|i| {
        (0..allocation.num_agents())
            .filter(|&j| j != i)
            .all(|j| !envies(instance, allocation, i, allocation.bundle(j)))
    })
}

/// `Π v_i(X_i)` over all agents (the Nash welfare before the n-th root).
pub fn nsw_product(instance: &Instance, allocation: &Allocation) -> Rational {
    allocation_values(instance, allocation)
        .iter()
        .fold(Rational::one(), |acc, v| acc * v)
}

/// `Π v_i(X_i)` over the listed agents.
pub fn nsw_product_among(instance: &Instance, allocation: &Allocation, agents: &[AgentId]) -> Rational {
    agents
        .iter()
        .fold(Rational::one(), |acc, &i| acc * instance.value_of(i, allocation.bundle(i)))
}

/// Nash welfare comparison key: the number of agents with positive value,
/// then the product of the positive values.
///
/// Wherever some allocation gives everyone positive value this orders exactly
/// like the plain product; otherwise it still separates allocations that the
/// product would all score as zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareKey {
    pub positive: usize,
    pub product: Rational,
}

impl WelfareKey {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut positive = 0;
        let mut product = Rational::one();
        for v in values {
            if !v.is_zero() {
                positive += 1;
                product *= v;
            }
        }
        WelfareKey { positive, product }
    }

    /// Product over all agents, zero unless every agent counted.
    pub fn full_product(&self, agents: usize) -> Rational {
        if self.positive == agents {
            self.product.clone()
        } else {
            Rational::zero()
        }
    }
}

impl PartialOrd for WelfareKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WelfareKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.positive
            .cmp(&other.positive)
            .then_with(|| self.product.cmp(&other.product))
    }
}

/// Rescale every agent so that her bundle in `opt` is worth exactly 1.
pub fn normalize(instance: &Instance, opt: &Allocation) -> Result<Instance> {
    instance.check_allocation(opt)?;
    let factors = instance
        .agent_ids()
        .map(|i| {
            let v = instance.value_of(i, opt.bundle(i));
            if v.is_zero() {
                Err(Error::DegenerateOptimum(i))
            } else {
                Ok(v.recip())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    instance.with_scaled_values(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::halves_and_whole;
    use crate::model::Agent;
    use crate::rational::{int, ratio};

    fn opt_of_halves(inst: &Instance) -> Allocation {
        Allocation::over(inst, vec![Bundle::from([0, 1]), Bundle::singleton(2)]).unwrap()
    }

    #[test]
    fn envy_toward_the_optimum_pair() {
        let inst = halves_and_whole(ratio(1, 10));
        let opt = opt_of_halves(&inst);
        assert!(envies(&inst, &opt, 1, &Bundle::from([0, 1])));
        assert!(!envies(&inst, &opt, 0, opt.bundle(0)));
        assert!(!envies(&inst, &opt, 1, opt.bundle(1)));
        assert!(!envies(&inst, &opt, 0, &Bundle::new()));
    }

    #[test]
    fn efx_envy_in_the_optimum() {
        let inst = halves_and_whole(ratio(1, 10));
        assert!(efx_envies(&inst, &int(1), 1, &Bundle::from([0, 1])));
        assert_eq!(efx_envy_good(&inst, &int(1), 1, &Bundle::from([0, 1])), Some(0));
        assert!(!efx_envies(&inst, &int(0), 1, &Bundle::singleton(2)));
        assert_eq!(
            literal_efx_witness(&inst, &int(1), 1, &Bundle::from([0, 1])),
            Some((Bundle::from([0, 1]), 0))
        );
    }

    #[test]
    fn vmax_form_is_strictly_stronger_than_literal_form() {
        // Two unit-cost goods, budget 1: S^max({a}) is envied but {a, b} is unaffordable.
        let inst = Instance::new(
            vec![int(1), int(1)],
            vec![
                Agent::new(int(1), vec![int(1), int(1)]),
                Agent::new(int(2), vec![int(1), int(1)]),
            ],
        )
        .unwrap();
        let target = Bundle::from([0, 1]);
        assert!(efx_envies(&inst, &ratio(1, 2), 0, &target));
        assert!(!efx_envies_literal(&inst, &ratio(1, 2), 0, &target));
    }

    #[test]
    fn fixture_allocations() {
        let inst = halves_and_whole(ratio(1, 10));
        let singles = Allocation::over(&inst, vec![Bundle::singleton(0), Bundle::singleton(1)]).unwrap();
        assert!(is_efx(&inst, &singles));
        assert!(is_ef1(&inst, &singles));
        let opt = opt_of_halves(&inst);
        assert!(!is_ef1(&inst, &opt));
        assert!(!is_efx(&inst, &opt));
        let empty = Allocation::empty(2, inst.all_goods());
        assert!(is_efx(&inst, &empty) && is_ef1(&inst, &empty) && is_envy_free(&inst, &empty));
        let v = efx_violation(&inst, &opt).unwrap();
        assert_eq!((v.agent, v.owner, v.removed), (1, 0, 0));
        assert_eq!(v.envied_part, Bundle::singleton(1));
    }

    #[test]
    fn products() {
        let inst = halves_and_whole(ratio(1, 10));
        assert_eq!(nsw_product(&inst, &opt_of_halves(&inst)), int(1));
        let singles = Allocation::over(&inst, vec![Bundle::singleton(0), Bundle::singleton(1)]).unwrap();
        assert_eq!(nsw_product(&inst, &singles), ratio(11, 20));
        let starved = Allocation::over(&inst, vec![Bundle::new(), Bundle::from([0, 1])]).unwrap();
        assert_eq!(nsw_product(&inst, &starved), int(0));
    }

    #[test]
    fn welfare_key_orders_positive_count_first() {
        let a = WelfareKey::from_values(&[int(0), int(100)]);
        let b = WelfareKey::from_values(&[int(1), int(1)]);
        assert!(b > a);
        assert_eq!(a.full_product(2), int(0));
        assert_eq!(b.full_product(2), int(1));
    }

    #[test]
    fn normalization() {
        let inst = halves_and_whole(ratio(1, 10));
        let opt = opt_of_halves(&inst);
        assert_eq!(normalize(&inst, &opt).unwrap(), inst);

        let doubled = inst.with_scaled_values(&[int(2), int(1)]).unwrap();
        let normed = normalize(&doubled, &opt).unwrap();
        assert_eq!(normed.values(0), inst.values(0));

        let starved = Allocation::over(&inst, vec![Bundle::new(), Bundle::singleton(2)]).unwrap();
        assert_eq!(normalize(&inst, &starved), Err(Error::DegenerateOptimum(0)));
    }
}
