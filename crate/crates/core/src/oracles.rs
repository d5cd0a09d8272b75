//! Exhaustive solvers. They are used inside the procedures (optimum seeds,
//! the complete EFx step, leximin++ splits) and as ground truth in tests.
//!
//! Every search counts the partial assignments it visits and fails with
//! [`Error::SearchBudgetExhausted`] instead of returning an approximation.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fairness::{is_ef1, is_efx, is_envy_free, nsw_product, WelfareKey};
use crate::model::{allocation_values, describe_instance, AgentId, Allocation, Bundle, GoodId, Instance};
use crate::rational::Rational;
use crate::valuation::vmax;

/// Upper bound on the number of partial assignments a search may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    max_assignments: u64,
}

impl SearchBudget {
    pub const DEFAULT_MAX: u64 = 50_000_000;

    pub fn new(max_assignments: u64) -> Result<Self> {
        if max_assignments == 0 {
            return Err(Error::Precondition("search budget must be positive".into()));
        }
        Ok(SearchBudget { max_assignments })
    }

    pub fn max_assignments(&self) -> u64 {
        self.max_assignments
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_assignments: Self::DEFAULT_MAX }
    }
}

struct Counter {
    used: u64,
    cap: u64,
}

impl Counter {
    fn new(budget: &SearchBudget) -> Self {
        Counter { used: 0, cap: budget.max_assignments }
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            Err(Error::SearchBudgetExhausted(self.cap))
        } else {
            Ok(())
        }
    }
}

fn check_agents(instance: &Instance, agents: &[AgentId]) -> Result<()> {
    if agents.is_empty() {
        return Err(Error::Precondition("agent list is empty".into()));
    }
    for (k, &a) in agents.iter().enumerate() {
        instance.check_agent(a)?;
        if agents[..k].contains(&a) {
            return Err(Error::Precondition(format!("agent {a} listed twice")));
        }
    }
    Ok(())
}

/// Spreads per-listed-agent bundles into a full allocation over `pool`.
fn assemble(instance: &Instance, agents: &[AgentId], parts: &[Bundle], pool: &Bundle) -> Allocation {
    let mut bundles = vec![Bundle::new(); instance.num_agents()];
    for (&a, part) in agents.iter().zip(parts) {
        bundles[a] = part.clone();
    }
    Allocation::new(bundles, pool.clone()).expect("search keeps bundles disjoint and inside the pool")
}

/// Depth-first enumeration of budget-feasible assignments of `goods`, good by
/// good, trying the listed agents in order and then "unallocated".
struct Assignments<'a> {
    instance: &'a Instance,
    agents: &'a [AgentId],
    goods: Vec<GoodId>,
    parts: Vec<Bundle>,
    spent: Vec<Rational>,
    values: Vec<Rational>,
    counter: Counter,
}

impl<'a> Assignments<'a> {
    fn new(instance: &'a Instance, agents: &'a [AgentId], pool: &Bundle, budget: &SearchBudget) -> Self {
        Assignments {
            instance,
            agents,
            goods: pool.to_vec(),
            parts: vec![Bundle::new(); agents.len()],
            spent: vec![Rational::zero(); agents.len()],
            values: vec![Rational::zero(); agents.len()],
            counter: Counter::new(budget),
        }
    }

    fn fits(&self, slot: usize, good: GoodId) -> bool {
        &self.spent[slot] + self.instance.cost(good) <= *self.instance.budget(self.agents[slot])
    }

    fn give(&mut self, slot: usize, good: GoodId) {
        let agent = self.agents[slot];
        self.parts[slot].insert(good);
        self.spent[slot] += self.instance.cost(good);
        self.values[slot] += self.instance.value(agent, good);
    }

    fn take_back(&mut self, slot: usize, good: GoodId) {
        let agent = self.agents[slot];
        self.parts[slot].remove(good);
        self.spent[slot] -= self.instance.cost(good);
        self.values[slot] -= self.instance.value(agent, good);
    }

    /// Calls `leaf` on every complete assignment. `leaf` returns false to stop.
    fn each(&mut self, k: usize, leaf: &mut dyn FnMut(&[Bundle], &[Rational]) -> bool) -> Result<bool> {
        self.counter.tick()?;
        if k == self.goods.len() {
            return Ok(leaf(&self.parts, &self.values));
        }
        let g = self.goods[k];
        for slot in 0..self.agents.len() {
            if self.fits(slot, g) {
                self.give(slot, g);
                let go_on = self.each(k + 1, leaf)?;
                self.take_back(slot, g);
                if !go_on {
                    return Ok(false);
                }
            }
        }
        self.each(k + 1, leaf)
    }
}

struct NswSearch<'a> {
    walk: Assignments<'a>,
    /// `suffix[slot][k]`: value of `goods[k..]` to the agent in `slot`.
    suffix: Vec<Vec<Rational>>,
    prune: bool,
    best: Option<(WelfareKey, Vec<Bundle>)>,
}

impl NswSearch<'_> {
    fn run(&mut self, k: usize) -> Result<()> {
        self.walk.counter.tick()?;
        if k == self.walk.goods.len() {
            let key = WelfareKey::from_values(&self.walk.values);
            if self.best.as_ref().is_none_or(|(b, _)| key > *b) {
                self.best = Some((key, self.walk.parts.clone()));
            }
            return Ok(());
        }
        if self.prune {
            if let Some((best, _)) = &self.best {
                let bound: Vec<Rational> = (0..self.walk.agents.len())
                    .map(|s| &self.walk.values[s] + &self.suffix[s][k])
                    .collect();
                if WelfareKey::from_values(&bound) <= *best {
                    return Ok(());
                }
            }
        }
        let g = self.walk.goods[k];
        for slot in 0..self.walk.agents.len() {
            if self.walk.fits(slot, g) {
                self.walk.give(slot, g);
                self.run(k + 1)?;
                self.walk.take_back(slot, g);
            }
        }
        self.run(k + 1)
    }
}

fn nsw_search(
    instance: &Instance,
    agents: &[AgentId],
    pool: &Bundle,
    budget: &SearchBudget,
    prune: bool,
) -> Result<Allocation> {
    check_agents(instance, agents)?;
    instance.check_bundle(pool)?;
    let walk = Assignments::new(instance, agents, pool, budget);
    let suffix = agents
        .iter()
        .map(|&a| {
            let mut s = vec![Rational::zero(); walk.goods.len() + 1];
            for k in (0..walk.goods.len()).rev() {
                s[k] = &s[k + 1] + instance.value(a, walk.goods[k]);
            }
            s
        })
        .collect();
    let mut search = NswSearch { walk, suffix, prune, best: None };
    search.run(0)?;
    let (_, parts) = search.best.expect("the all-unallocated assignment is always feasible");
    Ok(assemble(instance, agents, &parts, pool))
}

/// Maximum Nash welfare allocation of (part of) `pool` among `agents`.
///
/// The returned allocation has one bundle per agent of the instance; agents
/// not listed get nothing and its scope is `pool`. Allocations are compared
/// by [`WelfareKey`] over the listed agents, so the plain product is maximized
/// whenever a positive product is possible. Among optima the first in
/// enumeration order wins: good by good in id order, each tried with the
/// listed agents in order and then left unallocated.
pub fn max_nsw_allocation(
    instance: &Instance,
    agents: &[AgentId],
    pool: &Bundle,
    budget: &SearchBudget,
) -> Result<Allocation> {
    nsw_search(instance, agents, pool, budget, true)
}

/// [`max_nsw_allocation`] without the upper-bound pruning. Same answer, slower.
pub fn max_nsw_allocation_unpruned(
    instance: &Instance,
    agents: &[AgentId],
    pool: &Bundle,
    budget: &SearchBudget,
) -> Result<Allocation> {
    nsw_search(instance, agents, pool, budget, false)
}

/// Visits every budget-feasible allocation of `pool` among `agents`, in the
/// enumeration order of [`max_nsw_allocation`].
pub fn for_each_feasible_allocation(
    instance: &Instance,
    agents: &[AgentId],
    pool: &Bundle,
    budget: &SearchBudget,
    mut visit: impl FnMut(Allocation),
) -> Result<()> {
    check_agents(instance, agents)?;
    instance.check_bundle(pool)?;
    let mut walk = Assignments::new(instance, agents, pool, budget);
    walk.each(0, &mut |parts, _| {
        visit(assemble(instance, agents, parts, pool));
        true
    })?;
    Ok(())
}

/// A complete EFx allocation of `pool` among `agents`.
///
/// Requires `c(pool)` to be within every listed agent's budget, so every
/// sub-bundle is affordable to everyone. Tries all `|agents|^|pool|` complete
/// assignments in enumeration order and returns the first EFx one.
pub fn complete_efx_allocation(
    instance: &Instance,
    agents: &[AgentId],
    pool: &Bundle,
    budget: &SearchBudget,
) -> Result<Allocation> {
    check_agents(instance, agents)?;
    instance.check_bundle(pool)?;
    let total = instance.cost_of(pool);
    if let Some(&a) = agents.iter().find(|&&a| total > *instance.budget(a)) {
        return Err(Error::Precondition(format!(
            "pool {pool} costs {total}, above the budget of agent {a}"
        )));
    }
    let goods = pool.to_vec();
    let mut owner = vec![0usize; goods.len()];
    let mut counter = Counter::new(budget);
    loop {
        counter.tick()?;
        let mut parts = vec![Bundle::new(); agents.len()];
        for (k, &g) in goods.iter().enumerate() {
            parts[owner[k]].insert(g);
        }
        if complete_parts_are_efx(instance, agents, &parts) {
            return Ok(assemble(instance, agents, &parts, pool));
        }
        // Next assignment in lexicographic order, last good varying fastest.
        let mut k = goods.len();
        loop {
            if k == 0 {
                return Err(Error::ExistenceViolation {
                    pool: pool.to_string(),
                    instance: describe_instance(instance),
                });
            }
            k -= 1;
            owner[k] += 1;
            if owner[k] < agents.len() {
                break;
            }
            owner[k] = 0;
        }
    }
}

/// EFx test when every bundle is affordable to every agent: the best
/// affordable part of `X_j \ {g}` is all of it.
fn complete_parts_are_efx(instance: &Instance, agents: &[AgentId], parts: &[Bundle]) -> bool {
    agents.iter().enumerate().all(|(s, &i)| {
        let own = instance.value_of(i, &parts[s]);
        parts.iter().enumerate().filter(|&(t, _)| t != s).all(|(_, other)| {
            match other.iter().map(|g| instance.value(i, g)).min() {
                None => true,
                Some(least) => instance.value_of(i, other) - least <= own,
            }
        })
    })
}

/// Two disjoint parts of a split bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPair {
    pub first: Bundle,
    pub second: Bundle,
}

/// Leximin++ split of `pool` into two parts under `u(S) = v^max_agent(S)`.
///
/// Each 2-partition is scored by its worse part's `(u, size)` and then its
/// better part's `(u, size)`; the maximum wins, with remaining ties going to
/// the smallest id set as the better part. `first` is the better part. The
/// result satisfies `u(first) >= u(second) >= u(first \ {g})` for every `g`
/// in `first`.
pub fn leximin_pp_split(instance: &Instance, agent: AgentId, pool: &Bundle) -> Result<SplitPair> {
    instance.check_agent(agent)?;
    instance.check_bundle(pool)?;
    let goods = pool.to_vec();
    if goods.len() >= 63 {
        return Err(Error::Precondition(format!("cannot split {} goods exhaustively", goods.len())));
    }
    type Score = ((Rational, usize), (Rational, usize));
    let mut best: Option<(Score, SplitPair)> = None;
    for mask in 0u64..(1u64 << goods.len()) {
        let a: Bundle = goods.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &g)| g).collect();
        let b = pool.difference(&a);
        let ka = (vmax(instance, agent, &a), a.len());
        let kb = (vmax(instance, agent, &b), b.len());
        let a_first = ka > kb || (ka == kb && a <= b);
        let (score, pair) = if a_first {
            ((kb, ka), SplitPair { first: a, second: b })
        } else {
            ((ka, kb), SplitPair { first: b, second: a })
        };
        let better = match &best {
            None => true,
            Some((s, p)) => score > *s || (score == *s && pair.first < p.first),
        };
        if better {
            best = Some((score, pair));
        }
    }
    Ok(best.expect("at least one partition exists").1)
}

/// Fairness filter for [`best_allocation_under_predicate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    Any,
    Ef1,
    Efx,
    Ef,
}

impl Predicate {
    pub fn holds(&self, instance: &Instance, allocation: &Allocation) -> bool {
        match self {
            Predicate::Any => true,
            Predicate::Ef1 => is_ef1(instance, allocation),
            Predicate::Efx => is_efx(instance, allocation),
            Predicate::Ef => is_envy_free(instance, allocation),
        }
    }
}

/// The Nash welfare maximizer among budget-feasible allocations of all goods
/// to all agents that satisfy `predicate`, with its product.
///
/// Ordering and ties follow [`max_nsw_allocation`]. The empty allocation
/// satisfies every predicate, so an answer always exists.
pub fn best_allocation_under_predicate(
    instance: &Instance,
    predicate: Predicate,
    budget: &SearchBudget,
) -> Result<(Allocation, Rational)> {
    let agents: Vec<AgentId> = instance.agent_ids().collect();
    let pool = instance.all_goods();
    let mut best: Option<(WelfareKey, Allocation)> = None;
    for_each_feasible_allocation(instance, &agents, &pool, budget, |alloc| {
        let key = WelfareKey::from_values(&allocation_values(instance, &alloc));
        if best.as_ref().is_none_or(|(b, _)| key > *b) && predicate.holds(instance, &alloc) {
            best = Some((key, alloc));
        }
    })?;
    let (_, alloc) = best.expect("the empty allocation satisfies every predicate");
    let product = nsw_product(instance, &alloc);
    Ok((alloc, product))
}

/// No budget-feasible allocation gives every agent at least as much and some
/// agent strictly more.
pub fn is_pareto_efficient(instance: &Instance, allocation: &Allocation, budget: &SearchBudget) -> Result<bool> {
    instance.check_allocation(allocation)?;
    if !crate::model::is_budget_feasible(instance, allocation) {
        return Err(Error::Precondition("allocation is not budget-feasible".into()));
    }
    let current = allocation_values(instance, allocation);
    let agents: Vec<AgentId> = instance.agent_ids().collect();
    let mut walk = Assignments::new(instance, &agents, &instance.all_goods(), budget);
    let mut dominated = false;
    walk.each(0, &mut |_, values| {
        let weakly = values.iter().zip(&current).all(|(v, c)| v >= c);
        let strictly = values.iter().zip(&current).any(|(v, c)| v > c);
        dominated = weakly && strictly;
        !dominated
    })?;
    Ok(!dominated)
}
