//! EFx with a constant fraction of the optimal Nash welfare for three agents.
//!
//! The optimum is computed and every agent rescaled to value her optimum
//! bundle at 1. Each agent then reserves one valuable good. If both
//! higher-budget agents could still reach `alpha` with the lowest budget, the
//! budgets are equalized and [`equal_budget`] runs; otherwise [`else_case`]
//! runs. Finally every agent may trade her bundle for her reserved good.

pub mod certify;
pub mod else_case;
pub mod equal_budget;
pub mod preprocess;

use std::fmt;

use num_traits::Zero;

pub use certify::{branch_product_bound, certify, restricted_opt_values, guaranteed_product_bound};
pub use else_case::{else_procedure, round_robin_self_split, ElseOutcome};
pub use equal_budget::{equal_budget_procedure, trim_to_cost, EqualBudgetOutcome};
pub use preprocess::{favorite_goods, preprocess, SetAside};

use crate::error::{Error, Result};
use crate::fairness::normalize;
use crate::model::{AgentId, Allocation, Bundle, Instance};
use crate::oracles::{max_nsw_allocation, SearchBudget};
use crate::rational::{format_rational, ratio, Rational};
use crate::valuation::knapsack;

/// The monopoly threshold. Guarantees hold for `alpha <= 1/35`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaParams {
    alpha: Rational,
    guarantee: bool,
}

impl AlphaParams {
    pub fn guaranteed_max() -> Rational {
        ratio(1, 35)
    }

    /// A threshold in `(0, 1/35]`, for which every guarantee applies.
    pub fn new(alpha: Rational) -> Result<Self> {
        if alpha <= Rational::zero() || alpha > Self::guaranteed_max() {
            return Err(Error::AlphaOutOfRange(format_rational(&alpha)));
        }
        Ok(AlphaParams { alpha, guarantee: true })
    }

    /// Any threshold in `(0, 1)`. Outputs are still budget-feasible but the
    /// fairness and welfare guarantees are not claimed above `1/35`.
    pub fn experimental(alpha: Rational) -> Result<Self> {
        if alpha <= Rational::zero() || alpha >= Rational::from_integer(1.into()) {
            return Err(Error::AlphaOutOfRange(format_rational(&alpha)));
        }
        let guarantee = alpha <= Self::guaranteed_max();
        Ok(AlphaParams { alpha, guarantee })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn is_guaranteed(&self) -> bool {
        self.guarantee
    }
}

impl Default for AlphaParams {
    fn default() -> Self {
        AlphaParams { alpha: Self::guaranteed_max(), guarantee: true }
    }
}

/// Where the three-agent procedure produced its allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// At most three goods: the optimum is returned as is.
    SmallInstance,
    EqualBudget,
    /// Neither higher-budget agent reaches `alpha` at the lowest budget.
    Return1,
    /// The middle role does not prefer the first role's bundle.
    Return2,
    /// The first role's bundle was split with the middle role.
    Return3,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::SmallInstance => "small-instance",
            Branch::EqualBudget => "equal-budget",
            Branch::Return1 => "return-1",
            Branch::Return2 => "return-2",
            Branch::Return3 => "return-3",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchDetail {
    SmallInstance,
    EqualBudget(Box<EqualBudgetOutcome>),
    Else(Box<ElseOutcome>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeAgentResult {
    /// Final allocation over all goods of the input instance.
    pub allocation: Allocation,
    pub branch: Branch,
    pub alpha: AlphaParams,
    /// Nash optimum of the input instance.
    pub opt: Allocation,
    /// Input instance rescaled so that every agent values her optimum bundle at 1.
    /// Equal to the input for small instances.
    pub normalized: Instance,
    /// Agents by increasing budget, ties by id.
    pub roles: [AgentId; 3],
    pub setaside: Option<SetAside>,
    /// Goods left after reserving.
    pub pool: Bundle,
    /// Best normalized value of each agent over the pool at the lowest budget, by agent id.
    pub monopoly: Vec<Rational>,
    /// The allocation before agents could trade for their reserved goods.
    pub before_setaside: Allocation,
    /// Agents who traded their bundle for their reserved good.
    pub took_setaside: Vec<AgentId>,
    pub detail: BranchDetail,
}

/// Runs the three-agent procedure on `instance`.
pub fn efx_3a(instance: &Instance, alpha: &AlphaParams, budget: &SearchBudget) -> Result<ThreeAgentResult> {
    if instance.num_agents() != 3 {
        return Err(Error::AgentCount { expected: 3, found: instance.num_agents() });
    }
    let everyone = [0, 1, 2];
    let all = instance.all_goods();
    let opt = max_nsw_allocation(instance, &everyone, &all, budget)?;
    let mut roles = everyone;
    roles.sort_by(|&a, &b| instance.budget(a).cmp(instance.budget(b)).then(a.cmp(&b)));

    if instance.num_goods() <= 3 {
        return Ok(ThreeAgentResult {
            allocation: opt.clone(),
            branch: Branch::SmallInstance,
            alpha: alpha.clone(),
            opt: opt.clone(),
            normalized: instance.clone(),
            roles,
            setaside: None,
            pool: all,
            monopoly: Vec::new(),
            before_setaside: opt,
            took_setaside: Vec::new(),
            detail: BranchDetail::SmallInstance,
        });
    }

    let normalized = normalize(instance, &opt)?;
    let (pool, setaside) = preprocess(&normalized, &opt)?;
    let low = normalized.budget(roles[0]).clone();
    let monopoly: Vec<Rational> = everyone
        .iter()
        .map(|&i| knapsack(&normalized, i, &pool, &low).value)
        .collect();
    let a = alpha.alpha();
    let (m2, m3) = (&monopoly[roles[1]], &monopoly[roles[2]]);

    let (branch, inner, detail) = if m2 >= a && m3 >= a {
        let reduced = normalized.with_budgets(&[low.clone(), low.clone(), low])?;
        let out = equal_budget_procedure(&reduced, &everyone, &pool, budget)?;
        (Branch::EqualBudget, out.allocation.clone(), BranchDetail::EqualBudget(Box::new(out)))
    } else {
        let out = else_procedure(&normalized, roles, &pool, a, [m2, m3], budget)?;
        (out.branch, out.allocation.clone(), BranchDetail::Else(Box::new(out)))
    };

    let before_setaside = inner.with_scope(all.clone())?;
    let mut bundles = before_setaside.bundles().to_vec();
    let mut took_setaside = Vec::new();
    for i in everyone {
        if let Some(s) = setaside.good(i) {
            if *setaside.value(i) > normalized.value_of(i, &bundles[i]) {
                bundles[i] = Bundle::singleton(s);
                took_setaside.push(i);
            }
        }
    }
    let allocation = Allocation::new(bundles, all)?;
    Ok(ThreeAgentResult {
        allocation,
        branch,
        alpha: alpha.clone(),
        opt,
        normalized,
        roles,
        setaside: Some(setaside),
        pool,
        monopoly,
        before_setaside,
        took_setaside,
        detail,
    })
}
