//! Post-hoc checks of the guarantees an allocation is supposed to meet.
//!
//! Every check recomputes its quantities from the instance and allocation.

use std::fmt;

use crate::efx_two::TwoAgentResult;
use crate::fairness::{efx_envies, is_efx_among};
use crate::model::{AgentId, Allocation, Instance};
use crate::rational::{int, Show};
use crate::valuation::vmax;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), holds, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "ok" } else { "FAILED" };
        write!(f, "{}: {} ({})", self.name, verdict, self.detail)
    }
}

pub fn all_hold(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.holds)
}

pub fn failures(checks: &[Check]) -> Vec<&Check> {
    checks.iter().filter(|c| !c.holds).collect()
}

/// Guarantees of one run of the two-agent procedure on `pair`, started from `input`.
pub fn certify_two_agent(
    instance: &Instance,
    pair: (AgentId, AgentId),
    input: &Allocation,
    result: &TwoAgentResult,
) -> Vec<Check> {
    let (a, b) = pair;
    let out = &result.allocation;
    let before = [instance.value_of(a, input.bundle(a)), instance.value_of(b, input.bundle(b))];
    let after = [instance.value_of(a, out.bundle(a)), instance.value_of(b, out.bundle(b))];
    let mut checks = Vec::new();

    checks.push(Check::new(
        "pair-efx",
        is_efx_among(instance, out, &[a, b]),
        format!("agents {a} and {b}"),
    ));
    checks.push(Check::new(
        "pair-budget-feasible",
        instance.is_affordable(a, out.bundle(a)) && instance.is_affordable(b, out.bundle(b)),
        format!("costs {} and {}", Show(&instance.cost_of(out.bundle(a))), Show(&instance.cost_of(out.bundle(b)))),
    ));
    let values = format!(
        "values {} -> {}, {} -> {}",
        Show(&before[0]),
        Show(&after[0]),
        Show(&before[1]),
        Show(&after[1])
    );
    // Without an envier both agents must keep their value.
    let (keeper, halved) = match result.trace.envier {
        Some(e) if e == a => (vec![0], Some(1)),
        Some(_) => (vec![1], Some(0)),
        None => (vec![0, 1], None),
    };
    checks.push(Check::new(
        "pair-envier-keeps-value",
        keeper.iter().all(|&x| after[x] >= before[x]),
        values.clone(),
    ));
    if let Some(y) = halved {
        checks.push(Check::new("pair-envied-keeps-half", &after[y] * int(2) >= before[y], values));
    }
    checks.push(Check::new(
        "pair-half-product",
        &after[0] * &after[1] * int(2) >= &before[0] * &before[1],
        "twice the new product covers the old one",
    ));
    let r = &result.unallocated_r;
    let no_envy_r = [a, b]
        .iter()
        .zip(&after)
        .all(|(&i, v)| vmax(instance, i, r) <= *v);
    checks.push(Check::new("pair-no-envy-of-unmatched", no_envy_r, format!("unmatched bundle {r}")));

    let rp = &result.leftout_rprime;
    let [ma, mb] = &result.matched;
    // The agent whose matched bundle was cut, if any; with equal budgets either side may be.
    let sides: Vec<(AgentId, AgentId)> = if rp.is_empty() {
        vec![(a, b), (b, a)]
    } else if rp.is_subset(ma) {
        vec![(a, b)]
    } else if rp.is_subset(mb) {
        vec![(b, a)]
    } else {
        Vec::new()
    };
    let matched_of = |i: AgentId| if i == a { ma } else { mb };
    let value_of = |i: AgentId| if i == a { &after[0] } else { &after[1] };
    let left_out_ok = sides.iter().any(|&(cut, whole)| {
        let whole_kept = out.bundle(whole) == matched_of(whole);
        let richer = instance.budget(whole) >= instance.budget(cut);
        let cut_no_envy = vmax(instance, cut, rp) <= *value_of(cut);
        let whole_no_efx_envy = !efx_envies(instance, value_of(whole), whole, rp);
        whole_kept && richer && cut_no_envy && whole_no_efx_envy
    });
    checks.push(Check::new(
        "pair-left-out",
        left_out_ok,
        format!("left-out part {rp}"),
    ));
    checks
}
