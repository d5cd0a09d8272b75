//! Recomputes the guarantees of a three-agent run.
//!
//! Value bounds are stated on the rescaled instance, where every agent's
//! optimum bundle is worth 1, so the optimal product is 1 and the welfare
//! bounds compare the final product directly against constants.

pub use crate::certificate::Check;

use crate::certificate::certify_two_agent;
use crate::fairness::{is_efx, nsw_product};
use crate::model::{is_budget_feasible, AgentId, Allocation, Bundle, Instance};
use crate::rational::{int, pow, ratio, Rational, Show};
use crate::valuation::vmax;

use super::{Branch, BranchDetail, SetAside, ThreeAgentResult};

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Lower bound on the final rescaled product for the branch taken.
pub fn branch_product_bound(branch: Branch, alpha: &Rational) -> Option<Rational> {
    let one = int(1);
    match branch {
        Branch::SmallInstance => None,
        Branch::Return1 => Some(pow(&(&one - alpha), 2) / int(4 * 6 * 6)),
        Branch::Return2 => Some((&one - alpha) / int(4 * 7 * 6)),
        Branch::Return3 => Some((&one - alpha * int(11)) / int(6 * 13 * 21)),
        Branch::EqualBudget => Some(pow(alpha, 2) / int(15 * 15 * 18)),
    }
}

/// `(1/171)^3`, the product ratio promised at `alpha = 1/35`.
pub fn guaranteed_product_bound() -> Rational {
    pow(&ratio(1, 171), 3)
}

/// All checks for a run of [`super::efx_3a`] on `instance`.
pub fn certify(instance: &Instance, result: &ThreeAgentResult) -> Vec<Check> {
    let alloc = &result.allocation;
    let mut checks = vec![
        Check::new("budget-feasible", is_budget_feasible(instance, alloc), "final allocation"),
        Check::new("efx", is_efx(instance, alloc), "final allocation"),
    ];
    let opt_product = nsw_product(instance, &result.opt);
    let product = nsw_product(instance, alloc);
    if result.alpha.alpha() == &ratio(1, 35) {
        checks.push(Check::new(
            "guaranteed-ratio",
            product >= &opt_product * guaranteed_product_bound(),
            format!("product {} against optimum {}", Show(&product), Show(&opt_product)),
        ));
    }
    let Some(setaside) = &result.setaside else {
        return checks;
    };
    let norm = &result.normalized;
    let alpha = result.alpha.alpha();
    let everyone = [0, 1, 2];
    let s: Vec<&Rational> = everyone.iter().map(|&i| setaside.value(i)).collect();

    checks.push(check_maxval(norm, setaside, &result.pool));
    let rest = restricted_opt_values(norm, &result.opt, setaside);
    checks.push(check_remainingval(&rest, &s));

    let before = &result.before_setaside;
    let monotone = everyone
        .iter()
        .all(|&i| norm.value_of(i, alloc.bundle(i)) >= norm.value_of(i, before.bundle(i)));
    checks.push(Check::new("setaside-monotone", monotone, format!("traded: {:?}", result.took_setaside)));

    let final_product = nsw_product(norm, alloc);
    if let Some(bound) = branch_product_bound(result.branch, alpha) {
        checks.push(Check::new(
            format!("{}-product", result.branch),
            final_product >= bound,
            format!("rescaled product {} against bound {}", Show(&final_product), Show(&bound)),
        ));
    }

    match &result.detail {
        BranchDetail::SmallInstance => {}
        BranchDetail::EqualBudget(out) => {
            let p: Vec<Rational> = everyone.iter().map(|&i| norm.value_of(i, out.opt_on_pool.bundle(i))).collect();
            let trimmed_ok = everyone
                .iter()
                .all(|&i| norm.value_of(i, &out.trimmed[i]) >= &p[i] / int(3) - s[i]);
            checks.push(Check::new("remaining-value", trimmed_ok, "trimmed bundles keep a third minus the reserve"));
            let v: Vec<Rational> = everyone.iter().map(|&i| norm.value_of(i, out.allocation.bundle(i))).collect();
            let holds = PERMUTATIONS.iter().any(|&[i, j, k]| {
                v[i] >= &p[i] / int(9) - s[i] / int(3)
                    && v[j] >= &p[j] / int(9) - s[j] * ratio(2, 3)
                    && v[k] >= &p[k] / int(9) - s[k]
            });
            checks.push(Check::new("three-agents-equal", holds, "some role order meets the three bounds"));
        }
        BranchDetail::Else(out) => {
            let [r1, r2, r3] = out.roles;
            let x = &out.allocation;
            let v = |i: AgentId| norm.value_of(i, x.bundle(i));
            let (o1, o2, o3) = (&rest[r1], &rest[r2], &rest[r3]);
            let (s1, s2, s3) = (s[r1], s[r2], s[r3]);
            let mut bound = |name: &str, holds: bool, what: String| checks.push(Check::new(name, holds, what));
            match out.branch {
                Branch::Return1 => {
                    bound("return-1-first", v(r1) >= *o1, format!("agent {r1}"));
                    bound("return-1-second", v(r2) > (o2 - s2 - alpha) / int(5), format!("agent {r2}"));
                    bound("return-1-third", v(r3) > (o3 - s3 - alpha) / int(5), format!("agent {r3}"));
                }
                Branch::Return2 => {
                    bound("return-2-first", v(r1) >= *o1, format!("agent {r1}"));
                    bound("return-2-second", v(r2) >= (o2 - s2) / int(6), format!("agent {r2}"));
                    bound("return-2-third", v(r3) > (o3 - s3 - alpha) / int(5), format!("agent {r3}"));
                }
                Branch::Return3 => {
                    bound("return-3-first", v(r1) >= (o1 - s1) / int(2), format!("agent {r1}"));
                    bound("return-3-second", v(r2) > (o2 - s2) / int(12), format!("agent {r2}"));
                    bound(
                        "return-3-third",
                        v(r3) > (o3 - s3 * int(11) - alpha * int(11)) / int(10),
                        format!("agent {r3}"),
                    );
                }
                _ => {}
            }
            let [_, o2r, o3r] = result.roles;
            let mut seed = vec![Bundle::new(); norm.num_agents()];
            seed[r1] = out.x1.clone();
            seed[o2r] = out.opt_rest.bundle(o2r).clone();
            seed[o3r] = out.opt_rest.bundle(o3r).clone();
            if let Ok(seed) = Allocation::new(seed, result.pool.clone()) {
                for c in certify_two_agent(norm, (o2r, o3r), &seed, &out.pair_23) {
                    checks.push(Check::new(format!("second-third-{}", c.name), c.holds, c.detail));
                }
            }
            if let Some(p12) = &out.pair_12 {
                let mut seed = vec![Bundle::new(); norm.num_agents()];
                seed[r2] = out.x1.clone();
                seed[r3] = out.pair_23.allocation.bundle(r3).clone();
                if let Ok(seed) = Allocation::new(seed, result.pool.clone()) {
                    for c in certify_two_agent(norm, (r1, r2), &seed, p12) {
                        checks.push(Check::new(format!("first-second-{}", c.name), c.holds, c.detail));
                    }
                }
            }
        }
    }
    checks
}

/// `v_i(s_i) >= v^max_i({g})` for every agent and every good left in the pool.
fn check_maxval(norm: &Instance, setaside: &SetAside, pool: &Bundle) -> Check {
    let offender = (0..norm.num_agents()).find_map(|i| {
        pool.iter()
            .find(|&g| vmax(norm, i, &Bundle::singleton(g)) > *setaside.value(i))
            .map(|g| (i, g))
    });
    Check::new(
        "preprocess-maxval",
        offender.is_none(),
        match offender {
            None => "every reserve beats every affordable remaining good".to_string(),
            Some((i, g)) => format!("agent {i} prefers remaining good {g}"),
        },
    )
}

/// Rescaled value of each optimum bundle once the reserved goods are removed.
pub fn restricted_opt_values(norm: &Instance, opt: &Allocation, setaside: &SetAside) -> Vec<Rational> {
    let reserved = setaside.as_bundle();
    (0..norm.num_agents())
        .map(|i| norm.value_of(i, &opt.bundle(i).difference(&reserved)))
        .collect()
}

fn check_remainingval(rest: &[Rational], s: &[&Rational]) -> Check {
    let one = int(1);
    let holds = PERMUTATIONS.iter().any(|&[i, j, k]| {
        let first = rest[i] >= &one - s[i] * int(3) && rest[j] == one && rest[k] == one;
        let second = rest[i] >= &one - s[i] * int(2) && rest[j] >= &one - s[j] && rest[k] == one;
        let third = rest[i] >= &one - s[i] && rest[j] >= &one - s[j] && rest[k] >= &one - s[k];
        first || second || third
    });
    Check::new(
        "preprocess-remainingval",
        holds,
        format!("remaining optimum values {}, {}, {}", Show(&rest[0]), Show(&rest[1]), Show(&rest[2])),
    )
}
