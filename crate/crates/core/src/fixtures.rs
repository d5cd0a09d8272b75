//! Small hand-built instances used in tests, docs and the CLI.

use crate::model::{Agent, Instance};
use crate::rational::{int, ratio, Rational};

/// Two agents, three goods, unit budgets.
///
/// Goods 0 and 1 cost 1/2 each, good 2 costs 1. Agent 0 values the halves at
/// 1/2 each and good 2 at nothing; agent 1 values the halves at `1 + eps` each
/// and good 2 at 1. The best EF1 product is `(1 + eps) / 2` against an
/// optimum of 1; the only EF1 and Pareto efficient allocations give each
/// agent one of the halves.
pub fn halves_and_whole(eps: Rational) -> Instance {
    let high = int(1) + eps;
    Instance::new(
        vec![ratio(1, 2), ratio(1, 2), int(1)],
        vec![
            Agent::new(int(1), vec![ratio(1, 2), ratio(1, 2), int(0)]),
            Agent::new(int(1), vec![high.clone(), high, int(1)]),
        ],
    )
    .expect("fixture is well formed")
}

/// Three agents and three goods with overlapping tastes.
pub fn three_goods() -> Instance {
    Instance::new(
        vec![int(2), int(1), int(1)],
        vec![
            Agent::new(int(2), vec![int(3), int(1), int(1)]),
            Agent::new(int(1), vec![int(2), int(2), int(1)]),
            Agent::new(int(3), vec![int(1), int(1), int(4)]),
        ],
    )
    .expect("fixture is well formed")
}
