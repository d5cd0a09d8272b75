//! EFx for two agents starting from any budget-feasible allocation.
//!
//! The envying agent ends with at least her starting value. The envied agent
//! usually keeps at least half of hers, but not always: the removal loop stops
//! at the first perfect matching, which can hand her the set-aside goods.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fairness::efx_envies;
use crate::model::{AgentId, Allocation, Bundle, GoodId, Instance};
use crate::oracles::{leximin_pp_split, SplitPair};
use crate::rational::{ratio, Rational};
use crate::valuation::{best_subset, vmax};

/// Bipartite graph between agents and candidate bundles. Agent `a` is joined
/// to bundle `j` when no bundle minus any one of its goods is worth more to
/// `a` than bundle `j` (all worth measured by `v^max_a`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityGraph {
    pub agents: Vec<AgentId>,
    pub bundles: Vec<(String, Bundle)>,
    /// `(agent slot, bundle index)` pairs.
    pub edges: BTreeSet<(usize, usize)>,
    /// `worth[slot][j] = v^max_{agents[slot]}(bundles[j])`.
    pub worth: Vec<Vec<Rational>>,
}

impl FeasibilityGraph {
    pub fn has_edge(&self, slot: usize, bundle: usize) -> bool {
        self.edges.contains(&(slot, bundle))
    }

    pub fn degree(&self, slot: usize) -> usize {
        self.edges.iter().filter(|(s, _)| *s == slot).count()
    }

    pub fn slot_of(&self, agent: AgentId) -> Option<usize> {
        self.agents.iter().position(|&a| a == agent)
    }
}

pub fn build_feasibility_graph(
    instance: &Instance,
    agents: &[AgentId],
    bundles: Vec<(String, Bundle)>,
) -> Result<FeasibilityGraph> {
    for &a in agents {
        instance.check_agent(a)?;
    }
    let mut seen = Bundle::new();
    for (_, b) in &bundles {
        instance.check_bundle(b)?;
        if let Some(g) = b.iter().find(|&g| seen.contains(g)) {
            return Err(Error::OverlappingBundles(g));
        }
        seen = seen.union(b);
    }
    let mut edges = BTreeSet::new();
    let mut worth = Vec::with_capacity(agents.len());
    for (slot, &a) in agents.iter().enumerate() {
        let values: Vec<Rational> = bundles.iter().map(|(_, b)| vmax(instance, a, b)).collect();
        let threshold = bundles
            .iter()
            .flat_map(|(_, b)| b.iter().map(move |g| b.without(g)))
            .map(|rest| vmax(instance, a, &rest))
            .max()
            .unwrap_or_else(Rational::zero);
        for (j, v) in values.iter().enumerate() {
            if *v >= threshold {
                edges.insert((slot, j));
            }
        }
        worth.push(values);
    }
    Ok(FeasibilityGraph { agents: agents.to_vec(), bundles, edges, worth })
}

/// Perfect matching of a two-agent graph, as `[bundle of agents[0], bundle of agents[1]]`.
///
/// Maximizes the priority agent's worth, then the secondary agent's, then
/// prefers the lowest bundle index for the priority agent and then for the
/// secondary one. `None` if the agents are not the graph's two agents or no
/// perfect matching exists.
pub fn select_perfect_matching(
    graph: &FeasibilityGraph,
    priority_agent: AgentId,
    secondary_agent: AgentId,
) -> Option<[usize; 2]> {
    if graph.agents.len() != 2 || priority_agent == secondary_agent {
        return None;
    }
    let p = graph.slot_of(priority_agent)?;
    let s = graph.slot_of(secondary_agent)?;
    let n = graph.bundles.len();
    let mut best: Option<(usize, usize)> = None;
    for jp in 0..n {
        for js in 0..n {
            if jp == js || !graph.has_edge(p, jp) || !graph.has_edge(s, js) {
                continue;
            }
            let better = match best {
                None => true,
                Some((bp, bs)) => {
                    let now = (&graph.worth[p][jp], &graph.worth[s][js]);
                    let then = (&graph.worth[p][bp], &graph.worth[s][bs]);
                    now > then
                }
            };
            if better {
                best = Some((jp, js));
            }
        }
    }
    best.map(|(jp, js)| {
        let mut out = [0; 2];
        out[p] = jp;
        out[s] = js;
        out
    })
}

/// Which route the two-agent procedure took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoAgentPath {
    /// The input was already EFx.
    AlreadyEfx,
    /// Both agents EFx-envied each other; they swapped.
    MutualSwap,
    /// The envied bundle lost these goods, in order, before a matching existed.
    Removal { removed: Vec<GoodId> },
    /// The envied bundle was split in two.
    Split { split: SplitPair },
}

impl TwoAgentPath {
    pub fn name(&self) -> &'static str {
        match self {
            TwoAgentPath::AlreadyEfx => "already-efx",
            TwoAgentPath::MutualSwap => "mutual-swap",
            TwoAgentPath::Removal { .. } => "removal",
            TwoAgentPath::Split { .. } => "split",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAgentTrace {
    pub path: TwoAgentPath,
    /// The agent who EFx-envied the other, when exactly one did.
    pub envier: Option<AgentId>,
    /// The envier was the second agent of the pair, so roles were swapped.
    pub relabeled: bool,
    /// `v_i(X_i)` of the input, in pair order.
    pub input_values: [Rational; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAgentResult {
    /// The input allocation with the pair's bundles replaced by their final,
    /// budget-feasible bundles.
    pub allocation: Allocation,
    /// Bundles the pair was matched to before trimming to budget, in pair order.
    pub matched: [Bundle; 2],
    /// The candidate bundle nobody was matched to.
    pub unallocated_r: Bundle,
    /// Goods of the matched bundles cut away to respect budgets.
    pub leftout_rprime: Bundle,
    pub trace: TwoAgentTrace,
}

/// Turns the pair's bundles in `input` into an EFx allocation between them.
///
/// Goods outside the pair's bundles are not touched; the other agents'
/// bundles are copied over unchanged.
pub fn efx_2a(instance: &Instance, pair: (AgentId, AgentId), input: &Allocation) -> Result<TwoAgentResult> {
    let (a, b) = pair;
    instance.check_agent(a)?;
    instance.check_agent(b)?;
    instance.check_allocation(input)?;
    if a == b {
        return Err(Error::Precondition("the pair needs two distinct agents".into()));
    }
    let xa = input.bundle(a).clone();
    let xb = input.bundle(b).clone();
    for (agent, bundle) in [(a, &xa), (b, &xb)] {
        if !instance.is_affordable(agent, bundle) {
            return Err(Error::Precondition(format!("bundle {bundle} is over the budget of agent {agent}")));
        }
    }
    let input_values = [instance.value_of(a, &xa), instance.value_of(b, &xb)];
    let a_envies = efx_envies(instance, &input_values[0], a, &xb);
    let b_envies = efx_envies(instance, &input_values[1], b, &xa);

    let finish = |matched: [Bundle; 2], unallocated_r: Bundle, trace: TwoAgentTrace| {
        let final_a = best_subset(instance, a, &matched[0]).witness;
        let final_b = best_subset(instance, b, &matched[1]).witness;
        let leftout_rprime = matched[0].difference(&final_a).union(&matched[1].difference(&final_b));
        let mut bundles = input.bundles().to_vec();
        bundles[a] = final_a;
        bundles[b] = final_b;
        let allocation = Allocation::new(bundles, input.scope().clone())?;
        Ok(TwoAgentResult { allocation, matched, unallocated_r, leftout_rprime, trace })
    };
    let trace = |path, envier, relabeled| TwoAgentTrace {
        path,
        envier,
        relabeled,
        input_values: input_values.clone(),
    };

    if !a_envies && !b_envies {
        return finish([xa, xb], Bundle::new(), trace(TwoAgentPath::AlreadyEfx, None, false));
    }
    if a_envies && b_envies {
        return finish([xb, xa], Bundle::new(), trace(TwoAgentPath::MutualSwap, None, false));
    }

    let (e, d, x1, x2, relabeled) = if a_envies { (a, b, xa, xb, false) } else { (b, a, xb, xa, true) };
    let own = instance.value_of(e, &x1);
    let half_of_envied = vmax(instance, e, &x2) * ratio(1, 2);

    let (graph, path) = if own >= half_of_envied {
        let mut x2 = x2;
        let mut r = Bundle::new();
        let mut removed = Vec::new();
        loop {
            let bundles = vec![("X1".to_string(), x1.clone()), ("X2".to_string(), x2.clone()), ("R".to_string(), r.clone())];
            let graph = build_feasibility_graph(instance, &[e, d], bundles)?;
            if select_perfect_matching(&graph, d, e).is_some() {
                break (graph, TwoAgentPath::Removal { removed });
            }
            let g = removal_choice(instance, e, &x2)
                .ok_or_else(|| Error::Invariant("envied bundle emptied without a perfect matching".into()))?;
            x2.remove(g);
            r.insert(g);
            removed.push(g);
        }
    } else {
        let split = leximin_pp_split(instance, e, &x2)?;
        let bundles = vec![
            ("X1".to_string(), x1.clone()),
            ("X2'".to_string(), split.first.clone()),
            ("X2''".to_string(), split.second.clone()),
        ];
        (build_feasibility_graph(instance, &[e, d], bundles)?, TwoAgentPath::Split { split })
    };

    let [je, jd] = select_perfect_matching(&graph, d, e)
        .ok_or_else(|| Error::Invariant("split produced no perfect matching".into()))?;
    let unmatched = (0..graph.bundles.len())
        .find(|&j| j != je && j != jd)
        .map(|j| graph.bundles[j].1.clone())
        .unwrap_or_default();
    let (me, md) = (graph.bundles[je].1.clone(), graph.bundles[jd].1.clone());
    let matched = if relabeled { [md, me] } else { [me, md] };
    finish(matched, unmatched, trace(path, Some(e), relabeled))
}

/// The good of `x2` whose removal keeps the most `v^max_e`, then the one `e`
/// values least, then the lowest id. Without binding budgets this is simply
/// `e`'s least valued good.
fn removal_choice(instance: &Instance, e: AgentId, x2: &Bundle) -> Option<GoodId> {
    x2.iter()
        .map(|g| (vmax(instance, e, &x2.without(g)), g))
        .max_by(|(kept_g, g), (kept_h, h)| {
            kept_g
                .cmp(kept_h)
                .then_with(|| instance.value(e, *h).cmp(instance.value(e, *g)))
                .then_with(|| h.cmp(g))
        })
        .map(|(_, g)| g)
}
