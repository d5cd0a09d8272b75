//! Reserving one valuable good per agent before the main allocation.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{AgentId, Allocation, Bundle, GoodId, Instance};
use crate::rational::Rational;

/// One reserved good (or none) per agent, indexed by agent id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetAside {
    pub goods: Vec<Option<GoodId>>,
    /// `v_i(s_i)`, zero when agent `i` has no reserved good.
    pub values: Vec<Rational>,
}

impl SetAside {
    pub fn good(&self, agent: AgentId) -> Option<GoodId> {
        self.goods[agent]
    }

    pub fn value(&self, agent: AgentId) -> &Rational {
        &self.values[agent]
    }

    pub fn as_bundle(&self) -> Bundle {
        self.goods.iter().flatten().copied().collect()
    }
}

/// Up to three individually affordable goods the agent likes best, by value
/// and then by lowest id.
pub fn favorite_goods(instance: &Instance, agent: AgentId) -> Vec<GoodId> {
    let budget = instance.budget(agent);
    let mut goods: Vec<GoodId> = (0..instance.num_goods())
        .filter(|&g| instance.cost(g) <= budget)
        .collect();
    goods.sort_by(|&g, &h| instance.value(agent, h).cmp(instance.value(agent, g)).then(g.cmp(&h)));
    goods.truncate(3);
    goods
}

/// Matches each agent to at most one of her favorite goods.
///
/// An agent whose optimum bundle holds one of her favorites must receive a
/// good worth at least her best such favorite. Among admissible matchings the
/// heaviest wins (weights `v_i(g)`), then the one matching more agents, then
/// the lexicographically smallest vector of matched ids with "none" last.
/// Returns the pool without the matched goods.
pub fn preprocess(instance: &Instance, opt: &Allocation) -> Result<(Bundle, SetAside)> {
    instance.check_allocation(opt)?;
    let n = instance.num_agents();
    let favorites: Vec<Vec<GoodId>> = (0..n).map(|i| favorite_goods(instance, i)).collect();
    let floors: Vec<Option<Rational>> = (0..n)
        .map(|i| {
            favorites[i]
                .iter()
                .filter(|&&g| opt.bundle(i).contains(g))
                .map(|&g| instance.value(i, g).clone())
                .max()
        })
        .collect();

    type Key = (Rational, usize, Vec<std::cmp::Reverse<usize>>);
    let mut best: Option<(Key, Vec<Option<GoodId>>)> = None;
    let mut choice: Vec<Option<GoodId>> = vec![None; n];
    let mut visit = |choice: &[Option<GoodId>]| {
        let admissible = (0..n).all(|i| match (&floors[i], choice[i]) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(floor), Some(g)) => instance.value(i, g) >= floor,
        });
        if !admissible {
            return;
        }
        let weight = (0..n)
            .filter_map(|i| choice[i].map(|g| instance.value(i, g)))
            .fold(Rational::zero(), |acc, v| acc + v);
        let matched = choice.iter().flatten().count();
        let ids = choice.iter().map(|c| std::cmp::Reverse(c.unwrap_or(usize::MAX))).collect();
        let key = (weight, matched, ids);
        if best.as_ref().is_none_or(|(b, _)| key > *b) {
            best = Some((key, choice.to_vec()));
        }
    };
    enumerate_matchings(&favorites, 0, &mut choice, &mut visit);
    let (_, goods) = best.ok_or(Error::PreprocessInfeasible)?;

    let values = (0..n)
        .map(|i| goods[i].map_or_else(Rational::zero, |g| instance.value(i, g).clone()))
        .collect();
    let setaside = SetAside { goods, values };
    let pool = instance.all_goods().difference(&setaside.as_bundle());
    Ok((pool, setaside))
}

fn enumerate_matchings(
    favorites: &[Vec<GoodId>],
    agent: usize,
    choice: &mut Vec<Option<GoodId>>,
    visit: &mut dyn FnMut(&[Option<GoodId>]),
) {
    if agent == favorites.len() {
        visit(choice);
        return;
    }
    for &g in &favorites[agent] {
        if choice[..agent].contains(&Some(g)) {
            continue;
        }
        choice[agent] = Some(g);
        enumerate_matchings(favorites, agent + 1, choice, visit);
    }
    choice[agent] = None;
    enumerate_matchings(favorites, agent + 1, choice, visit);
}
