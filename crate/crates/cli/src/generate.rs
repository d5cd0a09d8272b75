//! Seeded random instances.

use budgeted_efx::{max_nsw_allocation, normalize, Agent, Error, Instance, Rational, SearchBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

const MAX_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub agents: usize,
    pub min_goods: usize,
    pub max_goods: usize,
    /// Costs are drawn from `1..=max_cost`.
    pub max_cost: u32,
    /// Values are drawn from `0..=max_value`.
    pub max_value: u32,
    /// Largest ratio between two budgets; 1 gives equal budgets.
    pub budget_spread: u32,
}

impl GenConfig {
    pub fn two_agent() -> Self {
        GenConfig { agents: 2, min_goods: 2, max_goods: 10, max_cost: 20, max_value: 20, budget_spread: 10 }
    }

    pub fn three_agent() -> Self {
        GenConfig { agents: 3, min_goods: 4, max_goods: 9, ..Self::two_agent() }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Usage(format!("generator: {what}")));
        if self.agents == 0 {
            return bad("need at least one agent");
        }
        if self.min_goods > self.max_goods {
            return bad("empty goods range");
        }
        if self.max_cost == 0 || self.budget_spread == 0 {
            return bad("cost bound and budget spread must be positive");
        }
        Ok(())
    }
}

/// Draws instances until every agent gets positive value in the Nash optimum.
pub struct Generator {
    config: GenConfig,
    rng: ChaCha8Rng,
    budget: SearchBudget,
}

impl Generator {
    pub fn new(config: GenConfig, seed: u64) -> Result<Self, CliError> {
        config.validate()?;
        Ok(Generator { config, rng: ChaCha8Rng::seed_from_u64(seed), budget: SearchBudget::default() })
    }

    fn draw(&mut self) -> Instance {
        let c = &self.config;
        let m = self.rng.random_range(c.min_goods..=c.max_goods);
        let costs: Vec<u32> = (0..m).map(|_| self.rng.random_range(1..=c.max_cost)).collect();
        let total: u32 = costs.iter().sum();
        // The lowest budget covers between a tenth and half of everything.
        let low = self.rng.random_range((total / 10).max(1)..=(total / 2).max(1));
        let agents = (0..c.agents)
            .map(|_| {
                let tenths = self.rng.random_range(10..=10 * c.budget_spread);
                let budget = Rational::new((low * tenths).into(), 10.into());
                let values = (0..m).map(|_| int(self.rng.random_range(0..=c.max_value))).collect();
                Agent::new(budget, values)
            })
            .collect();
        Instance::new(costs.into_iter().map(int).collect(), agents).expect("generated numbers are non-negative")
    }

    pub fn next_instance(&mut self) -> Result<Instance, CliError> {
        for _ in 0..MAX_RETRIES {
            let inst = self.draw();
            let everyone: Vec<usize> = inst.agent_ids().collect();
            let opt = max_nsw_allocation(&inst, &everyone, &inst.all_goods(), &self.budget)?;
            match normalize(&inst, &opt) {
                Ok(_) => return Ok(inst),
                Err(Error::DegenerateOptimum(_)) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        Err(CliError::Usage(format!("generator gave up after {MAX_RETRIES} degenerate draws")))
    }

    pub fn take(&mut self, count: usize) -> Result<Vec<Instance>, CliError> {
        (0..count).map(|_| self.next_instance()).collect()
    }
}

fn int(n: u32) -> Rational {
    Rational::from_integer(n.into())
}
