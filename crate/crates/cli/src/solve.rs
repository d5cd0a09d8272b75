//! The `solve` and `verify` commands as library functions.
//!
//! Every boolean in a report is recomputed from the instance and the final
//! allocation; nothing is copied from the algorithms' own bookkeeping.

use budgeted_efx::efx_three::BranchDetail;
use budgeted_efx::efx_two::TwoAgentPath;
use budgeted_efx::rational::Show;
use budgeted_efx::{
    allocation_values, best_allocation_under_predicate, certify, certify_two_agent, efx_2a, efx_3a, efx_violation,
    is_budget_feasible, is_ef1, is_efx, is_envy_free, is_pareto_efficient, max_nsw_allocation, nsw_product,
    AlphaParams, Allocation, Bundle, Check, EfxViolation, Error, Instance, Predicate, Rational, SearchBudget,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::io::{serialize_instance, AllocationFile, Exact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Two-agent EFx repair of a seed allocation.
    Efx2,
    /// Three-agent EFx with a constant fraction of the optimal Nash welfare.
    Efx3,
    /// Exhaustive maximum Nash welfare.
    OracleNsw,
    /// Exhaustive maximum Nash welfare among EFx allocations.
    OracleEfx,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Efx2 => "efx2",
            Algorithm::Efx3 => "efx3",
            Algorithm::OracleNsw => "oracle-nsw",
            Algorithm::OracleEfx => "oracle-efx",
        }
    }
}

/// Where the two-agent procedure starts from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedAllocation {
    Opt,
    Given(Allocation),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub alpha: Rational,
    pub seed: SeedAllocation,
    pub budget: SearchBudget,
}

impl SolveOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        SolveOptions {
            algorithm,
            alpha: AlphaParams::guaranteed_max(),
            seed: SeedAllocation::Opt,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentReport {
    pub id: usize,
    pub budget: Exact,
    pub cost: Exact,
    pub value: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub agent: usize,
    pub owner: usize,
    pub removed: usize,
    pub envied_part: Vec<usize>,
}

impl From<EfxViolation> for WitnessReport {
    fn from(v: EfxViolation) -> Self {
        WitnessReport { agent: v.agent, owner: v.owner, removed: v.removed, envied_part: v.envied_part.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EfxReport {
    pub holds: bool,
    pub witness: Option<WitnessReport>,
}

impl EfxReport {
    fn of(instance: &Instance, allocation: &Allocation) -> Self {
        let witness = efx_violation(instance, allocation).map(WitnessReport::from);
        EfxReport { holds: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl From<Check> for CheckReport {
    fn from(c: Check) -> Self {
        CheckReport { name: c.name, holds: c.holds, detail: c.detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Exact>,
    /// Whether the algorithm promises the checks below at these parameters.
    pub guaranteed: bool,
    pub allocation: AllocationFile,
    pub agents: Vec<AgentReport>,
    pub nsw_product: Exact,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_product: Option<Exact>,
    pub budget_feasible: bool,
    pub efx: EfxReport,
    pub checks: Vec<CheckReport>,
    pub trace: Value,
}

impl SolveReport {
    /// A promised check failed.
    pub fn violates_guarantee(&self) -> bool {
        self.guaranteed && self.checks.iter().any(|c| !c.holds)
    }
}

/// SHA-256 of the canonical serialization, so formatting does not change it.
pub fn instance_hash(instance: &Instance) -> String {
    hex::encode(Sha256::digest(serialize_instance(instance).as_bytes()))
}

fn agent_reports(instance: &Instance, allocation: &Allocation) -> Vec<AgentReport> {
    allocation_values(instance, allocation)
        .into_iter()
        .enumerate()
        .map(|(id, value)| AgentReport {
            id,
            budget: Exact(instance.budget(id).clone()),
            cost: Exact(instance.cost_of(allocation.bundle(id))),
            value: Exact(value),
        })
        .collect()
}

fn goods(bundle: &Bundle) -> Value {
    json!(bundle.to_vec())
}

fn require_agents(instance: &Instance, algorithm: Algorithm, n: usize) -> Result<(), CliError> {
    if instance.num_agents() != n {
        return Err(CliError::Usage(format!(
            "{} needs {n} agents, the instance has {}",
            algorithm.name(),
            instance.num_agents()
        )));
    }
    Ok(())
}

pub fn solve(instance: &Instance, options: &SolveOptions) -> Result<SolveReport, CliError> {
    let everyone: Vec<usize> = instance.agent_ids().collect();
    let all = instance.all_goods();
    let budget = &options.budget;
    let mut alpha = None;
    let mut guaranteed = true;
    let mut opt_product = None;
    let (allocation, mut checks, trace) = match options.algorithm {
        Algorithm::Efx2 => {
            require_agents(instance, options.algorithm, 2)?;
            let (seed, seed_name) = match &options.seed {
                SeedAllocation::Opt => {
                    let opt = max_nsw_allocation(instance, &everyone, &all, budget)?;
                    opt_product = Some(nsw_product(instance, &opt));
                    (opt, "opt")
                }
                SeedAllocation::Given(a) => {
                    instance.check_allocation(a)?;
                    (a.clone(), "file")
                }
            };
            let out = efx_2a(instance, (0, 1), &seed)?;
            let mut checks = certify_two_agent(instance, (0, 1), &seed, &out);
            let product = nsw_product(instance, &out.allocation);
            let seed_product = nsw_product(instance, &seed);
            checks.push(Check::new(
                "ratio-vs-seed",
                &product * Rational::from_integer(2.into()) >= seed_product,
                format!("product {} against seed product {}", Show(&product), Show(&seed_product)),
            ));
            let t = &out.trace;
            let extra = match &t.path {
                TwoAgentPath::AlreadyEfx | TwoAgentPath::MutualSwap => json!({}),
                TwoAgentPath::Removal { removed } => json!({ "removed": removed }),
                TwoAgentPath::Split { split } => json!({ "split": [goods(&split.first), goods(&split.second)] }),
            };
            let trace = json!({
                "seed": seed_name,
                "seed_allocation": AllocationFile::from_allocation(&seed),
                "path": t.path.name(),
                "detail": extra,
                "envier": t.envier,
                "relabeled": t.relabeled,
                "matched": [goods(&out.matched[0]), goods(&out.matched[1])],
                "unallocated_r": goods(&out.unallocated_r),
                "leftout_rprime": goods(&out.leftout_rprime),
            });
            (out.allocation, checks, trace)
        }
        Algorithm::Efx3 => {
            require_agents(instance, options.algorithm, 3)?;
            let params = AlphaParams::experimental(options.alpha.clone())?;
            guaranteed = params.is_guaranteed();
            alpha = Some(Exact(params.alpha().clone()));
            let out = efx_3a(instance, &params, budget)?;
            opt_product = Some(nsw_product(instance, &out.opt));
            let checks = certify(instance, &out);
            let mut trace = json!({
                "branch": out.branch.name(),
                "roles": out.roles,
                "opt": AllocationFile::from_allocation(&out.opt),
            });
            if let Some(s) = &out.setaside {
                trace["setaside"] = json!(s.goods);
                trace["pool"] = goods(&out.pool);
                trace["monopoly"] = json!(out.monopoly.iter().cloned().map(Exact).collect::<Vec<_>>());
                trace["took_setaside"] = json!(out.took_setaside);
            }
            match &out.detail {
                BranchDetail::SmallInstance => {}
                BranchDetail::EqualBudget(e) => {
                    trace["trimmed_away"] = json!(e.trimmed_away);
                    trace["exchanges"] = json!(e.exchanges);
                }
                BranchDetail::Else(e) => {
                    trace["roles"] = json!(e.roles);
                    trace["roles_exchanged"] = json!(e.roles_exchanged);
                    trace["first_bundle"] = goods(&e.x1);
                    if let Some(d) = &e.dropped_3 {
                        trace["dropped"] = goods(d);
                    }
                }
            }
            (out.allocation, checks, trace)
        }
        Algorithm::OracleNsw => {
            let opt = max_nsw_allocation(instance, &everyone, &all, budget)?;
            opt_product = Some(nsw_product(instance, &opt));
            (opt, Vec::new(), json!({}))
        }
        Algorithm::OracleEfx => {
            let (best, _) = best_allocation_under_predicate(instance, Predicate::Efx, budget)?;
            let opt = max_nsw_allocation(instance, &everyone, &all, budget)?;
            opt_product = Some(nsw_product(instance, &opt));
            let checks = vec![Check::new("efx", is_efx(instance, &best), "best EFx allocation")];
            (best, checks, json!({}))
        }
    };
    if !checks.iter().any(|c| c.name == "budget-feasible") {
        checks.push(Check::new("budget-feasible", is_budget_feasible(instance, &allocation), "final allocation"));
    }
    Ok(SolveReport {
        algorithm: options.algorithm.name().to_string(),
        input_sha256: instance_hash(instance),
        alpha,
        guaranteed,
        allocation: AllocationFile::from_allocation(&allocation),
        agents: agent_reports(instance, &allocation),
        nsw_product: Exact(nsw_product(instance, &allocation)),
        opt_product: opt_product.map(Exact),
        budget_feasible: is_budget_feasible(instance, &allocation),
        efx: EfxReport::of(instance, &allocation),
        checks: checks.into_iter().map(CheckReport::from).collect(),
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub input_sha256: String,
    pub allocation: AllocationFile,
    pub agents: Vec<AgentReport>,
    pub budget_feasible: bool,
    pub envy_free: bool,
    pub ef1: bool,
    pub efx: EfxReport,
    /// `None` when the search cap was hit.
    pub pareto_efficient: Option<bool>,
    pub nsw_product: Exact,
}

impl VerifyReport {
    pub fn passes(&self) -> bool {
        self.budget_feasible && self.efx.holds
    }
}

pub fn verify(instance: &Instance, allocation: &Allocation, budget: &SearchBudget) -> Result<VerifyReport, CliError> {
    instance.check_allocation(allocation)?;
    let budget_feasible = is_budget_feasible(instance, allocation);
    let pareto_efficient = if budget_feasible {
        match is_pareto_efficient(instance, allocation, budget) {
            Ok(p) => Some(p),
            Err(Error::SearchBudgetExhausted(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        Some(false)
    };
    Ok(VerifyReport {
        input_sha256: instance_hash(instance),
        allocation: AllocationFile::from_allocation(allocation),
        agents: agent_reports(instance, allocation),
        budget_feasible,
        envy_free: is_envy_free(instance, allocation),
        ef1: is_ef1(instance, allocation),
        efx: EfxReport::of(instance, allocation),
        pareto_efficient,
        nsw_product: Exact(nsw_product(instance, allocation)),
    })
}
