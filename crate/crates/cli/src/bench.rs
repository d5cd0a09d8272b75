//! Seeded guarantee suites with one CSV row per instance.

use std::path::{Path, PathBuf};
use std::time::Instant;

use budgeted_efx::{
    certify, certify_two_agent, efx_2a, efx_3a, is_budget_feasible, is_efx, max_nsw_allocation,
    max_nsw_allocation_unpruned, nsw_product, AlphaParams, Check, Instance, Rational, SearchBudget,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::generate::{GenConfig, Generator};
use crate::io::{serialize_instance, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    TwoAgent,
    ThreeAgent,
    Oracles,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::TwoAgent => "two-agent",
            Suite::ThreeAgent => "three-agent",
            Suite::Oracles => "oracles",
        }
    }

    pub fn config(self) -> GenConfig {
        match self {
            Suite::TwoAgent => GenConfig::two_agent(),
            Suite::ThreeAgent => GenConfig::three_agent(),
            Suite::Oracles => GenConfig { max_goods: 8, ..GenConfig::three_agent() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub n: usize,
    pub m: usize,
    pub algorithm: String,
    pub branch: String,
    pub product_alg: String,
    pub product_opt: String,
    pub ratio_pass: bool,
    /// Empty for the oracle suite, which makes no fairness claim.
    pub efx_pass: Option<bool>,
    pub millis: u128,
}

/// One instance's outcome and every check behind it.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub instance: Instance,
    pub row: BenchRow,
    pub checks: Vec<Check>,
}

impl Evaluation {
    pub fn passes(&self) -> bool {
        self.row.ratio_pass && self.row.efx_pass.unwrap_or(true) && self.checks.iter().all(|c| c.holds)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub seed: u64,
    pub evaluations: Vec<Evaluation>,
}

impl SuiteOutcome {
    pub fn passes(&self) -> bool {
        self.evaluations.iter().all(Evaluation::passes)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Evaluation> {
        self.evaluations.iter().filter(|e| !e.passes())
    }

    /// Per-instance rows followed by a summary row.
    pub fn rows(&self) -> Vec<BenchRow> {
        let mut rows: Vec<BenchRow> = self.evaluations.iter().map(|e| e.row.clone()).collect();
        let efx: Vec<bool> = rows.iter().filter_map(|r| r.efx_pass).collect();
        rows.push(BenchRow {
            instance_id: "summary".into(),
            n: self.suite.config().agents,
            m: rows.iter().map(|r| r.m).max().unwrap_or(0),
            algorithm: rows.first().map(|r| r.algorithm.clone()).unwrap_or_default(),
            branch: format!("{} instances", self.evaluations.len()),
            product_alg: String::new(),
            product_opt: String::new(),
            ratio_pass: rows.iter().all(|r| r.ratio_pass),
            efx_pass: (!efx.is_empty()).then(|| efx.iter().all(|&p| p)),
            millis: rows.iter().map(|r| r.millis).sum(),
        });
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            writer.serialize(row).expect("rows serialize");
        }
        String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("csv is utf-8")
    }

    /// Writes each failing instance to `dir` and returns the paths.
    pub fn dump_failures(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut paths = Vec::new();
        if self.failures().next().is_some() {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        }
        for e in self.failures() {
            let path = dir.join(format!("repro-{}-seed{}-{}.json", self.suite.name(), self.seed, e.row.instance_id));
            write_text(&path, &serialize_instance(&e.instance))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

pub fn run_suite(suite: Suite, seed: u64, count: usize, budget: &SearchBudget) -> Result<SuiteOutcome, CliError> {
    let instances = Generator::new(suite.config(), seed)?.take(count)?;
    let evaluations = instances
        .into_par_iter()
        .enumerate()
        .map(|(k, inst)| evaluate(suite, k, inst, budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteOutcome { suite, seed, evaluations })
}

pub fn evaluate(suite: Suite, index: usize, instance: Instance, budget: &SearchBudget) -> Result<Evaluation, CliError> {
    let start = Instant::now();
    let everyone: Vec<usize> = instance.agent_ids().collect();
    let all = instance.all_goods();
    let two = Rational::from_integer(2.into());
    let (algorithm, branch, alloc_product, opt_product, ratio_pass, efx_pass, checks) = match suite {
        Suite::TwoAgent => {
            let opt = max_nsw_allocation(&instance, &everyone, &all, budget)?;
            let out = efx_2a(&instance, (0, 1), &opt)?;
            let product = nsw_product(&instance, &out.allocation);
            let opt_product = nsw_product(&instance, &opt);
            let ratio = &product * &two >= opt_product;
            let efx = is_efx(&instance, &out.allocation) && is_budget_feasible(&instance, &out.allocation);
            let checks = certify_two_agent(&instance, (0, 1), &opt, &out);
            ("efx2", out.trace.path.name().to_string(), product, opt_product, ratio, Some(efx), checks)
        }
        Suite::ThreeAgent => {
            let out = efx_3a(&instance, &AlphaParams::default(), budget)?;
            let product = nsw_product(&instance, &out.allocation);
            let opt_product = nsw_product(&instance, &out.opt);
            let checks = certify(&instance, &out);
            let ratio = product >= &opt_product * budgeted_efx::efx_three::guaranteed_product_bound();
            let efx = is_efx(&instance, &out.allocation) && is_budget_feasible(&instance, &out.allocation);
            ("efx3", out.branch.name().to_string(), product, opt_product, ratio, Some(efx), checks)
        }
        Suite::Oracles => {
            let pruned = max_nsw_allocation(&instance, &everyone, &all, budget)?;
            let plain = max_nsw_allocation_unpruned(&instance, &everyone, &all, budget)?;
            let (a, b) = (nsw_product(&instance, &pruned), nsw_product(&instance, &plain));
            let same = a == b;
            ("oracle-nsw", "pruned-vs-unpruned".to_string(), a, b, same, None, Vec::new())
        }
    };
    let row = BenchRow {
        instance_id: format!("{index:04}"),
        n: instance.num_agents(),
        m: instance.num_goods(),
        algorithm: algorithm.into(),
        branch,
        product_alg: alloc_product.to_string(),
        product_opt: opt_product.to_string(),
        ratio_pass,
        efx_pass,
        millis: start.elapsed().as_millis(),
    };
    Ok(Evaluation { instance, row, checks })
}
