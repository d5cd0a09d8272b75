use std::path::{Path, PathBuf};
use std::process::ExitCode;

use budgeted_efx::{parse_rational, Rational, SearchBudget};
use budgeted_efx_cli::bench::{run_suite, Suite};
use budgeted_efx_cli::generate::{GenConfig, Generator};
use budgeted_efx_cli::io::{
    parse_allocation, read_instance, read_text, serialize_instance, to_canonical_json, write_text, InstanceFile,
};
use budgeted_efx_cli::solve::{solve, verify, Algorithm, SeedAllocation, SolveOptions};
use budgeted_efx_cli::{exit, search_budget, CliError, CAP_ENV};
use clap::{Args, Parser, Subcommand};

/// Budget-feasible EFx allocations with exact rational arithmetic.
#[derive(Debug, Parser)]
#[command(name = "budgeted-efx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Cap {
    /// Maximum number of search nodes for exhaustive searches [env: BUDGETED_EFX_CAP]
    #[arg(long, value_name = "N")]
    cap: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an algorithm on an instance and write a JSON report.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Monopoly threshold for efx3, as `p/q`. Guarantees hold up to 1/35.
        #[arg(long, value_parser = rational_arg)]
        alpha: Option<Rational>,
        /// Starting allocation for efx2: `opt` or a path to an allocation file.
        #[arg(long, default_value = "opt", value_name = "opt|PATH")]
        seed_allocation: String,
        #[command(flatten)]
        cap: Cap,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute fairness and welfare predicates for an allocation.
    Verify {
        instance: PathBuf,
        /// An allocation file or a solve report.
        allocation: PathBuf,
        #[command(flatten)]
        cap: Cap,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded guarantee suite and write one CSV row per instance.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where failing instances are dumped; defaults to the CSV's directory.
        #[arg(long)]
        repro_dir: Option<PathBuf>,
        #[command(flatten)]
        cap: Cap,
    },
    /// Generate seeded random instances.
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
        agents: u8,
        #[arg(long, default_value_t = 4)]
        min_goods: usize,
        #[arg(long, default_value_t = 9)]
        max_goods: usize,
        #[arg(long, default_value_t = 20)]
        max_cost: u32,
        #[arg(long, default_value_t = 20)]
        max_value: u32,
        #[arg(long, default_value_t = 10)]
        budget_spread: u32,
        /// Output directory for `instance-NNNN.json` files; one JSON array on stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn budget(cap: &Cap) -> Result<SearchBudget, CliError> {
    search_budget(cap.cap, std::env::var(CAP_ENV).ok().as_deref())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve { instance, algorithm, alpha, seed_allocation, cap, out } => {
            let inst = read_instance(&instance)?;
            let mut options = SolveOptions::new(algorithm);
            options.budget = budget(&cap)?;
            if let Some(alpha) = alpha {
                options.alpha = alpha;
            }
            if seed_allocation != "opt" {
                let path = PathBuf::from(&seed_allocation);
                let alloc = parse_allocation(&read_text(&path)?, &inst).map_err(|e| e.in_file(&path))?;
                options.seed = SeedAllocation::Given(alloc);
            }
            let report = solve(&inst, &options)?;
            emit(out.as_deref(), &to_canonical_json(&report))?;
            if report.violates_guarantee() {
                for c in report.checks.iter().filter(|c| !c.holds) {
                    eprintln!("guarantee violated: {} ({})", c.name, c.detail);
                }
                return Ok(exit::GUARANTEE_VIOLATED);
            }
            Ok(exit::OK)
        }
        Command::Verify { instance, allocation, cap, out } => {
            let inst = read_instance(&instance)?;
            let alloc = parse_allocation(&read_text(&allocation)?, &inst).map_err(|e| e.in_file(&allocation))?;
            let report = verify(&inst, &alloc, &budget(&cap)?)?;
            emit(out.as_deref(), &to_canonical_json(&report))?;
            Ok(if report.passes() { exit::OK } else { exit::PREDICATE_FAILED })
        }
        Command::Bench { suite, seed, count, out, repro_dir, cap } => {
            let outcome = run_suite(suite, seed, count, &budget(&cap)?)?;
            emit(out.as_deref(), &outcome.to_csv())?;
            if outcome.passes() {
                return Ok(exit::OK);
            }
            let dir = repro_dir
                .or_else(|| out.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf))
                .unwrap_or_else(|| PathBuf::from("."));
            for path in outcome.dump_failures(&dir)? {
                eprintln!("guarantee violated; instance written to {}", path.display());
            }
            Ok(exit::GUARANTEE_VIOLATED)
        }
        Command::Gen { seed, count, agents, min_goods, max_goods, max_cost, max_value, budget_spread, out } => {
            let config =
                GenConfig { agents: agents.into(), min_goods, max_goods, max_cost, max_value, budget_spread };
            let instances = Generator::new(config, seed)?.take(count)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
                    for (k, inst) in instances.iter().enumerate() {
                        write_text(&dir.join(format!("instance-{k:04}.json")), &serialize_instance(inst))?;
                    }
                }
                None => {
                    let docs: Vec<InstanceFile> = instances.iter().map(InstanceFile::from_instance).collect();
                    print!("{}", to_canonical_json(&docs));
                }
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
