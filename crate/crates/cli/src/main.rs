use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hanspec::acs::AcsParams;
use hanspec::harness::{
    emit_sweep_csv, emit_trace_csv, load_scenario, mean_final_cost, median_converged_at, run_algorithm,
    run_convergence, run_sweep, save_scenario, SweepSpec, SweepVariable,
};
use hanspec::{build_model, evaluate, generate_scenario, is_feasible, AlgorithmKind, RewardMode, ScenarioConfig, UtilityKind};

/// Fair channel assignment for cognitive-radio home area networks.
#[derive(Debug, Parser)]
#[command(name = "hanspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random scenario and write it as JSON.
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign channels on a saved scenario.
    Allocate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "acs")]
        algorithm: AlgorithmKind,
        #[arg(long, default_value = "msr")]
        utility: UtilityKind,
        #[arg(long, default_value = "coverage")]
        reward: RewardMode,
        #[command(flatten)]
        acs: AcsArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one parameter and write per-(value, algorithm, utility) statistics.
    Sweep {
        #[arg(long)]
        variable: SweepVariable,
        /// Comma separated, strictly increasing. Defaults depend on the variable.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<usize>>,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, value_delimiter = ',', default_value = "acs,csgc,random")]
        algorithms: Vec<AlgorithmKind>,
        #[arg(long, value_delimiter = ',', default_value = "msr,mmr,mpf")]
        utilities: Vec<UtilityKind>,
        #[arg(long, default_value = "coverage")]
        reward: RewardMode,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        acs: AcsArgs,
        /// Base seed; replicate k uses base + k.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Record per-iteration ACS convergence traces.
    Converge {
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value = "coverage")]
        reward: RewardMode,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        acs: AcsArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 10.0)]
    side: f64,
    #[arg(long, default_value_t = 10)]
    channels: usize,
    #[arg(long, default_value_t = 5)]
    nans: usize,
    #[arg(long, default_value_t = 20)]
    sus_per_nan: usize,
    #[arg(long, default_value_t = 10)]
    pus: usize,
    #[arg(long, default_value_t = 1.0)]
    dmin: f64,
    #[arg(long, default_value_t = 4.0)]
    dmax: f64,
    #[arg(long, default_value_t = 2.0)]
    dp: f64,
}

impl ScenarioArgs {
    fn config(&self) -> ScenarioConfig {
        ScenarioConfig {
            side: self.side,
            channels: self.channels,
            n_nans: self.nans,
            sus_per_nan: self.sus_per_nan,
            n_pus: self.pus,
            d_min: self.dmin,
            d_max: self.dmax,
            dp: self.dp,
        }
    }
}

#[derive(Debug, Args)]
struct AcsArgs {
    #[arg(long, default_value_t = 15)]
    ants: usize,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, default_value_t = 0.9)]
    g: f64,
    #[arg(long, default_value_t = 0.9)]
    g_prime: f64,
    /// Use the bare interference degree in HGW scores.
    #[arg(long)]
    literal_interference: bool,
    /// Deposit raw rewards instead of rewards normalized by the maximum.
    #[arg(long)]
    raw_deposit: bool,
    /// Return the assignment after the last iteration, not the best one seen.
    #[arg(long)]
    final_only: bool,
}

impl AcsArgs {
    fn params(&self, seed: u64) -> AcsParams {
        AcsParams {
            n_ants: self.ants,
            iterations: self.iterations,
            rho: self.rho,
            g_cap: self.g,
            g_prime: self.g_prime,
            interference_smoothing: !self.literal_interference,
            normalize_deposit: !self.raw_deposit,
            keep_best: !self.final_only,
            seed,
            ..AcsParams::default()
        }
    }
}

#[derive(Debug, Serialize)]
struct AllocationReport {
    algorithm: AlgorithmKind,
    utility: UtilityKind,
    reward: RewardMode,
    value: f64,
    starved: usize,
    /// Channel per secondary user, `null` when starved.
    channels: Vec<Option<usize>>,
    assignment: Vec<Vec<u8>>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { scenario, seed, out } => {
            let scn = generate_scenario(&scenario.config(), seed)?;
            save_scenario(&scn, &out)?;
            println!(
                "wrote {} ({} primaries, {} secondaries, {} channels)",
                out.display(),
                scn.primaries.len(),
                scn.secondaries.len(),
                scn.channels
            );
        }
        Command::Allocate {
            scenario,
            algorithm,
            utility,
            reward,
            acs,
            seed,
            out,
        } => {
            let scn = load_scenario(&scenario)?;
            let model = build_model(&scn, reward);
            let a = run_algorithm(algorithm, &model, &scn.nan_of(), &acs.params(seed), utility, seed)?;
            if !is_feasible(&a, &model)? {
                bail!("{algorithm} produced a conflicting assignment");
            }
            let value = evaluate(&a, &model, utility)?;
            let report = AllocationReport {
                algorithm,
                utility,
                reward,
                value,
                starved: (0..a.users()).filter(|&n| a.is_starved(n)).count(),
                channels: (0..a.users()).map(|n| a.channel_of(n)).collect(),
                assignment: a.rows(),
            };
            let text = serde_json::to_string_pretty(&report)?;
            std::fs::write(&out, text + "\n").with_context(|| format!("writing {}", out.display()))?;
            println!("{algorithm} {utility} = {value} ({} starved of {})", report.starved, a.users());
        }
        Command::Sweep {
            variable,
            values,
            seeds,
            algorithms,
            utilities,
            reward,
            scenario,
            acs,
            seed,
            out,
        } => {
            let spec = SweepSpec {
                variable,
                values: values.unwrap_or_else(|| variable.default_values()),
                fixed: scenario.config(),
                algorithms,
                utilities,
                seeds,
                base_seed: seed,
                acs: acs.params(seed),
                reward,
            };
            let result = run_sweep(&spec)?;
            emit_sweep_csv(&result, &out)?;
            println!("wrote {} rows to {}", result.rows.len(), out.display());
        }
        Command::Converge {
            seeds,
            reward,
            scenario,
            acs,
            seed,
            out,
        } => {
            let traces = run_convergence(&scenario.config(), &acs.params(seed), seeds, reward)?;
            emit_trace_csv(&traces, &out)?;
            println!(
                "wrote {} traces to {}: median converged_at {}, mean final cost {:.4}",
                traces.len(),
                out.display(),
                median_converged_at(&traces),
                mean_final_cost(&traces)
            );
        }
    }
    Ok(())
}
