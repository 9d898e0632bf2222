use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relaymatch::experiment::{run_ensemble, write_results, ExperimentConfig};
use relaymatch::matching::{potential_identity_gap, stability_report};
use relaymatch::solver::exhaustive_search;
use relaymatch::{solve, Error, Matching, RelayGame, Result, Scenario, SolverKind};

#[derive(Parser)]
#[command(
    name = "relaymatch",
    version,
    about = "Relay radio selection by many-to-many matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a topology with link gains and write it as JSON.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Number of sources, overriding the configuration.
        #[arg(long)]
        sources: Option<usize>,
    },
    /// Solve one topology and print the per-iteration trace as CSV.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "pma")]
        solver: SolverKind,
        /// Topology file from `gen`; generated from the seed when absent.
        #[arg(long)]
        topology: Option<PathBuf>,
        /// Also write the final matching to this file.
        #[arg(long)]
        matching: Option<PathBuf>,
        #[arg(long)]
        sources: Option<usize>,
    },
    /// Run a full experiment and write its CSV files and manifest.
    Ensemble {
        #[command(flatten)]
        common: Common,
    },
    /// Audit a matching for stability and the potential identity.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
    /// Find the satisfaction-maximizing matching by exhaustive search.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        topology: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file or preset name (fig2, fig3, fig4).
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, or directory for `ensemble`; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        match &self.config {
            None => Ok(ExperimentConfig::default()),
            Some(arg) if Path::new(arg).exists() => ExperimentConfig::read_from(arg),
            Some(arg) if ExperimentConfig::PRESETS.contains(&arg.as_str()) => {
                ExperimentConfig::preset(arg)
            }
            Some(arg) => Err(Error::Config(format!(
                "no configuration file or preset named '{arg}'"
            ))),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_game(config: &ExperimentConfig, topology: &Path) -> Result<RelayGame> {
    let scenario = Scenario::read_from(topology)?;
    RelayGame::from_scenario(&scenario, &config.satisfaction)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Gen { common, sources } => {
            let mut config = common.config()?;
            if let Some(n) = sources {
                config.topology.num_sources = n;
            }
            config.topology.validate()?;
            let scenario = Scenario::generate(&config.topology, common.seed.unwrap_or(0))?;
            emit(common.out.as_deref(), &(scenario.to_json()? + "\n"))
        }
        Command::Run {
            common,
            solver,
            topology,
            matching,
            sources,
        } => {
            let mut config = common.config()?;
            if let Some(n) = sources {
                config.topology.num_sources = n;
            }
            let seed = common.seed.unwrap_or(0);
            let scenario = match &topology {
                Some(path) => Scenario::read_from(path)?,
                None => Scenario::generate(&config.topology, seed)?,
            };
            let game = RelayGame::from_scenario(&scenario, &config.satisfaction)?;
            let outcome = solve(&game, &config.solver.with_kind(solver).with_seed(seed))?;
            let mut csv = Vec::new();
            outcome.trace.write_csv(&mut csv)?;
            emit(common.out.as_deref(), &String::from_utf8_lossy(&csv))?;
            if let Some(path) = matching {
                outcome.matching.write_to(path)?;
            }
            eprintln!(
                "{solver}: final satisfaction {:.6} of {} after {} iterations, converged at {}",
                outcome.final_lambda(),
                game.num_sources(),
                outcome.trace.iterations(),
                outcome
                    .trace
                    .convergence_iteration
                    .map_or("none (iteration cap)".to_string(), |k| k.to_string()),
            );
            Ok(())
        }
        Command::Ensemble { common } => {
            if common.config.is_none() {
                return Err(Error::Config("ensemble requires --config".into()));
            }
            let mut config = common.config()?;
            if let Some(seed) = common.seed {
                config.master_seed = seed;
            }
            let dir = common
                .out
                .clone()
                .unwrap_or_else(|| config.resolved_output_dir());
            let result = run_ensemble(&config)?;
            let files = write_results(&result, &dir)?;
            for row in result.satisfaction_vs_n() {
                println!(
                    "N={:<3} {:<14} mean satisfaction {:.4} ± {:.4}",
                    row.num_sources, row.solver, row.mean_proportion, row.std_error
                );
            }
            if !result.skipped.is_empty() {
                println!("{} runs skipped as intractable", result.skipped.len());
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Verify {
            common,
            topology,
            matching,
        } => {
            let config = common.config()?;
            let game = load_game(&config, &topology)?;
            let m = Matching::read_from(&matching)?;
            if m.num_sources() != game.num_sources() || m.num_radios() != game.num_radios() {
                return Err(Error::InvalidArgument(
                    "matching does not fit the topology".into(),
                ));
            }
            for n in 0..game.num_sources() {
                let s = relaymatch::SourceId(n);
                game.check_strategy(s, m.strategy(s))?;
            }
            let space = &config.solver.strategy_space;
            let cap = config.solver.enumeration_cap;
            let report = stability_report(&game, &m, space, cap)?;
            let gap = potential_identity_gap(&game, &m, space, cap)?;
            let mut text = format!("global satisfaction {:.6}\n", game.global_satisfaction(&m));
            if report.is_stable() {
                text.push_str("stable\n");
            } else {
                text.push_str(&format!(
                    "unstable: {} improving deviations\n",
                    report.witnesses.len()
                ));
                for w in &report.witnesses {
                    let set: Vec<String> = w.strategy.iter().map(ToString::to_string).collect();
                    text.push_str(&format!(
                        "  {} -> {{{}}} gains {:.3e}\n",
                        w.source,
                        set.join(","),
                        w.gain
                    ));
                }
            }
            text.push_str(&format!("potential identity max error {gap:.3e}\n"));
            emit(common.out.as_deref(), &text)
        }
        Command::Oracle { common, topology } => {
            let config = common.config()?;
            let game = load_game(&config, &topology)?;
            let (m, lambda) = exhaustive_search(
                &game,
                &config.solver.strategy_space,
                config.solver.oracle_cap,
            )?;
            eprintln!("optimal global satisfaction {lambda:.6}");
            emit(common.out.as_deref(), &(m.to_json()? + "\n"))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
