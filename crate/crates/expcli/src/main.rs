use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use nlkdv_cli::catalog::SweepParam;
use nlkdv_cli::sweep::parse_values;
use nlkdv_cli::{catalog, find, load_experiment, run_experiment, sweep_spec, DtRule, ExperimentSpec};

/// Experiment harness for fully nonlinear KdV-type equations.
#[derive(Parser)]
#[command(name = "nlkdv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the built-in experiment catalog.
    List {
        /// Print the full experiment definitions as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a catalog experiment or a config file and write its bundle.
    Run {
        /// Catalog id, e.g. fig-ex1.1.
        #[arg(required_unless_present = "config", conflicts_with = "config")]
        id: Option<String>,
        /// JSON file: a run configuration, an experiment definition or a bundle summary.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Run one configuration for each value of a parameter.
    Sweep {
        /// Base run configuration (JSON).
        #[arg(long, required_unless_present = "base", conflicts_with = "base")]
        config: Option<PathBuf>,
        /// Use the first run of a catalog experiment as the base.
        #[arg(long)]
        base: Option<String>,
        /// delta, n_points or dt.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// How dt follows the swept parameter: keep, product or suggest.
        #[arg(long, default_value = "keep")]
        dt_rule: DtRule,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Output root; the bundle goes to <out>/<experiment id>.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for independent runs (0 uses all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn describe(e: &ExperimentSpec) -> String {
    let runs: Vec<String> = e
        .runs
        .iter()
        .map(|r| {
            let c = &r.config;
            format!("{}: N={} delta={:e} dt={:e} T={}", r.label, c.grid.n_points - 1, c.delta, c.dt, c.t_end)
        })
        .collect();
    format!("{:<24} {}\n{:<24} [{}]", e.id, e.description, "", runs.join("; "))
}

fn execute(spec: &ExperimentSpec, output: &Output) -> anyhow::Result<()> {
    let (outcome, dir) = run_experiment(spec, &output.out, output.jobs)?;
    println!("{}: {} runs written to {}", spec.id, outcome.runs.len(), dir.display());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::List { json } => {
            let all = catalog();
            let mut out = std::io::stdout().lock();
            let written = if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&all)?)
            } else {
                all.iter().try_for_each(|e| writeln!(out, "{}", describe(e)))
            };
            match written {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
        Command::Run { id, config, output } => {
            let spec = match (id, config) {
                (Some(id), None) => find(&id)?,
                (None, Some(path)) => load_experiment(&path)?,
                _ => bail!("give either an experiment id or --config"),
            };
            execute(&spec, &output)?;
        }
        Command::Sweep { config, base, param, values, dt_rule, output } => {
            let base_config = match (config, base) {
                (Some(path), None) => {
                    let spec = load_experiment(&path)?;
                    spec.runs.into_iter().next().context("the config file holds no runs")?.config
                }
                (None, Some(id)) => find(&id)?.runs.into_iter().next().context("the experiment has no runs")?.config,
                _ => bail!("give either --config or --base"),
            };
            let spec = sweep_spec(&base_config, param, &parse_values(&values)?, dt_rule)?;
            execute(&spec, &output)?;
        }
    }
    Ok(())
}
