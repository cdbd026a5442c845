use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcsel_cli::pipeline;
use mcsel_cli::{CliError, ExperimentConfig, Overrides};

/// Model selection experiments: split, train, select, compare, simulate, report.
#[derive(Debug, Parser)]
#[command(name = "mcsel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated policy ids, e.g. Holdout,TTVH.
    #[arg(long, global = true)]
    policies: Option<String>,
    /// Comma-separated aggregations: Individual, Local, Global.
    #[arg(long, global = true)]
    aggregations: Option<String>,
    /// Significance level of the Wilcoxon comparisons.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build fold assignments and run schedules, print imbalance.
    Split,
    /// Train the candidate pool over every run and repetition.
    Train,
    /// Apply policies and aggregations to the pool.
    Select {
        /// Pool CSV to read instead of <out>/pool.csv.
        #[arg(long)]
        pool: Option<PathBuf>,
    },
    /// Summaries and Wilcoxon matrices over the selections.
    Compare,
    /// Regret of each policy on synthetic noisy tasks.
    Simulate,
    /// Holdout/test scatter and Pareto-front data for plotting.
    Report,
    /// split, train, select, compare and report in one go.
    Run,
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        policies: cli.policies.clone(),
        aggregations: cli.aggregations.clone(),
        alpha: cli.alpha,
        jobs: cli.jobs,
    })?;
    cfg.validate()?;
    match &cli.command {
        Command::Split => {
            for r in pipeline::cmd_split(&cfg)? {
                println!(
                    "{}\tsamples={}\tclasses={}\timbalance={:.4}",
                    r.dataset_id, r.n_samples, r.n_classes, r.imbalance
                );
            }
        }
        Command::Train => {
            let n = pipeline::cmd_train(&cfg)?;
            println!("{n} candidates -> {}", cfg.out.join(pipeline::POOL_FILE).display());
        }
        Command::Select { pool } => {
            let rows = pipeline::cmd_select(&cfg, pool.as_deref())?;
            println!("{} selections -> {}", rows.len(), cfg.out.join(pipeline::SELECTIONS_FILE).display());
        }
        Command::Compare => {
            let c = pipeline::cmd_compare(&cfg)?;
            print!("{}", pipeline::summary_text(&c.summary));
            println!();
            print!("{}", c.test_accuracy);
            println!();
            print!("{}", c.all_disagreement);
        }
        Command::Simulate => {
            let r = pipeline::cmd_simulate(&cfg)?;
            println!("policy\tmean_regret\tnoise_fitter_frequency");
            for p in &r.policies {
                println!("{}\t{:.4}\t{:.3}", p.policy, p.mean_regret, p.noise_fitter_frequency);
            }
        }
        Command::Report => {
            for f in pipeline::cmd_report(&cfg)? {
                println!("{}", cfg.out.join("plots").join(f).display());
            }
        }
        Command::Run => {
            let c = pipeline::cmd_run(&cfg)?;
            print!("{}", pipeline::summary_text(&c.summary));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mcsel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
