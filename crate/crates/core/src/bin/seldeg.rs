use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seldeg::harness::{
    build_theory, check_conditions, compare_report, json, run_experiment, Empirical,
    ExperimentConfig, RunData, TheoryFile,
};
use seldeg::{ModelParams, Result};

#[derive(Parser)]
#[command(name = "seldeg", version, about = "Degree distributions of selected vertex sets in growing random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Port,
    Indep,
    Multitree,
    Frozen,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    LevelJ,
    NeighborsOf,
    ConnectedToAll,
    DegreeOne,
    All,
}

impl Rule {
    fn name(self) -> &'static str {
        match self {
            Rule::LevelJ => "level_j",
            Rule::NeighborsOf => "neighbors_of",
            Rule::ConnectedToAll => "connected_to_all",
            Rule::DegreeOne => "degree_one",
            Rule::All => "all",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every replica of an experiment config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compute the limiting restricted distribution and write it as JSON.
    Theory {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long = "m-arity")]
        m_arity: Option<usize>,
        /// Selection rule; defaults to the usual one for the model.
        #[arg(long, value_enum)]
        rule: Option<Rule>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        dmax: usize,
        #[arg(long)]
        out: PathBuf,
        /// Replica CSV whose final degree counts replace c_d (plug-in mode).
        #[arg(long = "empirical-c")]
        empirical_c: Option<PathBuf>,
    },
    /// Compare a finished run with a theory file.
    Compare {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print finite-n diagnostics of the modelling assumptions as JSON.
    CheckConditions {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        theory: PathBuf,
    },
}

fn model_params(model: Model, beta: Option<f64>, lambda: Option<f64>, m: Option<usize>) -> ModelParams {
    match model {
        Model::Port => ModelParams::Port { beta: beta.unwrap_or(0.0) },
        Model::Indep => ModelParams::Indep { lambda: lambda.unwrap_or(1.0) },
        Model::Multitree => ModelParams::Multitree { m: m.unwrap_or(3) },
        Model::Frozen => ModelParams::DegreeOneFrozen { lambda: lambda.unwrap_or(1.0) },
    }
}

fn default_rule(model: Model) -> Rule {
    match model {
        Model::Port | Model::Multitree => Rule::LevelJ,
        Model::Indep => Rule::NeighborsOf,
        Model::Frozen => Rule::DegreeOne,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let manifest = run_experiment(&cfg)?;
            eprintln!(
                "{} replicas, n = {}, {:.2} s -> {}",
                manifest.replicas.len(),
                cfg.n_steps,
                manifest.wall_time_seconds,
                cfg.output_dir.display()
            );
        }
        Command::Theory { model, beta, lambda, m_arity, rule, alpha, dmax, out, empirical_c } => {
            let params = model_params(model, beta, lambda, m_arity);
            let empirical = empirical_c.as_deref().map(Empirical::from_replica_csv).transpose()?;
            let rule = rule.unwrap_or(default_rule(model));
            let tf = build_theory(&params, rule.name(), alpha, dmax, empirical.as_ref())?;
            tf.write(&out)?;
            if !tf.condition6_ok {
                eprintln!("k_d is not positive at d = {:?}; x is not determined", tf.first_violation);
            }
        }
        Command::Compare { run, theory, out } => {
            let data = RunData::load(&run)?;
            let tf = TheoryFile::load(&theory)?;
            let report = compare_report(&data, &tf)?;
            report.write(&out)?;
            print!("{}", report.to_text(25));
        }
        Command::CheckConditions { run, theory } => {
            let data = RunData::load(&run)?;
            let tf = TheoryFile::load(&theory)?;
            print!("{}", json::to_string(&check_conditions(&data, &tf)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
