//! Command-line front end: file I/O wired to the library operations.
//!
//! Exit codes: `0` success, `2` input/validation problems (bad flags,
//! unparseable files, mismatched populations), `3` mathematical failures
//! (empty support, missing inverse). Errors are reported as one JSON object
//! on standard error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::continuous::GRID_SUM_TOLERANCE;
use crate::disco::{
    build_incentive_model, simulate_incentive_csv, Assignment, Intervention, ENUMERATION_BUDGET,
};
use crate::dpo::{aggregate_policy, Temperature};
use crate::error::Error;
use crate::extensions::{aggregate_evidence, forecast_aggregate_with_prior, PriorContext};
use crate::group::{aggregate_many, inverse, power};
use crate::io::{
    parse_distribution, parse_model, parse_policy_file, render_distribution, render_model,
    render_policy_file, FILE_SUM_TOLERANCE,
};
use crate::population::{DiscreteDistribution, SUM_TOLERANCE};

#[derive(Parser)]
#[command(
    name = "infoagg",
    version,
    about = "Multiplicative fusion of finite probability distributions",
    subcommand_negates_reqs = true
)]
struct Cli {
    /// Print the built-in numeric tolerances as JSON (they are fixed, not
    /// adjustable).
    #[arg(long, global = true)]
    tolerance: bool,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate two or more distribution files pointwise.
    Agg {
        /// Distribution JSON files (at least two, or one with --with-uniform).
        files: Vec<PathBuf>,
        /// Also fold in the uniform distribution (the identity element).
        #[arg(long)]
        with_uniform: bool,
    },
    /// Invert a full-support distribution.
    Inverse { file: PathBuf },
    /// k-fold self-aggregation; k = 0 gives uniform, negative k inverts.
    Power {
        file: PathBuf,
        #[arg(short, long, allow_hyphen_values = true)]
        k: i32,
    },
    /// Pool forecasts that share a common prior, counting the prior once.
    Forecast {
        /// Forecast distribution files (at least one).
        files: Vec<PathBuf>,
        /// Full-support prior distribution file.
        #[arg(long)]
        prior: PathBuf,
    },
    /// Aggregate two evidence traces through a model's posteriors.
    Evidence {
        #[arg(long)]
        model: PathBuf,
        /// First trace, e.g. "T=1,Y=1".
        #[arg(long)]
        e1: String,
        /// Second trace.
        #[arg(long)]
        e2: String,
    },
    /// Fuse a reference policy with softmax-of-reward information.
    Dpo {
        /// Policy/reward JSON file.
        file: PathBuf,
        /// KL-penalty weight (strictly positive).
        #[arg(long)]
        beta: f64,
    },
    /// Build the seeded incentive model and emit sampled observations as CSV.
    SimulateIncentive {
        #[arg(long)]
        num_units: usize,
        #[arg(long)]
        samples: usize,
        /// Also write the generated model as JSON.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Posterior over units given an evidence trace.
    Abduct {
        #[arg(long)]
        model: PathBuf,
        /// Evidence trace, e.g. "T=1,Y=1" (may be empty).
        #[arg(long, default_value = "")]
        evidence: String,
    },
    /// Population-level counterfactual valuation with its decomposition.
    Valuate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "")]
        evidence: String,
        /// Intervention, e.g. "T=0".
        #[arg(long = "do")]
        intervention: String,
        /// Target outcome, e.g. "Y=1".
        #[arg(long)]
        target: String,
    },
}

struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "usage".to_string(),
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_mathematical() { 3 } else { 2 },
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 2,
            kind: "io".to_string(),
            message: e.to_string(),
        }
    }
}

/// Run the CLI against the given argument list; returns the process exit
/// code. Never panics on malformed input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };

    if cli.tolerance {
        println!("{}", tolerance_table());
    }

    let Some(command) = cli.command else {
        if cli.tolerance {
            return 0;
        }
        eprintln!(
            "{}",
            error_json("usage", "a subcommand is required; see --help")
        );
        return 2;
    };

    match dispatch(command, cli.output.as_deref(), cli.seed) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("{}", error_json(&failure.kind, &failure.message));
            failure.code
        }
    }
}

fn dispatch(command: Command, output: Option<&Path>, seed: u64) -> Result<(), Failure> {
    match command {
        Command::Agg {
            files,
            with_uniform,
        } => {
            if files.is_empty() {
                return Err(Failure::usage("agg needs at least one distribution file"));
            }
            if files.len() < 2 && !with_uniform {
                return Err(Failure::usage(
                    "agg needs at least two distribution files (or one with --with-uniform)",
                ));
            }
            let mut dists = load_distributions(&files)?;
            if with_uniform {
                dists.push(DiscreteDistribution::uniform(dists[0].population()));
            }
            let result = aggregate_many(&dists)?;
            write_output(output, &render_distribution(&result))
        }
        Command::Inverse { file } => {
            let d = load_distribution(&file)?;
            let result = inverse(&d)?;
            write_output(output, &render_distribution(&result))
        }
        Command::Power { file, k } => {
            let d = load_distribution(&file)?;
            let result = power(&d, k)?;
            write_output(output, &render_distribution(&result))
        }
        Command::Forecast { files, prior } => {
            if files.is_empty() {
                return Err(Failure::usage("forecast needs at least one forecast file"));
            }
            let prior = load_distribution(&prior)?;
            let ctx = PriorContext::new(prior)?;
            let forecasts = load_distributions(&files)?;
            let result = forecast_aggregate_with_prior(&forecasts, &ctx)?;
            write_output(output, &render_distribution(&result))
        }
        Command::Evidence { model, e1, e2 } => {
            let model = parse_model(&read_file(&model)?)?;
            let e1 = Assignment::parse(&e1)?;
            let e2 = Assignment::parse(&e2)?;
            let result = aggregate_evidence(&model, &e1, &e2)?;
            write_output(output, &render_distribution(&result))
        }
        Command::Dpo { file, beta } => {
            let (policy, table) = parse_policy_file(&read_file(&file)?)?;
            let beta = Temperature::new(beta)?;
            let fused = aggregate_policy(&policy, &table, beta)?;
            write_output(output, &render_policy_file(&fused, &table))
        }
        Command::SimulateIncentive {
            num_units,
            samples,
            model_out,
        } => {
            if num_units == 0 {
                return Err(Failure::usage("--num-units must be at least 1"));
            }
            if samples == 0 {
                return Err(Failure::usage("--samples must be at least 1"));
            }
            let model = build_incentive_model(num_units, seed)?;
            let csv = simulate_incentive_csv(&model, samples, seed)?;
            if let Some(path) = model_out {
                std::fs::write(path, render_model(&model))?;
            }
            write_output(output, &csv)
        }
        Command::Abduct { model, evidence } => {
            let model = parse_model(&read_file(&model)?)?;
            let evidence = Assignment::parse(&evidence)?;
            let posterior = model.abduct(&evidence)?;
            write_output(output, &render_distribution(&posterior))
        }
        Command::Valuate {
            model,
            evidence,
            intervention,
            target,
        } => {
            let model = parse_model(&read_file(&model)?)?;
            let evidence = Assignment::parse(&evidence)?;
            let intervention = Intervention::parse(&intervention)?;
            let target_assignment = Assignment::parse(&target)?;
            let [(target_var, target_value)] = target_assignment.pairs() else {
                return Err(Failure::usage(
                    "--target must name exactly one variable=value",
                ));
            };

            let posterior = model.abduct(&evidence)?;
            let per_unit = model
                .population()
                .labels()
                .iter()
                .map(|unit| {
                    model
                        .layer2(
                            unit,
                            &intervention,
                            &Assignment::empty().with(target_var, target_value),
                        )
                        .map(|value| UnitValuation {
                            unit: unit.clone(),
                            value,
                        })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let value =
                model.population_valuation(&intervention, (target_var, target_value), &evidence)?;
            let report = ValuateReport {
                evidence: evidence
                    .pairs()
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect(),
                intervention: intervention
                    .assignments()
                    .pairs()
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect(),
                target: format!("{target_var}={target_value}"),
                posterior: model
                    .population()
                    .labels()
                    .iter()
                    .zip(posterior.probs())
                    .map(|(unit, p)| UnitValuation {
                        unit: unit.clone(),
                        value: p,
                    })
                    .collect(),
                per_unit,
                value,
            };
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            write_output(output, &text)
        }
    }
}

/// The abduction / valuation / reduction decomposition behind one
/// population-level counterfactual probability.
#[derive(Serialize)]
struct ValuateReport {
    evidence: Vec<String>,
    intervention: Vec<String>,
    target: String,
    posterior: Vec<UnitValuation>,
    per_unit: Vec<UnitValuation>,
    value: f64,
}

#[derive(Serialize)]
struct UnitValuation {
    unit: String,
    value: f64,
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        kind: "io".to_string(),
        message: format!("{}: {e}", path.display()),
    })
}

fn load_distribution(path: &Path) -> Result<DiscreteDistribution, Failure> {
    let loaded = parse_distribution(&read_file(path)?)?;
    if loaded.renormalized {
        eprintln!(
            "warning: probabilities in {} summed to {:.17}; renormalized on load",
            path.display(),
            loaded.sum
        );
    }
    Ok(loaded.distribution)
}

fn load_distributions(paths: &[PathBuf]) -> Result<Vec<DiscreteDistribution>, Failure> {
    paths.iter().map(|p| load_distribution(p)).collect()
}

fn write_output(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn tolerance_table() -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "sum_tolerance": SUM_TOLERANCE,
        "file_sum_tolerance": FILE_SUM_TOLERANCE,
        "grid_sum_tolerance": GRID_SUM_TOLERANCE,
        "enumeration_budget": ENUMERATION_BUDGET.to_string(),
    }))
    .expect("static table serializes")
}
