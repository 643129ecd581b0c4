use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use oddsaudit_core::audit::AuditOptions;
use oddsaudit_core::construct::{write_witness, GridPoint, Survivor};
use oddsaudit_core::rat::parse_rat;
use oddsaudit_core::*;

const EXIT_FINDINGS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "oddsaudit",
    version,
    about = "Exact odds updating and independence audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a model file against the independence assumptions.
    Audit {
        file: PathBuf,
        /// Check pairs of propositions only (weaker than full independence).
        #[arg(long)]
        pairwise: bool,
    },
    /// Posterior probability of hypotheses given observed evidence.
    Posterior(PosteriorArgs),
    /// Write one of the built-in reference tables.
    Example {
        /// glymour, modified or four
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive grid search for models that break the one-updater bound.
    Sweep(SweepArgs),
    /// Build a discretized two-instrument measurement model.
    Scenario(Box<ScenarioArgs>),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Odds,
}

#[derive(Args)]
struct PosteriorArgs {
    file: PathBuf,
    /// Comma-separated `E<j>=<0|1>`; empty or `none` observes nothing.
    #[arg(long, default_value = "")]
    observe: String,
    #[arg(long, value_enum, default_value = "exact")]
    method: Method,
    #[arg(short = 'i', conflicts_with = "all", required_unless_present = "all")]
    hypothesis: Option<usize>,
    #[arg(long)]
    all: bool,
    /// Append a floating-point column (display only).
    #[arg(long)]
    approx: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    denominator: u32,
    #[arg(long)]
    require_condition1: bool,
    /// Write models of survivors with updating evidence here.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
    /// Most witness files to write, first in enumeration order.
    #[arg(long, default_value_t = 100)]
    witness_limit: usize,
    #[arg(long, default_value_t = SweepConfig::default().max_models)]
    max_models: u64,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Comma-separated hypothesis values, e.g. `0,2,4`.
    #[arg(long, allow_hyphen_values = true)]
    values: String,
    /// Comma-separated prior weights; uniform when omitted.
    #[arg(long)]
    weights: Option<String>,
    /// Comma-separated `offset:probability` noise distribution.
    #[arg(long, allow_hyphen_values = true)]
    noise: String,
    /// Interval for the first reading: `<=a`, `>=a`, `a..b`, `a..` or `..b`.
    #[arg(long, allow_hyphen_values = true)]
    e1: Interval,
    #[arg(long, allow_hyphen_values = true)]
    e2: Interval,
    #[arg(short, long)]
    output: PathBuf,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn load(path: &Path) -> Result<Model, ExitCode> {
    let text =
        fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), ExitCode> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_audit(file: &Path, pairwise: bool) -> Result<ExitCode, ExitCode> {
    let model = load(file)?;
    let opts = if pairwise {
        AuditOptions::pairwise()
    } else {
        AuditOptions::default()
    };
    let report = check_assumptions(&model, &opts).map_err(input_error)?;
    print!("{report}");
    let theorem_ok = !matches!(report.theorem, TheoremVerdict::Violated { .. });
    if report.independence_violations.is_empty() && theorem_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_FINDINGS))
    }
}

fn parse_observation(text: &str) -> Result<Event, String> {
    let text = text.trim();
    if text.is_empty() || text == "none" {
        return Ok(Event::sure());
    }
    let mut literals = Vec::new();
    for token in text.split(',') {
        let bad = || format!("bad observation `{token}`, expected E<j>=<0|1>");
        let (name, value) = token.split_once('=').ok_or_else(bad)?;
        let j: usize = name
            .strip_prefix('E')
            .and_then(|d| d.parse().ok())
            .ok_or_else(bad)?;
        let sign = match value {
            "1" => true,
            "0" => false,
            _ => return Err(bad()),
        };
        literals.push((j, sign));
    }
    Event::new(literals).map_err(|e| e.to_string())
}

fn cmd_posterior(args: &PosteriorArgs) -> Result<ExitCode, ExitCode> {
    let model = load(&args.file)?;
    let event = parse_observation(&args.observe).map_err(input_error)?;
    event.validate(model.m()).map_err(input_error)?;
    let targets: Vec<usize> = match args.hypothesis {
        Some(i) => {
            model.check_hypothesis(i).map_err(input_error)?;
            vec![i]
        }
        None => (1..=model.n()).collect(),
    };
    let label = if event.is_empty() {
        "nothing".to_string()
    } else {
        event.to_string()
    };
    for i in targets {
        let value = match args.method {
            Method::Exact => model.posterior_exact(&event, i).map_err(input_error)?,
            Method::Odds => duda_posterior(&model, &event, i).map_err(input_error)?,
        };
        if args.approx {
            let approx = value.to_f64().unwrap_or(f64::NAN);
            println!("P(H_{i} | {label}) = {value}    ~{approx:.6} (approximate, display only)");
        } else {
            println!("P(H_{i} | {label}) = {value}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_example(name: &str, output: Option<&Path>) -> Result<ExitCode, ExitCode> {
    let example: PaperExample = name.parse().map_err(input_error)?;
    emit(&write_model(&paper_example(example)), output)?;
    Ok(ExitCode::SUCCESS)
}

/// Grid coordinates (priors, conditionals) in enumeration order.
type GridKey = (Vec<u32>, Vec<Vec<u32>>);

fn has_updating(s: &Survivor) -> bool {
    s.report.relevance.values().any(|set| !set.is_empty())
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, ExitCode> {
    let config = SweepConfig {
        n: args.n,
        m: args.m,
        denominator: args.denominator,
        require_condition1: args.require_condition1,
        max_models: args.max_models,
    };
    config.validate().map_err(input_error)?;
    let limit = args.witness_limit;
    // keep the first `limit` updating survivors by grid order so the files do
    // not depend on thread scheduling
    let kept: Mutex<BTreeSet<GridKey>> = Mutex::new(BTreeSet::new());
    let collect = args.witness_dir.is_some() && limit > 0;
    let outcome = sweep_visit(&config, |s| {
        if !collect || !has_updating(s) {
            return;
        }
        let mut kept = kept.lock().unwrap();
        kept.insert((s.grid.priors.clone(), s.grid.cond.clone()));
        if kept.len() > limit {
            kept.pop_last();
        }
    });
    println!(
        "sweep: n={} m={} denominator={} require-condition1={}",
        config.n, config.m, config.denominator, config.require_condition1
    );
    let result = match outcome {
        Ok(result) => result,
        Err(SweepError::ResourceCap {
            limit,
            required,
            partial,
        }) => {
            eprintln!("error: sweep needs {required} models but --max-models is {limit}");
            println!("partial counts:");
            print!("{partial}");
            return Err(ExitCode::from(EXIT_RESOURCE));
        }
        Err(SweepError::InvalidConfig(msg)) => return Err(input_error(msg)),
        Err(e) => {
            eprintln!("error: {e}");
            return Err(ExitCode::FAILURE);
        }
    };
    print!("{result}");
    if let Some(dir) = &args.witness_dir {
        fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
        let kept = kept.into_inner().unwrap();
        for (priors, cond) in kept {
            let grid = GridPoint { priors, cond };
            let spec = grid.spec(config.denominator);
            let model = from_conditionals(&spec).map_err(input_error)?;
            let report =
                check_assumptions(&model, &AuditOptions::default()).map_err(input_error)?;
            let survivor = Survivor {
                grid,
                spec,
                model,
                report,
                multiplicity: 1,
            };
            let path = write_witness(dir, &survivor, config.denominator)
                .map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
            println!("wrote {}", path.display());
        }
    }
    if result.theorem_violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_FINDINGS))
    }
}

fn rat_list(text: &str) -> Result<Vec<Rat>, String> {
    text.split(',')
        .map(|t| parse_rat(t).map_err(|e| e.to_string()))
        .collect()
}

fn cmd_scenario(args: &ScenarioArgs) -> Result<ExitCode, ExitCode> {
    let values = rat_list(&args.values).map_err(input_error)?;
    let weights = match &args.weights {
        Some(w) => rat_list(w).map_err(input_error)?,
        None => {
            let uniform = Rat::new(1.into(), values.len().into());
            vec![uniform; values.len()]
        }
    };
    if weights.len() != values.len() {
        return Err(input_error(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    let mut noise = Vec::new();
    for token in args.noise.split(',') {
        let (offset, p) = token.split_once(':').ok_or_else(|| {
            input_error(format!(
                "bad noise entry `{token}`, expected offset:probability"
            ))
        })?;
        noise.push((
            parse_rat(offset).map_err(input_error)?,
            parse_rat(p).map_err(input_error)?,
        ));
    }
    let scenario = MeasurementScenario {
        values: values.into_iter().zip(weights).collect(),
        noise,
        e1: args.e1.clone(),
        e2: args.e2.clone(),
    };
    let model = measurement_scenario(&scenario).map_err(input_error)?;
    emit(&write_model(&model), Some(&args.output))?;
    let report = check_assumptions(&model, &AuditOptions::default()).map_err(input_error)?;
    let verdict = |side| {
        let failing: Vec<String> = report
            .violations_on(side)
            .map(|v| format!("H_{}", v.i))
            .collect();
        if failing.is_empty() {
            "holds".to_string()
        } else {
            format!("violated ({})", failing.join(","))
        }
    };
    println!("wrote {}", args.output.display());
    println!("given-H independence: {}", verdict(Side::GivenH));
    println!("given-not-H independence: {}", verdict(Side::GivenNotH));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Audit { file, pairwise } => cmd_audit(file, *pairwise),
        Command::Posterior(args) => cmd_posterior(args),
        Command::Example { name, output } => cmd_example(name, output.as_deref()),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Scenario(args) => cmd_scenario(args),
    };
    outcome.unwrap_or_else(|code| code)
}
