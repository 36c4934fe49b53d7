//! `tropcond`: batch front end for diagrams of probability spaces.
//!
//! Exit codes: 0 success, 1 invalid input, 2 budget exceeded, 3 property violation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use tropcond_core::distance::{ikd, IkdOptions, Method, EXACT_BUDGET};
use tropcond_core::format::{read_diagram, DiagramJson};
use tropcond_core::homogeneity::is_homogeneous;
use tropcond_core::prob::DEFAULT_OUTCOME_BUDGET;
use tropcond_core::tropical::{
    aikd_estimate, check_admissible, linear_sequence, tropical_condition, AdmissibleFunction,
};
use tropcond_core::verify::{run_suite, Suite, VerifyConfig};
use tropcond_core::{EntropyVector, ProbDiagram};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] tropcond_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use tropcond_core::Error as E;
        match self {
            CliError::Core(e) if e.is_budget() => 2,
            CliError::Core(E::TailDiverges | E::NonConvergent(_)) | CliError::Violation(_) => 3,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Unit {
    Nats,
    Bits,
}

impl Unit {
    fn apply(self, v: f64) -> f64 {
        match self {
            Unit::Nats => v,
            Unit::Bits => v / std::f64::consts::LN_2,
        }
    }

    fn vector(self, e: &EntropyVector) -> Vec<f64> {
        e.0.iter().map(|&v| self.apply(v)).collect()
    }

    fn name(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Greedy,
    LocalSearch,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Greedy => Method::Greedy,
            MethodArg::LocalSearch => Method::LocalSearch,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tropcond",
    version,
    about = "Entropy, intrinsic entropy distance and conditioning of diagrams of probability spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; CSV is available for `entropy` and `aikd`.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Unit for entropies and distances.
    #[arg(long, value_enum, default_value = "nats", global = true)]
    unit: Unit,
    /// Output file; for `verify`, a directory receiving the report and counterexamples.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of initial outcomes any materialized diagram may have.
    #[arg(long, default_value_t = DEFAULT_OUTCOME_BUDGET, global = true)]
    budget_outcomes: u128,
    /// Largest product of initial sizes solved by exhaustive coupling search.
    #[arg(long, default_value_t = EXACT_BUDGET, global = true)]
    exact_budget: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a diagram file and report its spaces.
    Validate { path: PathBuf },
    /// Entropy vector of a diagram.
    Entropy { path: PathBuf },
    /// Intrinsic entropy distance between two diagrams.
    Ikd {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Condition on one atom, or list every conditioned diagram of an object.
    Condition {
        path: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long)]
        atom: Option<String>,
    },
    /// Tropical conditioning `[X|U]` and its representative sequence.
    TropCondition {
        path: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Upper profile of the asymptotic entropy distance.
    Aikd(AikdArgs),
    /// Run a randomized property suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Trials (samples for sanov-decay); defaults per suite.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
    },
    /// Check the tail inequality for `phi(t) = t^alpha`.
    Admissible {
        #[arg(long)]
        alpha: f64,
        /// Constant the numeric value must not exceed.
        #[arg(long)]
        claimed: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct AikdArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Compare `[A|U]` with `[B|V]` at this object instead of `A` with `B`.
    #[arg(long)]
    object: Option<String>,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: tropcond_core::Error| e.to_string())
}

struct Output {
    format: Format,
    unit: Unit,
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: String) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        if self.format == Format::Csv {
            return Err(CliError::Usage("CSV output is available for `entropy` and `aikd` only".into()));
        }
        self.emit(pretty(value))
    }

    fn csv<R: Serialize>(&self, rows: &[R]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        self.emit(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn object_index(x: &ProbDiagram, object: &str) -> Result<usize> {
    Ok(x.shape().index_of(object)?)
}

fn error_kind(e: &tropcond_core::Error) -> String {
    let debug = format!("{e:?}");
    debug.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

fn validate(path: &Path, out: &Output) -> Result<()> {
    let x = match read_diagram(path) {
        Ok(x) => x,
        Err(e) => {
            out.json(&json!({ "valid": false, "error": error_kind(&e), "message": e.to_string() }))?;
            return Err(CliError::Core(e));
        }
    };
    let g = x.shape();
    let spaces: Vec<Value> = (0..g.len())
        .map(|i| json!({ "object": g.label(i), "atoms": x.set(i).len(), "entropy": out.unit.apply(x.entropy(i)) }))
        .collect();
    let morphisms: Vec<(&str, &str)> =
        g.generating_morphisms().into_iter().map(|(a, b)| (g.label(a), g.label(b))).collect();
    out.json(&json!({
        "valid": true,
        "initial": g.label(g.initial()),
        "spaces": spaces,
        "morphisms": morphisms,
        "unit": out.unit.name(),
    }))
}

#[derive(Serialize)]
struct EntropyRow<'a> {
    object: &'a str,
    entropy: f64,
}

fn entropy(path: &Path, out: &Output) -> Result<()> {
    let x = read_diagram(path)?;
    let e = out.unit.vector(&x.entropy_vector());
    let objects = x.shape().objects();
    match out.format {
        Format::Csv => {
            let rows: Vec<EntropyRow> =
                objects.iter().zip(&e).map(|(o, &v)| EntropyRow { object: o, entropy: v }).collect();
            out.csv(&rows)
        }
        Format::Json => out.json(&json!({ "objects": objects, "entropy": e, "unit": out.unit.name() })),
    }
}

fn component_entries(x: &ProbDiagram, iota: usize, unit: Unit) -> Vec<Value> {
    tropical_condition(x, iota)
        .components()
        .iter()
        .map(|c| json!({ "atom": c.atom, "weight": c.weight, "entropy": unit.vector(&c.diagram.entropy_vector()) }))
        .collect()
}

fn condition(path: &Path, object: &str, atom: Option<&str>, out: &Output) -> Result<()> {
    let x = read_diagram(path)?;
    let iota = object_index(&x, object)?;
    match atom {
        Some(u) => {
            let c = x.condition(iota, u)?;
            let weight = x.weights(iota)[x.atom_index(iota, u)?];
            out.json(&json!({
                "object": object,
                "atom": u,
                "weight": weight,
                "entropy": out.unit.vector(&c.entropy_vector()),
                "diagram": DiagramJson::from_diagram(&c),
                "unit": out.unit.name(),
            }))
        }
        None => out.json(&json!({
            "object": object,
            "family": component_entries(&x, iota, out.unit),
            "tropical_entropy": out.unit.vector(&tropical_condition(&x, iota).entropy()),
            "unit": out.unit.name(),
        })),
    }
}

fn trop_condition(path: &Path, object: &str, n_max: usize, out: &Output) -> Result<()> {
    let x = read_diagram(path)?;
    let iota = object_index(&x, object)?;
    let c = tropical_condition(&x, iota);
    let profile: Vec<Value> = (1..=n_max)
        .map(|n| {
            json!({
                "n": n,
                "multiplicities": c.multiplicities(n),
                "entropy_per_n": out.unit.vector(&c.representative_entropy(n).scaled(1.0 / n as f64)),
            })
        })
        .collect();
    // homogeneity is reported when the automorphism search fits its budget
    let homogeneous = match is_homogeneous(&x) {
        Ok(r) => Value::Bool(r.homogeneous),
        Err(e) if e.is_budget() => Value::Null,
        Err(e) => return Err(e.into()),
    };
    out.json(&json!({
        "object": object,
        "components": component_entries(&x, iota, out.unit),
        "tropical_entropy": out.unit.vector(&c.entropy()),
        "profile": profile,
        "homogeneous": homogeneous,
        "unit": out.unit.name(),
    }))
}

#[derive(Serialize)]
struct ProfileRow {
    n: usize,
    value: Option<f64>,
    method: Option<String>,
    is_exact: bool,
}

fn aikd(args: &AikdArgs, budget: u128, exact_budget: usize, out: &Output) -> Result<()> {
    let (x, y) = (read_diagram(&args.a)?, read_diagram(&args.b)?);
    let (a, b) = match &args.object {
        Some(o) => {
            let (i, j) = (object_index(&x, o)?, object_index(&y, o)?);
            (tropical_condition(&x, i).rep(), tropical_condition(&y, j).rep())
        }
        None => (linear_sequence(&x), linear_sequence(&y)),
    };
    let opts = IkdOptions { method: args.method.into(), exact_budget, ..IkdOptions::default() };
    let mut profile = aikd_estimate(&a, &b, args.n_max, budget, opts);
    for e in &mut profile.per_n {
        e.value = e.value.map(|v| out.unit.apply(v));
    }
    profile.upper = profile.upper.map(|v| out.unit.apply(v));
    match out.format {
        Format::Csv => {
            let rows: Vec<ProfileRow> = profile
                .per_n
                .iter()
                .map(|e| ProfileRow { n: e.n, value: e.value, method: e.method.clone(), is_exact: e.is_exact })
                .collect();
            out.csv(&rows)
        }
        Format::Json => {
            let mut v = serde_json::to_value(&profile).expect("profile serializes");
            v["unit"] = json!(out.unit.name());
            out.json(&v)
        }
    }
}

fn verify(suite: Suite, config: &VerifyConfig, out: &Output) -> Result<()> {
    let report = run_suite(suite, config)?;
    let text = pretty(&report);
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{suite}-report.json")), &text)?;
            for c in &report.counterexamples {
                for (k, instance) in c.instances.iter().enumerate() {
                    fs::write(dir.join(format!("{suite}-trial{}-{k}.json", c.trial)), pretty(instance))?;
                }
            }
            io::stdout().lock().write_all(text.as_bytes())?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    if report.ok() {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{suite}: {} of {} trials failed", report.failed, report.trials)))
    }
}

fn admissible(alpha: f64, claimed: Option<f64>, out: &Output) -> Result<()> {
    let report = check_admissible(&AdmissibleFunction::Power(alpha), claimed)?;
    out.json(&report)?;
    if report.admissible {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{} is not admissible", report.function)))
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.budget_outcomes == 0 || cli.exact_budget == 0 {
        return Err(CliError::Usage("budgets must be positive".into()));
    }
    let out = Output { format: cli.format, unit: cli.unit, out: cli.out.clone() };
    let exact_opts =
        |m: MethodArg| IkdOptions { method: m.into(), exact_budget: cli.exact_budget, ..IkdOptions::default() };
    match &cli.command {
        Command::Validate { path } => validate(path, &out),
        Command::Entropy { path } => entropy(path, &out),
        Command::Ikd { a, b, method } => {
            let (x, y) = (read_diagram(a)?, read_diagram(b)?);
            let mut s = ikd(&x, &y, exact_opts(*method))?.summary();
            s.value = out.unit.apply(s.value);
            let mut v = serde_json::to_value(&s).expect("summary serializes");
            v["unit"] = json!(out.unit.name());
            out.json(&v)
        }
        Command::Condition { path, object, atom } => condition(path, object, atom.as_deref(), &out),
        Command::TropCondition { path, object, n_max } => trop_condition(path, object, *n_max, &out),
        Command::Aikd(args) => aikd(args, cli.budget_outcomes, cli.exact_budget, &out),
        Command::Verify { suite, trials, seed, n_max } => {
            let config = VerifyConfig {
                trials: *trials,
                seed: *seed,
                outcome_budget: cli.budget_outcomes,
                exact_budget: cli.exact_budget,
                n_max: *n_max,
            };
            verify(*suite, &config, &out)
        }
        Command::Admissible { alpha, claimed } => admissible(*alpha, *claimed, &out),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for budgets here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
