//! `bandlab`: command-line runner for the band-operator checks.

mod config;
mod run;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandlab::PNorm;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Eps, ExperimentConfig, OperatorSource, Task};
use run::{Outcome, Status};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(String),
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Budget(m) => write!(f, "numerical budget exhausted: {m}"),
            CliError::Numeric(m) => write!(f, "cannot run: {m}"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Numeric(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Ok => 0,
        Status::Mismatch => 1,
        Status::Undecided => 4,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser)]
#[command(name = "bandlab", version, about = "Fredholm and invertibility checks for band operators on l^p(Z^N, C^d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Operator description file (JSON).
    #[arg(long, conflicts_with = "gallery")]
    op: Option<PathBuf>,
    /// Built-in gallery case.
    #[arg(long)]
    gallery: Option<String>,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<usize>>,
    /// 1, 2 or inf.
    #[arg(long, default_value = "2")]
    p: PNorm,
    /// Singular values below this count as zero.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Condition ladder of the one-sided invertibility theorem.
    #[command(alias = "ladder")]
    Check(Common),
    /// j, q and approximation numbers of finite sections.
    Moduli {
        #[command(flatten)]
        common: Common,
        /// Number of singular values per radius.
        #[arg(long, default_value_t = run::DEFAULT_MODULI_M)]
        m: usize,
    },
    /// Limit-operator spectrum with orbit annotations.
    Spectrum(Common),
    /// Trace of the semi-Fredholm argument.
    Tsemi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: usize,
        /// A number, or `auto` for the stabilized estimate of s^l_m(A).
        #[arg(long, default_value = "auto")]
        eps: String,
        /// Trace radius.
        #[arg(long, default_value_t = run::DEFAULT_TRACE_RADIUS)]
        n: usize,
    },
    /// Truncation-sweep classification.
    Sweep(Common),
    /// Run the gallery and compare against the known verdicts.
    Gallery {
        /// Restrict to these cases (repeatable).
        #[arg(long = "case")]
        cases: Vec<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Print a gallery case in the operator description format.
    Export {
        #[arg(long)]
        gallery: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn from_common(task: Task, c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::new(task);
    cfg.operator = match (&c.op, &c.gallery) {
        (Some(p), None) => Some(OperatorSource::File(p.clone())),
        (None, Some(g)) => Some(OperatorSource::Gallery(g.clone())),
        _ => return Err(CliError::Usage("give the operator with --op FILE or --gallery NAME".into())),
    };
    cfg.radii = c.radii.clone();
    cfg.p = c.p;
    if let Some(t) = c.tol {
        cfg.tolerances.zero_tol = t;
    }
    Ok(cfg)
}

fn parse_eps(s: &str) -> Result<Eps, CliError> {
    if s == "auto" {
        return Ok(Eps::Keyword(s.into()));
    }
    s.parse().map(Eps::Value).map_err(|_| CliError::Usage(format!("--eps: expected a number or `auto`, got `{s}`")))
}

fn write_to(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, content).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(outcome: &Outcome, output: &Output) -> Result<(), CliError> {
    let body = match output.format {
        Format::Json => outcome.json(),
        Format::Text => outcome.text.clone(),
        Format::Csv => outcome.csv.clone().expect("checked before running"),
    };
    match &output.out {
        Some(p) => write_to(p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn execute(cfg: ExperimentConfig, output: &Output) -> Result<Status, CliError> {
    if output.format == Format::Csv && !cfg.task.has_csv() {
        return Err(CliError::Usage(format!("--format: the {} task has no CSV table", cfg.task.name())));
    }
    let outcome = run::run_experiment(&cfg)?;
    emit(&outcome, output)?;
    Ok(outcome.status)
}

fn run_config(path: &Path) -> Result<Status, CliError> {
    let cfg = ExperimentConfig::from_file(path)?;
    let outcome = run::run_experiment(&cfg)?;
    let o = &cfg.outputs;
    if o.json.is_none() && o.csv.is_none() && o.text.is_none() {
        print!("{}", outcome.json());
    }
    if let Some(p) = &o.json {
        write_to(p, &outcome.json())?;
    }
    if let Some(p) = &o.csv {
        write_to(p, outcome.csv.as_deref().expect("validated"))?;
    }
    if let Some(p) = &o.text {
        write_to(p, &outcome.text)?;
    }
    Ok(outcome.status)
}

fn dispatch(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Check(c) => execute(from_common(Task::Ladder, &c)?, &c.output),
        Command::Spectrum(c) => execute(from_common(Task::Spectrum, &c)?, &c.output),
        Command::Sweep(c) => execute(from_common(Task::Sweep, &c)?, &c.output),
        Command::Moduli { common, m } => {
            let mut cfg = from_common(Task::Moduli, &common)?;
            cfg.m = Some(m);
            execute(cfg, &common.output)
        }
        Command::Tsemi { common, m, eps, n } => {
            let mut cfg = from_common(Task::Tsemi, &common)?;
            cfg.m = Some(m);
            cfg.eps = Some(parse_eps(&eps)?);
            cfg.trace_radius = Some(n);
            execute(cfg, &common.output)
        }
        Command::Gallery { cases, tol, output } => {
            let mut cfg = ExperimentConfig::new(Task::Gallery);
            cfg.cases = cases;
            if let Some(t) = tol {
                cfg.tolerances.zero_tol = t;
            }
            execute(cfg, &output)
        }
        Command::Export { gallery, out } => {
            let case = bandlab::gallery::build_example(&gallery).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut json = case.operator_json().map_err(|e| CliError::Usage(e.to_string()))?;
            json.push('\n');
            match out {
                Some(p) => write_to(&p, &json)?,
                None => print!("{json}"),
            }
            Ok(Status::Ok)
        }
        Command::Run { config } => run_config(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(status) => {
            if status != Status::Ok {
                eprintln!("bandlab: {}", match status {
                    Status::Mismatch => "verdict mismatch",
                    _ => "undecided where a definite verdict was expected",
                });
            }
            ExitCode::from(status_code(status))
        }
        Err(e) => {
            eprintln!("bandlab: {e}");
            ExitCode::from(e.code())
        }
    }
}
