//! Experiment configuration: where the operator comes from, which task to
//! run, and where the artifacts go.

use std::path::{Path, PathBuf};

use bandlab::{BandOperator, PNorm};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum OperatorSource {
    Inline(BandOperator),
    File(PathBuf),
    Gallery(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Moduli,
    Spectrum,
    Ladder,
    Tsemi,
    Gallery,
    Sweep,
}

impl Task {
    pub fn has_csv(self) -> bool {
        matches!(self, Task::Moduli | Task::Sweep | Task::Gallery)
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Moduli => "moduli",
            Task::Spectrum => "spectrum",
            Task::Ladder => "ladder",
            Task::Tsemi => "tsemi",
            Task::Gallery => "gallery",
            Task::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct Tolerances {
    pub zero_tol: f64,
    pub stab_tol: f64,
    pub sep_factor: f64,
    pub symbol_tol: f64,
    pub identity_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = bandlab::moduli::SweepConfig::default();
        Self {
            zero_tol: s.zero_tol,
            stab_tol: s.stab_tol,
            sep_factor: s.sep_factor,
            symbol_tol: bandlab::fredholmlab::SYMBOL_TOL,
            identity_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Eps {
    Value(f64),
    Keyword(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub text: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: Option<OperatorSource>,
    pub task: Task,
    pub radii: Option<Vec<usize>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_p")]
    pub p: PNorm,
    pub m: Option<usize>,
    pub eps: Option<Eps>,
    pub trace_radius: Option<usize>,
    /// Gallery task: restrict to these cases.
    #[serde(default)]
    pub cases: Vec<String>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_p() -> PNorm {
    PNorm::Two
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{path}: {msg}"))
}

impl ExperimentConfig {
    pub fn new(task: Task) -> Self {
        Self {
            operator: None,
            task,
            radii: None,
            tolerances: Tolerances::default(),
            p: PNorm::Two,
            m: None,
            eps: None,
            trace_radius: None,
            cases: Vec::new(),
            outputs: Outputs::default(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(&path.display().to_string(), e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| invalid("config", e))?;
        Ok(cfg.resolve_relative(path.parent().unwrap_or(Path::new("."))))
    }

    /// Relative file paths in a config file are taken from the file's directory.
    fn resolve_relative(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(OperatorSource::File(p)) = &mut self.operator {
            fix(p);
        }
        for p in [&mut self.outputs.json, &mut self.outputs.csv, &mut self.outputs.text].into_iter().flatten() {
            fix(p);
        }
        self
    }

    /// Task-specific checks, run before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("zeroTol", t.zero_tol),
            ("stabTol", t.stab_tol),
            ("sepFactor", t.sep_factor),
            ("symbolTol", t.symbol_tol),
            ("identityTol", t.identity_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(&format!("tolerances.{name}"), format!("must be a positive number, got {v}")));
            }
        }
        if let Some(radii) = &self.radii {
            if radii.is_empty() {
                return Err(invalid("radii", "must not be empty"));
            }
            if radii.contains(&0) {
                return Err(invalid("radii", "radii start at 1"));
            }
        }
        match self.task {
            Task::Gallery => {
                if self.operator.is_some() {
                    return Err(invalid("operator", "the gallery task runs the built-in cases; use `cases` to select"));
                }
                for (i, name) in self.cases.iter().enumerate() {
                    if !bandlab::gallery::CASE_NAMES.contains(&name.as_str()) {
                        return Err(invalid(&format!("cases[{i}]"), format!("unknown gallery case `{name}`")));
                    }
                }
            }
            _ => {
                if self.operator.is_none() {
                    return Err(invalid("operator", format!("the {} task needs an operator (inline, file or gallery)", self.task.name())));
                }
                if !self.cases.is_empty() {
                    return Err(invalid("cases", "only the gallery task takes cases"));
                }
            }
        }
        if matches!(self.task, Task::Ladder | Task::Tsemi | Task::Sweep) && self.p != PNorm::Two {
            return Err(invalid("p", format!("the {} task works at p = 2", self.task.name())));
        }
        if matches!(self.task, Task::Sweep | Task::Ladder) {
            if let Some(r) = &self.radii {
                let mut r = r.clone();
                r.sort_unstable();
                r.dedup();
                if r.len() < 3 {
                    return Err(invalid("radii", "the truncation sweep needs at least 3 distinct radii"));
                }
            }
        }
        match self.task {
            Task::Moduli | Task::Tsemi => match self.m {
                Some(0) => return Err(invalid("m", "starts at 1")),
                None if self.task == Task::Tsemi => return Err(invalid("m", "required by the tsemi task")),
                _ => {}
            },
            _ => {
                if self.m.is_some() {
                    return Err(invalid("m", format!("not used by the {} task", self.task.name())));
                }
            }
        }
        match (&self.eps, self.task) {
            (Some(_), t) if t != Task::Tsemi => return Err(invalid("eps", "only the tsemi task takes eps")),
            (Some(Eps::Keyword(k)), _) if k != "auto" => return Err(invalid("eps", format!("expected a number or \"auto\", got \"{k}\""))),
            (Some(Eps::Value(v)), _) if !(v.is_finite() && *v >= 0.0) => return Err(invalid("eps", "must be non-negative")),
            _ => {}
        }
        if self.trace_radius.is_some() && self.task != Task::Tsemi {
            return Err(invalid("traceRadius", "only the tsemi task takes a trace radius"));
        }
        if self.outputs.csv.is_some() && !self.task.has_csv() {
            return Err(invalid("outputs.csv", format!("the {} task has no CSV table", self.task.name())));
        }
        Ok(())
    }

    pub fn eps_value(&self) -> Option<f64> {
        match self.eps {
            Some(Eps::Value(v)) => Some(v),
            _ => None,
        }
    }
}
