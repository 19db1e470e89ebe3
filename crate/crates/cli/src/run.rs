//! Task dispatch and report assembly.

use bandlab::fredholmlab::{self, ConditionLadder, LadderConfig, Verdict};
use bandlab::gallery::{self, CheckStatus, GalleryCase, GalleryTolerances};
use bandlab::limitops::{self, OperatorSpectrum};
use bandlab::moduli::{self, FredholmClass, SweepConfig};
use bandlab::{BandOperator, Error, NormTag};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, OperatorSource, Task};
use crate::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MODULI_M: usize = 5;
pub const DEFAULT_TRACE_RADIUS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Mismatch,
    /// A definite answer was expected but the evidence stayed undecided.
    Undecided,
}

impl Status {
    fn worst(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Mismatch, _) | (_, Mismatch) => Mismatch,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Ok,
        }
    }
}

/// A comparison against a known answer of a gallery case.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Expectation {
    pub check: String,
    pub expected: String,
    pub observed: String,
    pub status: Status,
}

pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub csv: Option<String>,
    pub status: Status,
}

impl Outcome {
    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn numeric(e: Error) -> CliError {
    match e {
        Error::BudgetExhausted(m) => CliError::Budget(m),
        Error::UnknownCase(_) | Error::Format(_) => CliError::Usage(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

struct Resolved {
    label: String,
    operator: BandOperator,
    case: Option<GalleryCase>,
}

fn resolve(source: &OperatorSource) -> Result<Resolved, CliError> {
    match source {
        OperatorSource::Inline(op) => Ok(Resolved { label: "inline".into(), operator: op.clone(), case: None }),
        OperatorSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("operator file {}: {e}", path.display())))?;
            let operator =
                BandOperator::from_json(&text).map_err(|e| CliError::Usage(format!("operator file {}: {e}", path.display())))?;
            Ok(Resolved { label: format!("file:{}", path.display()), operator, case: None })
        }
        OperatorSource::Gallery(name) => {
            let case = gallery::build_example(name).map_err(numeric)?;
            let operator = case
                .operator()
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("gallery case `{name}` is not a band operator; run `bandlab gallery --case {name}`")))?;
            Ok(Resolved { label: format!("gallery:{name}"), operator, case: Some(case) })
        }
    }
}

fn sweep_config(cfg: &ExperimentConfig) -> SweepConfig {
    SweepConfig { zero_tol: cfg.tolerances.zero_tol, stab_tol: cfg.tolerances.stab_tol, sep_factor: cfg.tolerances.sep_factor }
}

fn envelope(cfg: &ExperimentConfig, source: &str, result: Value, expectations: &[Expectation], status: Status) -> Value {
    let mut v = json!({
        "schemaVersion": REPORT_SCHEMA_VERSION,
        "task": cfg.task.name(),
        "source": source,
        "p": cfg.p,
        "tolerances": cfg.tolerances,
        "result": result,
        "status": status,
    });
    if !expectations.is_empty() {
        v["expectations"] = serde_json::to_value(expectations).expect("expectations serialize");
    }
    v
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn compare(check: String, expected: impl ToString, observed: impl ToString, undecided: bool) -> Expectation {
    let (expected, observed) = (expected.to_string(), observed.to_string());
    let status = if expected == observed {
        Status::Ok
    } else if undecided {
        Status::Undecided
    } else {
        Status::Mismatch
    };
    Expectation { check, expected, observed, status }
}

fn ladder_expectations(case: &GalleryCase, ladder: &ConditionLadder) -> Vec<Expectation> {
    let mut out: Vec<Expectation> = case
        .expected
        .ladder
        .iter()
        .map(|(tag, expected)| {
            let observed = ladder.verdict(*tag);
            compare(format!("ladder {}", tag.label()), expected, observed, observed == Verdict::Undecided)
        })
        .collect();
    if let (Some(expected), Some(sweep)) = (case.expected.sweep, &ladder.sweep) {
        out.push(compare("truncation sweep at p = 2".into(), expected, sweep.class, sweep.class == FredholmClass::Undecided));
    }
    out
}

fn ladder_status(ladder: &ConditionLadder) -> Status {
    if !ladder.violations.is_empty() || ladder.sweep_agrees == Some(false) {
        Status::Mismatch
    } else {
        Status::Ok
    }
}

/// Runs a validated configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let norm = NormTag::new(cfg.p);
    if cfg.task == Task::Gallery {
        return run_gallery(cfg);
    }
    let src = resolve(cfg.operator.as_ref().expect("validated"))?;
    let op = &src.operator;
    let radii_or = |default: Vec<usize>| cfg.radii.clone().unwrap_or(default);
    let mut expectations = Vec::new();
    let (result, text, csv, status) = match cfg.task {
        Task::Moduli => {
            let radii = radii_or(if op.dim() == 1 { vec![8, 16, 32, 64] } else { vec![2, 4, 6, 8] });
            let m = cfg.m.unwrap_or(DEFAULT_MODULI_M);
            let report = moduli::moduli_report(op, &radii, m, norm, cfg.tolerances.stab_tol).map_err(numeric)?;
            let csv = report.to_csv();
            (to_value(&report), csv.clone(), Some(csv), Status::Ok)
        }
        Task::Spectrum => {
            let spec = match src.case.as_ref().and_then(|c| c.declared_spectrum.clone()) {
                Some(s) => s,
                None => limitops::operator_spectrum(op).map_err(numeric)?,
            };
            let mut status = Status::Ok;
            if let Some(size) = src.case.as_ref().and_then(|c| c.expected.spectrum_size) {
                let e = compare("operator spectrum size".into(), size, spec.len(), false);
                status = e.status;
                expectations.push(e);
            }
            (to_value(&spec), spectrum_text(&spec), None, status)
        }
        Task::Ladder => {
            let mut lc = LadderConfig::for_dim(op.dim());
            lc.sweep = sweep_config(cfg);
            lc.symbol_tol = cfg.tolerances.symbol_tol;
            lc.identity_tol = cfg.tolerances.identity_tol;
            if let Some(r) = &cfg.radii {
                lc.sweep_radii = r.clone();
            }
            let ladder = match src.case.as_ref().and_then(|c| c.declared_spectrum.as_ref()) {
                Some(spec) => fredholmlab::check_conditions_with_spectrum(op, spec, &lc),
                None => fredholmlab::check_conditions(op, &lc),
            }
            .map_err(numeric)?;
            let mut status = ladder_status(&ladder);
            if let Some(case) = &src.case {
                expectations = ladder_expectations(case, &ladder);
                status = expectations.iter().fold(status, |s, e| s.worst(e.status));
            }
            (to_value(&ladder), ladder.to_string(), None, status)
        }
        Task::Tsemi => {
            let n = cfg.trace_radius.unwrap_or(DEFAULT_TRACE_RADIUS);
            let trace = fredholmlab::tsemi_trace(op, cfg.m.expect("validated"), cfg.eps_value(), n, norm).map_err(numeric)?;
            let status = if trace.chain_holds && trace.index.holds { Status::Ok } else { Status::Mismatch };
            (to_value(&trace), trace.to_string(), None, status)
        }
        Task::Sweep => {
            let radii = radii_or(gallery::default_radii(op.dim()));
            let verdict = moduli::truncation_sweep_classify(op, &radii, sweep_config(cfg)).map_err(numeric)?;
            let mut status = Status::Ok;
            if op.dim() == 1 && matches!(verdict.class, FredholmClass::UpperSemiOnly | FredholmClass::LowerSemiOnly) {
                status = Status::Mismatch;
            }
            if let Some(expected) = src.case.as_ref().and_then(|c| c.expected.sweep) {
                let e = compare("truncation sweep".into(), expected, verdict.class, verdict.class == FredholmClass::Undecided);
                status = status.worst(e.status);
                expectations.push(e);
            }
            let csv = sweep_csv(&verdict);
            (to_value(&verdict), sweep_text(&verdict), Some(csv), status)
        }
        Task::Gallery => unreachable!(),
    };
    let report = envelope(cfg, &src.label, result, &expectations, status);
    let mut text = text;
    for e in &expectations {
        text.push_str(&format!("expect {}: {} (observed {}) {:?}\n", e.check, e.expected, e.observed, e.status));
    }
    Ok(Outcome { report, text, csv, status })
}

fn run_gallery(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let tol = GalleryTolerances { sweep: sweep_config(cfg), symbol_tol: cfg.tolerances.symbol_tol, identity_tol: cfg.tolerances.identity_tol };
    let names: Vec<&str> = if cfg.cases.is_empty() { gallery::CASE_NAMES.to_vec() } else { cfg.cases.iter().map(String::as_str).collect() };
    let report = gallery::run_cases(&names, &tol).map_err(numeric)?;
    let status = report.cases.iter().fold(Status::Ok, |s, c| {
        s.worst(match c.status {
            CheckStatus::Pass => Status::Ok,
            CheckStatus::Fail => Status::Mismatch,
            CheckStatus::ToleranceSensitive => Status::Undecided,
        })
    });
    let mut csv = String::from("case,check,expected,observed,status\n");
    for c in &report.cases {
        for k in &c.checks {
            csv.push_str(&format!("{},{},{},{},{:?}\n", c.name, csv_field(&k.check), csv_field(&k.expected), csv_field(&k.observed), k.status));
        }
    }
    let source = if cfg.cases.is_empty() { "gallery".to_string() } else { format!("gallery:{}", cfg.cases.join(",")) };
    Ok(Outcome { report: envelope(cfg, &source, to_value(&report), &[], status), text: report.to_string(), csv: Some(csv), status })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn spectrum_text(spec: &OperatorSpectrum) -> String {
    let mut out = format!("operator spectrum: {} orbit(s)\n", spec.len());
    for (i, orbit) in spec.orbits.iter().enumerate() {
        let op = &orbit.operator;
        let kind = match &orbit.orbit {
            limitops::OrbitKind::Fixed => "fixed".to_string(),
            limitops::OrbitKind::Cycle { size } => format!("cycle of {size}"),
            limitops::OrbitKind::Translates { axes } => format!("translates along axes {axes:?}"),
        };
        let diags: Vec<String> = op.diagonals().iter().map(|(k, s)| format!("{k}:{}", s.class_name())).collect();
        out.push_str(&format!("  #{i} {kind}; diagonals {}\n", diags.join(" ")));
    }
    out
}

fn sweep_csv(v: &moduli::SweepVerdict) -> String {
    let mut out = String::from("radius,kernel_count,cokernel_count\n");
    for (i, r) in v.radii.iter().enumerate() {
        let k = v.kernel.counts.get(i).map_or(String::new(), |c| c.to_string());
        let c = v.cokernel.counts.get(i).map_or(String::new(), |c| c.to_string());
        out.push_str(&format!("{r},{k},{c}\n"));
    }
    out
}

fn sweep_text(v: &moduli::SweepVerdict) -> String {
    format!(
        "truncation sweep over radii {:?}: {}\n  kernel counts {:?} ({:?})\n  cokernel counts {:?} ({:?})\n",
        v.radii, v.class, v.kernel.counts, v.kernel.status, v.cokernel.counts, v.cokernel.status
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatch_dominates_undecided() {
        use Status::*;
        assert_eq!(Ok.worst(Undecided), Undecided);
        assert_eq!(Undecided.worst(Mismatch), Mismatch);
        assert_eq!(Mismatch.worst(Ok), Mismatch);
        assert_eq!(Ok.worst(Ok), Ok);
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare("x".into(), "holds", "holds", false).status, Status::Ok);
        assert_eq!(compare("x".into(), "holds", "fails", false).status, Status::Mismatch);
        assert_eq!(compare("x".into(), "holds", "undecided", true).status, Status::Undecided);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
    }
}
