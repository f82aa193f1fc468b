//! JSON scenario files and their execution.
//!
//! ```json
//! {
//!   "subsystems": [
//!     {"label": "s", "amplitudes": [[0.6, 0], [0.8, 0]]},
//!     {"label": "o", "amplitudes": [[1, 0], [0, 0]]},
//!     {"ghz": {"labels": ["e1", "e2", "e3"], "coefficients": [[1, 0], [1, 0]]}}
//!   ],
//!   "script": [
//!     {"op": "ledger_record", "tag": "before"},
//!     {"op": "corrected_measure", "signal": "s", "observer": "o",
//!      "environment": ["e1", "e2", "e3"]},
//!     {"op": "ledger_record", "tag": "after"},
//!     {"op": "branch_decompose", "default_basis": "Z", "basis": {"s": "X"}}
//!   ],
//!   "options": {"tolerance": 1e-9, "relabel": true, "format": "text"}
//! }
//! ```
//!
//! Gate steps: `imprint` and `inverse_imprint` (`source`, `target`), `swap`
//! (`a`, `b`), `rotate_basis` (`target`). Protocol steps:
//! `uncorrected_measure` (`signal`, `observer`, `environment`),
//! `corrected_measure` (`signal`, `observer`, `environment` list, optional
//! `basis`), `ideal_measure` (`signal`, `observer`, optional `basis`).
//! Analysis steps: `branch_decompose`, `find_clusters`, `ledger_record`
//! (`tag`), `agreement` (`pairs`), `recover_record` (`records`); the ones
//! reading branches accept `default_basis` and a per-label `basis` map.
//!
//! Every error carries a code. `E1xx` codes are raised while parsing, before
//! any amplitude is computed; `E2xx` codes come from execution.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{agreement, find_clusters, ledger_record, recover_record};
use crate::analysis::{ClusterDecomposition, CorrelationLedger, RecordInference};
use crate::error::Error;
use crate::gates::{apply_script, GateOp};
use crate::oracle::{oracle_apply, ORACLE_MAX_QUBITS};
use crate::protocol::{corrected_plan, ideal_plan, uncorrected_plan, MeasurementSpec};
use crate::report::{format_complex, format_real, Report, Section};
use crate::statevec::{
    branch_decompose, make_ghz, max_deviation, product_state, tensor, Amplitude, Basis,
    BasisChoice, BranchSet, Label, PureState, Register,
};

/// Largest register a scenario may declare.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("E100 syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("E101 schema error: {0}")]
    Schema(String),
    #[error("E102 unknown label `{label}` in step {step}")]
    UnknownLabel { label: String, step: usize },
    #[error("E103 duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("E104 bad amplitudes for `{label}`: {reason}")]
    BadAmplitudes { label: String, reason: String },
    #[error("E105 invalid label `{0}`")]
    InvalidLabel(String),
    #[error("E106 invalid step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("E107 invalid option: {0}")]
    InvalidOption(String),
    #[error("E200 step {step} ({op}) failed: {source}")]
    StepFailed {
        step: usize,
        op: String,
        source: Error,
    },
    #[error("E201 oracle mismatch: deviation {deviation:e} exceeds {tolerance:e}")]
    OracleMismatch { deviation: f64, tolerance: f64 },
    #[error("E202 register of {qubits} qubits exceeds the oracle cap of {cap}")]
    OracleTooLarge { qubits: usize, cap: usize },
}

impl ScenarioError {
    pub fn code(&self) -> &'static str {
        match self {
            ScenarioError::Syntax { .. } => "E100",
            ScenarioError::Schema(_) => "E101",
            ScenarioError::UnknownLabel { .. } => "E102",
            ScenarioError::DuplicateLabel(_) => "E103",
            ScenarioError::BadAmplitudes { .. } => "E104",
            ScenarioError::InvalidLabel(_) => "E105",
            ScenarioError::InvalidStep { .. } => "E106",
            ScenarioError::InvalidOption(_) => "E107",
            ScenarioError::StepFailed { .. } => "E200",
            ScenarioError::OracleMismatch { .. } => "E201",
            ScenarioError::OracleTooLarge { .. } => "E202",
        }
    }

    /// 1 for scenario errors, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        if self.code().starts_with("E1") {
            1
        } else {
            2
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub tolerance: f64,
    pub relabel: bool,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tolerance: 1e-9,
            relabel: true,
            format: Format::Text,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Subsystem {
    Single {
        label: Label,
        amplitudes: (Amplitude, Amplitude),
    },
    Ghz {
        labels: Vec<Label>,
        coefficients: (Amplitude, Amplitude),
    },
}

/// Default basis plus per-label exceptions.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisMap {
    pub default: Basis,
    pub overrides: Vec<(String, Basis)>,
}

impl BasisMap {
    pub fn choice(&self, register: &Register) -> crate::Result<BasisChoice> {
        BasisChoice::with_overrides(register, self.default, &self.overrides)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate(GateOp),
    UncorrectedMeasure {
        signal: String,
        observer: String,
        environment: String,
    },
    CorrectedMeasure(MeasurementSpec),
    IdealMeasure {
        signal: String,
        observer: String,
        basis: Basis,
    },
    BranchDecompose(BasisMap),
    FindClusters,
    LedgerRecord {
        tag: String,
    },
    Agreement {
        pairs: Vec<(String, String)>,
        basis: BasisMap,
    },
    RecoverRecord {
        records: Vec<String>,
        basis: BasisMap,
    },
}

impl Step {
    pub fn op_name(&self) -> &'static str {
        match self {
            Step::Gate(GateOp::Imprint { .. }) => "imprint",
            Step::Gate(GateOp::InverseImprint { .. }) => "inverse_imprint",
            Step::Gate(GateOp::Swap { .. }) => "swap",
            Step::Gate(GateOp::RotateBasis { .. }) => "rotate_basis",
            Step::UncorrectedMeasure { .. } => "uncorrected_measure",
            Step::CorrectedMeasure(_) => "corrected_measure",
            Step::IdealMeasure { .. } => "ideal_measure",
            Step::BranchDecompose(_) => "branch_decompose",
            Step::FindClusters => "find_clusters",
            Step::LedgerRecord { .. } => "ledger_record",
            Step::Agreement { .. } => "agreement",
            Step::RecoverRecord { .. } => "recover_record",
        }
    }

    /// Whether the step changes the state.
    pub fn is_evolution(&self) -> bool {
        matches!(
            self,
            Step::Gate(_)
                | Step::UncorrectedMeasure { .. }
                | Step::CorrectedMeasure(_)
                | Step::IdealMeasure { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub subsystems: Vec<Subsystem>,
    pub script: Vec<Step>,
    pub options: Options,
}

impl Scenario {
    /// Labels in declaration order, GHZ groups expanded in place.
    pub fn register(&self) -> Register {
        let labels = self
            .subsystems
            .iter()
            .flat_map(|s| match s {
                Subsystem::Single { label, .. } => vec![label.clone()],
                Subsystem::Ghz { labels, .. } => labels.clone(),
            })
            .collect();
        Register::from_labels(labels).expect("labels validated at parse time")
    }

    pub fn initial_state(&self) -> crate::Result<PureState> {
        let mut state: Option<PureState> = None;
        for sub in &self.subsystems {
            let part = match sub {
                Subsystem::Single { label, amplitudes } => {
                    product_state(Register::from_labels(vec![label.clone()])?, &[*amplitudes])?
                }
                Subsystem::Ghz {
                    labels,
                    coefficients,
                } => make_ghz(labels, *coefficients)?,
            };
            state = Some(match state {
                None => part,
                Some(acc) => tensor(&acc, &part)?,
            });
        }
        state.ok_or(Error::EmptyLabels)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    subsystems: Vec<RawSubsystem>,
    #[serde(default)]
    script: Vec<RawStep>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSubsystem {
    Single(RawSingle),
    Ghz(RawGhzDecl),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSingle {
    label: String,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGhzDecl {
    ghz: RawGhz,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGhz {
    labels: Vec<String>,
    coefficients: Vec<[f64; 2]>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    tolerance: Option<f64>,
    relabel: Option<bool>,
    format: Option<String>,
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum RawStep {
    Imprint {
        source: String,
        target: String,
    },
    InverseImprint {
        source: String,
        target: String,
    },
    Swap {
        a: String,
        b: String,
    },
    RotateBasis {
        target: String,
    },
    UncorrectedMeasure {
        signal: String,
        observer: String,
        environment: String,
    },
    CorrectedMeasure {
        signal: String,
        observer: String,
        environment: Vec<String>,
        basis: Option<String>,
    },
    IdealMeasure {
        signal: String,
        observer: String,
        basis: Option<String>,
    },
    BranchDecompose {
        default_basis: Option<String>,
        #[serde(default)]
        basis: BTreeMap<String, String>,
    },
    FindClusters {},
    LedgerRecord {
        tag: Option<String>,
    },
    Agreement {
        pairs: Vec<(String, String)>,
        default_basis: Option<String>,
        #[serde(default)]
        basis: BTreeMap<String, String>,
    },
    RecoverRecord {
        records: Vec<String>,
        default_basis: Option<String>,
        #[serde(default)]
        basis: BTreeMap<String, String>,
    },
}

fn parse_basis(text: &str, step: usize) -> Result<Basis, ScenarioError> {
    match text {
        "Z" | "z" => Ok(Basis::Z),
        "X" | "x" => Ok(Basis::X),
        other => Err(ScenarioError::InvalidStep {
            step,
            reason: format!("unknown basis `{other}`"),
        }),
    }
}

fn parse_pair(label: &str, pair: &[[f64; 2]]) -> Result<(Amplitude, Amplitude), ScenarioError> {
    let bad = |reason: &str| ScenarioError::BadAmplitudes {
        label: label.to_string(),
        reason: reason.to_string(),
    };
    if pair.len() != 2 {
        return Err(bad(&format!(
            "expected 2 complex entries, found {}",
            pair.len()
        )));
    }
    if pair.iter().flatten().any(|x| !x.is_finite()) {
        return Err(bad("non-finite entry"));
    }
    let a = Complex64::new(pair[0][0], pair[0][1]);
    let b = Complex64::new(pair[1][0], pair[1][1]);
    if a.norm_sqr() + b.norm_sqr() == 0.0 {
        return Err(bad("zero vector"));
    }
    Ok((a, b))
}

struct Resolver {
    labels: Vec<String>,
}

impl Resolver {
    fn check(&self, label: &str, step: usize) -> Result<String, ScenarioError> {
        if self.labels.iter().any(|l| l == label) {
            Ok(label.to_string())
        } else {
            Err(ScenarioError::UnknownLabel {
                label: label.to_string(),
                step,
            })
        }
    }

    fn distinct(&self, labels: &[&str], step: usize) -> Result<(), ScenarioError> {
        for l in labels {
            self.check(l, step)?;
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ScenarioError::InvalidStep {
                    step,
                    reason: format!("`{l}` appears in two roles"),
                });
            }
        }
        Ok(())
    }

    fn basis_map(
        &self,
        default: Option<&str>,
        map: &BTreeMap<String, String>,
        step: usize,
    ) -> Result<BasisMap, ScenarioError> {
        let default = default
            .map(|b| parse_basis(b, step))
            .transpose()?
            .unwrap_or(Basis::Z);
        let overrides = map
            .iter()
            .map(|(l, b)| Ok((self.check(l, step)?, parse_basis(b, step)?)))
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        Ok(BasisMap { default, overrides })
    }
}

fn resolve_step(raw: RawStep, step: usize, r: &Resolver) -> Result<Step, ScenarioError> {
    Ok(match raw {
        RawStep::Imprint { source, target } => {
            r.distinct(&[&source, &target], step)?;
            Step::Gate(GateOp::imprint(&source, &target))
        }
        RawStep::InverseImprint { source, target } => {
            r.distinct(&[&source, &target], step)?;
            Step::Gate(GateOp::inverse_imprint(&source, &target))
        }
        RawStep::Swap { a, b } => {
            r.distinct(&[&a, &b], step)?;
            Step::Gate(GateOp::swap(&a, &b))
        }
        RawStep::RotateBasis { target } => {
            r.check(&target, step)?;
            Step::Gate(GateOp::rotate_basis(&target))
        }
        RawStep::UncorrectedMeasure {
            signal,
            observer,
            environment,
        } => {
            r.distinct(&[&signal, &observer, &environment], step)?;
            Step::UncorrectedMeasure {
                signal,
                observer,
                environment,
            }
        }
        RawStep::CorrectedMeasure {
            signal,
            observer,
            environment,
            basis,
        } => {
            let mut roles: Vec<&str> = vec![&signal, &observer];
            roles.extend(environment.iter().map(String::as_str));
            r.distinct(&roles, step)?;
            if environment.len() < 2 {
                return Err(ScenarioError::InvalidStep {
                    step,
                    reason: format!(
                        "corrected_measure needs at least 2 environment qubits, got {}",
                        environment.len()
                    ),
                });
            }
            let basis = basis
                .map(|b| parse_basis(&b, step))
                .transpose()?
                .unwrap_or(Basis::Z);
            Step::CorrectedMeasure(
                MeasurementSpec::new(&signal, &observer, &environment).in_basis(basis),
            )
        }
        RawStep::IdealMeasure {
            signal,
            observer,
            basis,
        } => {
            r.distinct(&[&signal, &observer], step)?;
            let basis = basis
                .map(|b| parse_basis(&b, step))
                .transpose()?
                .unwrap_or(Basis::Z);
            Step::IdealMeasure {
                signal,
                observer,
                basis,
            }
        }
        RawStep::BranchDecompose {
            default_basis,
            basis,
        } => Step::BranchDecompose(r.basis_map(default_basis.as_deref(), &basis, step)?),
        RawStep::FindClusters {} => Step::FindClusters,
        RawStep::LedgerRecord { tag } => Step::LedgerRecord {
            tag: tag.unwrap_or_else(|| format!("step {step}")),
        },
        RawStep::Agreement {
            pairs,
            default_basis,
            basis,
        } => {
            if pairs.is_empty() {
                return Err(ScenarioError::InvalidStep {
                    step,
                    reason: "agreement needs at least one pair".into(),
                });
            }
            for (a, b) in &pairs {
                r.check(a, step)?;
                r.check(b, step)?;
            }
            Step::Agreement {
                pairs,
                basis: r.basis_map(default_basis.as_deref(), &basis, step)?,
            }
        }
        RawStep::RecoverRecord {
            records,
            default_basis,
            basis,
        } => {
            if records.is_empty() {
                return Err(ScenarioError::InvalidStep {
                    step,
                    reason: "recover_record needs at least one record".into(),
                });
            }
            for l in &records {
                r.check(l, step)?;
            }
            Step::RecoverRecord {
                records,
                basis: r.basis_map(default_basis.as_deref(), &basis, step)?,
            }
        }
    })
}

fn classify(err: serde_json::Error) -> ScenarioError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => ScenarioError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
        Category::Data => ScenarioError::Schema(err.to_string()),
    }
}

fn label(name: &str, seen: &mut Vec<String>) -> Result<Label, ScenarioError> {
    let l = Label::new(name).map_err(|_| ScenarioError::InvalidLabel(name.to_string()))?;
    if seen.iter().any(|s| s == name) {
        return Err(ScenarioError::DuplicateLabel(name.to_string()));
    }
    seen.push(name.to_string());
    Ok(l)
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = serde_json::from_str(text).map_err(classify)?;
    if raw.subsystems.is_empty() {
        return Err(ScenarioError::Schema("no subsystems declared".into()));
    }

    let mut seen = Vec::new();
    let mut subsystems = Vec::new();
    for sub in raw.subsystems {
        subsystems.push(match sub {
            RawSubsystem::Single(s) => {
                let l = label(&s.label, &mut seen)?;
                Subsystem::Single {
                    amplitudes: parse_pair(&s.label, &s.amplitudes)?,
                    label: l,
                }
            }
            RawSubsystem::Ghz(g) => {
                if g.ghz.labels.is_empty() {
                    return Err(ScenarioError::Schema("GHZ group without labels".into()));
                }
                let labels = g
                    .ghz
                    .labels
                    .iter()
                    .map(|n| label(n, &mut seen))
                    .collect::<Result<Vec<_>, _>>()?;
                Subsystem::Ghz {
                    coefficients: parse_pair(&g.ghz.labels.join(","), &g.ghz.coefficients)?,
                    labels,
                }
            }
        });
    }
    if seen.len() > MAX_QUBITS {
        return Err(ScenarioError::Schema(format!(
            "{} qubits declared, at most {MAX_QUBITS} supported",
            seen.len()
        )));
    }

    let resolver = Resolver { labels: seen };
    let script = raw
        .script
        .into_iter()
        .enumerate()
        .map(|(i, s)| resolve_step(s, i + 1, &resolver))
        .collect::<Result<Vec<_>, _>>()?;

    let defaults = Options::default();
    let tolerance = raw.options.tolerance.unwrap_or(defaults.tolerance);
    check_tolerance(tolerance)?;
    let format = match raw.options.format.as_deref() {
        None | Some("text") => Format::Text,
        Some("json") => Format::Json,
        Some(other) => {
            return Err(ScenarioError::InvalidOption(format!(
                "unknown format `{other}`"
            )))
        }
    };
    Ok(Scenario {
        subsystems,
        script,
        options: Options {
            tolerance,
            relabel: raw.options.relabel.unwrap_or(defaults.relabel),
            format,
        },
    })
}

/// Tolerances must be finite and in `(0, 1)`.
pub fn check_tolerance(tol: f64) -> Result<(), ScenarioError> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(ScenarioError::InvalidOption(format!(
            "tolerance {tol} outside (0, 1)"
        )))
    }
}

/// How evolution steps are applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// In-place index kernels.
    Kernel,
    /// Dense Kronecker-product matrices, capped at [`ORACLE_MAX_QUBITS`].
    Oracle,
}

/// A report together with the state the script ended in.
#[derive(Clone, Debug)]
pub struct Execution {
    pub report: Report,
    pub final_state: PureState,
}

pub fn run(scenario: &Scenario) -> Result<Report, ScenarioError> {
    execute(scenario, Engine::Kernel).map(|e| e.report)
}

/// Runs the script with the chosen engine.
pub fn execute(scenario: &Scenario, engine: Engine) -> Result<Execution, ScenarioError> {
    let register = scenario.register();
    if engine == Engine::Oracle && register.len() > ORACLE_MAX_QUBITS {
        return Err(ScenarioError::OracleTooLarge {
            qubits: register.len(),
            cap: ORACLE_MAX_QUBITS,
        });
    }
    let tol = scenario.options.tolerance;
    let mut state = scenario
        .initial_state()
        .map_err(|source| ScenarioError::StepFailed {
            step: 0,
            op: "initial state".into(),
            source,
        })?;
    let mut report = Report::new();
    report.push(state_section("initial state", &state, engine));
    let mut ledger = CorrelationLedger::new(tol, scenario.options.relabel);

    for (i, step) in scenario.script.iter().enumerate() {
        let index = i + 1;
        let fail = |source: Error| ScenarioError::StepFailed {
            step: index,
            op: step.op_name().to_string(),
            source,
        };
        if step.is_evolution() {
            let plan = plan(&state, step, tol).map_err(fail)?;
            state = match engine {
                Engine::Kernel => apply_script(&state, &plan),
                Engine::Oracle => oracle_apply(&state, &plan),
            }
            .map_err(fail)?;
            continue;
        }
        let title = format!("step {index}: {}", step.op_name());
        let section = match step {
            Step::BranchDecompose(basis) => {
                let set = decompose(&state, basis).map_err(fail)?;
                branch_section(title, &set)
            }
            Step::FindClusters => {
                let d = find_clusters(&state, tol, scenario.options.relabel);
                cluster_section(Section::new(title), &d)
            }
            Step::LedgerRecord { tag } => {
                ledger = ledger_record(&ledger, &state, tag).map_err(fail)?;
                let entry = ledger.entries().last().expect("just recorded");
                let totals: Vec<String> = ledger.totals().iter().map(usize::to_string).collect();
                let section = Section::new(title)
                    .note("tag", tag.clone())
                    .note("total", entry.total.to_string())
                    .note("history", totals.join(" "));
                cluster_section(section, &entry.decomposition)
            }
            Step::Agreement { pairs, basis } => {
                let set = decompose(&state, basis).map_err(fail)?;
                agreement_section(title, &set, pairs).map_err(fail)?
            }
            Step::RecoverRecord { records, basis } => {
                let set = decompose(&state, basis).map_err(fail)?;
                record_section(title, &set, records).map_err(fail)?
            }
            _ => unreachable!("evolution steps handled above"),
        };
        report.push(section);
    }
    if !scenario.script.is_empty() {
        report.push(state_section("final state", &state, engine));
    }
    Ok(Execution {
        report,
        final_state: state,
    })
}

/// Runs the scenario on both engines and appends the deviation between
/// their final states. Fails with `E201` when it exceeds the tolerance.
pub fn cross_check(scenario: &Scenario) -> Result<Report, ScenarioError> {
    let oracle = execute(scenario, Engine::Oracle)?;
    let kernel = execute(scenario, Engine::Kernel)?;
    let deviation =
        max_deviation(&oracle.final_state, &kernel.final_state, false).expect("same register");
    let tolerance = scenario.options.tolerance;
    if deviation > tolerance {
        return Err(ScenarioError::OracleMismatch {
            deviation,
            tolerance,
        });
    }
    let mut report = oracle.report;
    report.push(
        Section::new("oracle check")
            .note("qubits", scenario.register().len().to_string())
            .note("max deviation", format_real(deviation))
            .note("tolerance", format_real(tolerance))
            .note("status", "agree"),
    );
    Ok(report)
}

/// The validated gate list an evolution step expands to.
fn plan(state: &PureState, step: &Step, tol: f64) -> crate::Result<Vec<GateOp>> {
    match step {
        Step::Gate(g) => Ok(vec![g.clone()]),
        Step::UncorrectedMeasure {
            signal,
            observer,
            environment,
        } => uncorrected_plan(state, signal, observer, environment),
        Step::CorrectedMeasure(spec) => corrected_plan(state, spec, tol),
        Step::IdealMeasure {
            signal,
            observer,
            basis,
        } => ideal_plan(state, signal, observer, *basis),
        _ => Ok(Vec::new()),
    }
}

fn decompose(state: &PureState, basis: &BasisMap) -> crate::Result<BranchSet> {
    branch_decompose(state, &basis.choice(state.register())?)
}

fn basis_string(set: &BranchSet) -> String {
    set.register()
        .labels()
        .iter()
        .zip(set.basis().as_slice())
        .map(|(l, b)| format!("{l}:{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn state_section(title: &str, state: &PureState, engine: Engine) -> Section {
    let set = state.branches();
    let mut section = Section::new(title)
        .note("register", state.register().to_string())
        .note("norm", format_real(state.norm_sqr().sqrt()));
    if engine == Engine::Oracle {
        section = section.note("engine", "oracle");
    }
    fill_branches(section, &set)
}

fn branch_section(title: String, set: &BranchSet) -> Section {
    fill_branches(Section::new(title).note("basis", basis_string(set)), set)
}

fn fill_branches(section: Section, set: &BranchSet) -> Section {
    let mut section = section
        .note("branches", set.len().to_string())
        .note("total probability", format_real(set.total_probability()))
        .columns(["outcome", "amplitude", "probability"]);
    for b in set.branches() {
        section.row(vec![
            b.outcome_string(),
            format_complex(b.amplitude),
            format_real(b.probability()),
        ]);
    }
    section
}

fn cluster_section(section: Section, d: &ClusterDecomposition) -> Section {
    let residual: Vec<&str> = d.residual.iter().map(Label::as_str).collect();
    let mut section = section
        .note("clusters", d.clusters.len().to_string())
        .note("total measure", d.total_measure().to_string())
        .note(
            "residual",
            if residual.is_empty() {
                "-".to_string()
            } else {
                residual.join(" ")
            },
        )
        .columns(["members", "c_up", "c_down", "flips", "measure"]);
    for c in &d.clusters {
        let members: Vec<&str> = c.members.iter().map(Label::as_str).collect();
        let flips = match &c.relabeling {
            Some(f) if c.is_relabeled() => f.iter().map(|&x| if x { '1' } else { '0' }).collect(),
            _ => "-".to_string(),
        };
        section.row(vec![
            members.join(" "),
            format_complex(c.coefficients[0]),
            format_complex(c.coefficients[1]),
            flips,
            c.measure().to_string(),
        ]);
    }
    section
}

fn agreement_section(
    title: String,
    set: &BranchSet,
    pairs: &[(String, String)],
) -> crate::Result<Section> {
    let report = agreement(set, pairs)?;
    let names: Vec<String> = report
        .pairs
        .iter()
        .map(|(a, b)| format!("{a}={b}"))
        .collect();
    let mut section = Section::new(title).note("basis", basis_string(set));
    for (k, name) in names.iter().enumerate() {
        section = section.note(
            name.clone(),
            format!(
                "agree {} disagree {}",
                format_real(report.aggregate[k]),
                format_real(report.disagreement[k])
            ),
        );
    }
    let mut section = section.columns(
        ["outcome".to_string(), "probability".to_string()]
            .into_iter()
            .chain(names),
    );
    for row in &report.rows {
        let mut cells = vec![row.outcome.clone(), format_real(row.probability)];
        cells.extend(
            row.agree
                .iter()
                .map(|&a| if a { "yes" } else { "no" }.to_string()),
        );
        section.row(cells);
    }
    Ok(section)
}

fn record_section(title: String, set: &BranchSet, records: &[String]) -> crate::Result<Section> {
    let inferred = recover_record(set, records)?;
    let consistent: f64 = set
        .branches()
        .iter()
        .zip(&inferred)
        .filter(|(_, r)| matches!(r, RecordInference::Consistent(_)))
        .map(|(b, _)| b.probability())
        .sum();
    let mut section = Section::new(title)
        .note("basis", basis_string(set))
        .note("records", records.join(" "))
        .note("consistent weight", format_real(consistent))
        .columns(["outcome", "probability", "record"]);
    for (b, r) in set.branches().iter().zip(&inferred) {
        section.row(vec![
            b.outcome_string(),
            format_real(b.probability()),
            r.to_string(),
        ]);
    }
    Ok(section)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{
        "subsystems": [
            {"label": "s", "amplitudes": [[0.6, 0], [0.8, 0]]},
            {"label": "o", "amplitudes": [[1, 0], [1, 0]]},
            {"label": "e", "amplitudes": [[1, 0], [0, 0]]}
        ],
        "script": [
            {"op": "imprint", "source": "s", "target": "e"},
            {"op": "swap", "a": "o", "b": "e"}
        ]
    }"#;

    #[test]
    fn minimal_document() {
        let sc = parse_scenario(r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0],[0,0]]}]}"#)
            .unwrap();
        assert!(sc.script.is_empty());
        let report = run(&sc).unwrap();
        assert_eq!(report.sections.len(), 1);
        assert_eq!(report.sections[0].title, "initial state");
    }

    #[test]
    fn fig1_parses_to_gate_steps() {
        let sc = parse_scenario(FIG1).unwrap();
        assert_eq!(
            sc.script,
            vec![
                Step::Gate(GateOp::imprint("s", "e")),
                Step::Gate(GateOp::swap("o", "e"))
            ]
        );
        assert_eq!(
            sc.register().to_string(),
            Register::new(["s", "o", "e"]).unwrap().to_string()
        );
    }

    #[test]
    fn error_codes() {
        let code = |t: &str| parse_scenario(t).unwrap_err().code();
        assert_eq!(code("{"), "E100");
        assert_eq!(code(r#"{"script": []}"#), "E101");
        assert_eq!(
            code(
                r#"{"subsystems":[{"label":"s","amplitudes":[[1,0],[0,0]]}],
                     "script":[{"op":"rotate_basis","target":"q"}]}"#
            ),
            "E102"
        );
        assert_eq!(
            code(
                r#"{"subsystems":[{"label":"s","amplitudes":[[1,0],[0,0]]},
                                   {"ghz":{"labels":["s","t"],"coefficients":[[1,0],[1,0]]}}]}"#
            ),
            "E103"
        );
        assert_eq!(
            code(r#"{"subsystems":[{"label":"s","amplitudes":[[0,0],[0,0]]}]}"#),
            "E104"
        );
        assert_eq!(
            code(r#"{"subsystems":[{"label":"s t","amplitudes":[[1,0],[0,0]]}]}"#),
            "E105"
        );
        assert_eq!(
            code(
                r#"{"subsystems":[{"label":"s","amplitudes":[[1,0],[0,0]]}],
                     "script":[{"op":"swap","a":"s","b":"s"}]}"#
            ),
            "E106"
        );
        assert_eq!(
            code(
                r#"{"subsystems":[{"label":"s","amplitudes":[[1,0],[0,0]]}],"options":{"tolerance":-1}}"#
            ),
            "E107"
        );
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_scenario("{\n  \"subsystems\": [,]\n}") {
            Err(ScenarioError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_failure_carries_index() {
        let sc = parse_scenario(
            r#"{"subsystems":[{"label":"s","amplitudes":[[1,0],[1,0]]},
                              {"label":"o","amplitudes":[[1,0],[1,0]]}],
                "script":[{"op":"find_clusters"},{"op":"ideal_measure","signal":"s","observer":"o"}]}"#,
        )
        .unwrap();
        let err = run(&sc).unwrap_err();
        assert_eq!(err.code(), "E200");
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(err, ScenarioError::StepFailed { step: 2, .. }));
    }

    #[test]
    fn oracle_engine_agrees() {
        let sc = parse_scenario(FIG1).unwrap();
        let report = cross_check(&sc).unwrap();
        assert_eq!(
            report.section("oracle check").unwrap().note_value("status"),
            Some("agree")
        );
    }
}
