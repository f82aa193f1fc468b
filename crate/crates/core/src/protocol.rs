//! Measurement procedures assembled from the local gates.
//!
//! Each procedure has a `*_script` builder returning the exact gate list it
//! runs, so the dense oracle can replay it independently.

use crate::analysis::{ghz_factor, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::gates::{apply_script, GateOp};
use crate::statevec::{product_state, re, Amplitude, Basis, PureState, Register};

/// Readiness tolerance of an observer before an ideal measurement.
pub const READY_TOLERANCE: f64 = 1e-9;

/// Roles of the subsystems taking part in a corrected measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementSpec {
    pub signal: String,
    pub observer: String,
    /// `e1 … eN`; `e1` is corrected and used for the imprint, `e2` holds the
    /// redundant copy, `eN` receives the observer's prior state.
    pub environment: Vec<String>,
    pub basis: Basis,
}

impl MeasurementSpec {
    pub fn new<S: AsRef<str>>(signal: &str, observer: &str, environment: &[S]) -> Self {
        MeasurementSpec {
            signal: signal.to_string(),
            observer: observer.to_string(),
            environment: environment.iter().map(|e| e.as_ref().to_string()).collect(),
            basis: Basis::Z,
        }
    }

    pub fn in_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    fn check_distinct(&self) -> Result<()> {
        let mut seen: Vec<&str> = vec![&self.signal, &self.observer];
        if self.signal == self.observer {
            return Err(Error::SameOperand(self.signal.clone()));
        }
        for e in &self.environment {
            if seen.contains(&e.as_str()) {
                return Err(Error::SameOperand(e.clone()));
            }
            seen.push(e);
        }
        Ok(())
    }
}

fn distinct(labels: &[&str]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::SameOperand(l.to_string()));
        }
    }
    Ok(())
}

fn require_present(state: &PureState, labels: &[&str]) -> Result<()> {
    for l in labels {
        state.register().position(l)?;
    }
    Ok(())
}

/// `[Imprint(s, e), Swap(o, e)]`.
pub fn uncorrected_script(s: &str, o: &str, e: &str) -> Vec<GateOp> {
    vec![GateOp::imprint(s, e), GateOp::swap(o, e)]
}

/// The signal imprints on the environment, which then trades places with the
/// observer.
///
/// For `|ψ⟩_s |φ⟩_o (χ↑|↑⟩ + χ↓|↓⟩)_e` the result is
/// `(χ↑ |Ψ⟩_so + χ↓ |Ψ̄⟩_so) |φ⟩_e`, with `|Ψ⟩ = ψ↑|↑↑⟩ + ψ↓|↓↓⟩` and the
/// anticorrelated `|Ψ̄⟩ = ψ↑|↑↓⟩ + ψ↓|↓↑⟩`.
pub fn uncorrected_measure(state: &PureState, s: &str, o: &str, e: &str) -> Result<PureState> {
    apply_script(state, &uncorrected_plan(state, s, o, e)?)
}

/// Validates the roles against `state` and returns the gate list.
pub fn uncorrected_plan(state: &PureState, s: &str, o: &str, e: &str) -> Result<Vec<GateOp>> {
    distinct(&[s, o, e])?;
    require_present(state, &[s, o, e])?;
    Ok(uncorrected_script(s, o, e))
}

/// Gate list of [`corrected_measure`]; validates the roles but not the state.
pub fn corrected_script(spec: &MeasurementSpec) -> Result<Vec<GateOp>> {
    spec.check_distinct()?;
    let env = &spec.environment;
    if env.len() < 2 {
        return Err(Error::EnvironmentTooSmall(env.len()));
    }
    let (s, o) = (spec.signal.as_str(), spec.observer.as_str());
    let (e1, e2, last) = (
        env[0].as_str(),
        env[1].as_str(),
        env[env.len() - 1].as_str(),
    );
    let core = [
        GateOp::swap(o, last),
        GateOp::inverse_imprint(e2, e1),
        GateOp::imprint(s, e1),
        GateOp::swap(o, e1),
    ];
    Ok(match spec.basis {
        Basis::Z => core.to_vec(),
        Basis::X => {
            let rotations: Vec<GateOp> = [s, o]
                .into_iter()
                .chain(env.iter().map(String::as_str))
                .map(GateOp::rotate_basis)
                .collect();
            let mut script = rotations.clone();
            script.extend(core);
            script.extend(rotations);
            script
        }
    })
}

/// Checks that `spec.environment` is a GHZ-shaped factor of `state` in the
/// spec's basis.
pub fn check_environment(state: &PureState, spec: &MeasurementSpec, tol: f64) -> Result<()> {
    let rotated;
    let view = match spec.basis {
        Basis::Z => state,
        Basis::X => {
            let rotations: Vec<GateOp> = spec
                .environment
                .iter()
                .map(|e| GateOp::rotate_basis(e))
                .collect();
            rotated = apply_script(state, &rotations)?;
            &rotated
        }
    };
    match ghz_factor(view, &spec.environment, tol, false)? {
        Some(_) => Ok(()),
        None => Err(Error::NotGhz {
            labels: spec.environment.clone(),
        }),
    }
}

/// Measurement corrected by a GHZ environment.
///
/// Runs `[Swap(o, eN), InverseImprint(e2, e1), Imprint(s, e1), Swap(o, e1)]`.
/// On `(Σ_i ψ_i|i⟩_s) |φ⟩_o (Σ_k χ_k |k…k⟩_e)` the output is
/// `(Σ_i ψ_i |ii⟩_so) ⊗ (Σ_k χ_k |k…k⟩ on e1…e_{N−1}) ⊗ |φ⟩_{eN}`.
///
/// The environment must be a GHZ-shaped tensor factor of the input over
/// exactly the listed labels. With two environment qubits the redundant copy
/// and the dump slot coincide and the output no longer factorizes.
pub fn corrected_measure(state: &PureState, spec: &MeasurementSpec) -> Result<PureState> {
    apply_script(state, &corrected_plan(state, spec, DEFAULT_TOLERANCE)?)
}

/// Checks roles and the environment precondition (to `tol`) and returns the
/// gate list of [`corrected_measure`].
pub fn corrected_plan(state: &PureState, spec: &MeasurementSpec, tol: f64) -> Result<Vec<GateOp>> {
    let script = corrected_script(spec)?;
    let mut labels: Vec<&str> = vec![&spec.signal, &spec.observer];
    labels.extend(spec.environment.iter().map(String::as_str));
    require_present(state, &labels)?;
    check_environment(state, spec, tol)?;
    Ok(script)
}

/// Gate list of [`ideal_measure`].
pub fn ideal_script(s: &str, o: &str, basis: Basis) -> Vec<GateOp> {
    match basis {
        Basis::Z => vec![GateOp::imprint(s, o)],
        Basis::X => vec![
            GateOp::rotate_basis(s),
            GateOp::rotate_basis(o),
            GateOp::imprint(s, o),
            GateOp::rotate_basis(s),
            GateOp::rotate_basis(o),
        ],
    }
}

/// Max-norm distance of the observer's reduced state from `|↑⟩⟨↑|` (Z) or
/// `|→⟩⟨→|` (X).
pub fn readiness_deviation(state: &PureState, observer: &str, basis: Basis) -> Result<f64> {
    let rho = state.reduced_density(observer)?;
    let target = match basis {
        Basis::Z => [[1.0, 0.0], [0.0, 0.0]],
        Basis::X => [[0.5, 0.5], [0.5, 0.5]],
    };
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((rho[i][j] - target[i][j]).norm());
        }
    }
    Ok(worst)
}

/// Idealized measurement by an observer already corrected into the ready
/// state: a plain imprint in the chosen basis, environment suppressed.
pub fn ideal_measure(state: &PureState, s: &str, o: &str, basis: Basis) -> Result<PureState> {
    apply_script(state, &ideal_plan(state, s, o, basis)?)
}

/// Checks the observer's readiness and returns the gate list of
/// [`ideal_measure`].
pub fn ideal_plan(state: &PureState, s: &str, o: &str, basis: Basis) -> Result<Vec<GateOp>> {
    distinct(&[s, o])?;
    require_present(state, &[s, o])?;
    let deviation = readiness_deviation(state, o, basis)?;
    if deviation.is_nan() || deviation > READY_TOLERANCE {
        return Err(Error::ObserverNotReady {
            label: o.to_string(),
            basis: basis.as_char(),
            deviation,
        });
    }
    Ok(ideal_script(s, o, basis))
}

/// Each observer in turn measures the signal; in Z this yields
/// `Σ_i ψ_i |i⟩_s |i⟩_{o1} |i⟩_{o2} …`.
pub fn sequential_ideal_measurements<S: AsRef<str>>(
    state: &PureState,
    signal: &str,
    observers: &[S],
    basis: Basis,
) -> Result<PureState> {
    observers.iter().try_fold(state.clone(), |st, o| {
        ideal_measure(&st, signal, o.as_ref(), basis)
    })
}

const SIGNAL: &str = "s";
const FIRST: &str = "o1";
const SECOND: &str = "o2";
const THIRD: &str = "o3'";

fn record_label(j: usize) -> String {
    format!("^{j}o1")
}

fn ready(basis: Basis) -> (Amplitude, Amplitude) {
    match basis {
        Basis::Z => (re(1.0), re(0.0)),
        Basis::X => (re(1.0), re(1.0)),
    }
}

fn check_signal(psi: (Amplitude, Amplitude)) -> Result<()> {
    if psi.0.norm_sqr() + psi.1.norm_sqr() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// Registers `s, o1, o2, o3'`: o1 measures s in Z, then o2 measures s and
/// o3' measures o1, both in X.
///
/// In the X basis the final state is
/// `½[(ψ↑+ψ↓)|→→→→⟩ + (ψ↑−ψ↓)|→←→←⟩ + (ψ↑−ψ↓)|←→←→⟩ + (ψ↑+ψ↓)|←←←←⟩]`
/// in register order, so o2 and o3' disagree with weight `|ψ↑−ψ↓|²/2`.
pub fn run_scenario_different_basis(psi: (Amplitude, Amplitude)) -> Result<PureState> {
    check_signal(psi)?;
    let reg = Register::new([SIGNAL, FIRST, SECOND, THIRD])?;
    let start = product_state(
        reg,
        &[psi, ready(Basis::Z), ready(Basis::X), ready(Basis::X)],
    )?;
    let st = ideal_measure(&start, SIGNAL, FIRST, Basis::Z)?;
    let st = ideal_measure(&st, SIGNAL, SECOND, Basis::X)?;
    ideal_measure(&st, FIRST, THIRD, Basis::X)
}

/// Labels of the redundant records of o1 used by [`run_scenario_appendix`].
pub fn appendix_records(record_count: usize) -> Vec<String> {
    (1..=record_count).map(record_label).collect()
}

/// Like [`run_scenario_different_basis`], but o1's record is first copied in
/// Z onto `^1o1 … ^mo1`, appended to the register after `o3'`.
pub fn run_scenario_appendix(
    psi: (Amplitude, Amplitude),
    record_count: usize,
) -> Result<PureState> {
    check_signal(psi)?;
    if record_count < 1 {
        return Err(Error::NoRecords);
    }
    let records = appendix_records(record_count);
    let mut labels = vec![
        SIGNAL.to_string(),
        FIRST.into(),
        SECOND.into(),
        THIRD.into(),
    ];
    labels.extend(records.iter().cloned());
    let reg = Register::new(&labels)?;
    let mut init = vec![psi, ready(Basis::Z), ready(Basis::X), ready(Basis::X)];
    init.extend(std::iter::repeat_n(ready(Basis::Z), record_count));
    let start = product_state(reg, &init)?;
    let st = ideal_measure(&start, SIGNAL, FIRST, Basis::Z)?;
    let st = sequential_ideal_measurements(&st, FIRST, &records, Basis::Z)?;
    let st = ideal_measure(&st, SIGNAL, SECOND, Basis::X)?;
    ideal_measure(&st, FIRST, THIRD, Basis::X)
}
