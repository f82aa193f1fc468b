//! Local unitaries on labeled subsystems.
//!
//! The imprint is a CNOT whose control fires on `↓`:
//!
//! ```text
//! |↑↑⟩ → |↑↑⟩    |↑↓⟩ → |↑↓⟩    |↓↑⟩ → |↓↓⟩    |↓↓⟩ → |↓↑⟩
//! ```
//!
//! It is its own inverse on qubits, so [`inverse_imprint`] applies the same
//! permutation. The swap exchanges two subsystems and is basis independent;
//! the imprint is not.
//!
//! Scripts run in list order: `[Imprint(s, e), Swap(o, e)]` is the
//! composition `Swap ∘ Imprint`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel;
use crate::statevec::{Label, PureState};

/// Deviation from `u†u = I` accepted by [`apply_single`].
pub const UNITARY_TOLERANCE: f64 = 1e-9;

/// Hadamard-type basis change `|↑⟩ → |→⟩`, `|↓⟩ → |←⟩`; self-inverse.
pub const ROTATE_BASIS: [[Complex64; 2]; 2] = {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
    ]
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateOp {
    Imprint { source: Label, target: Label },
    InverseImprint { source: Label, target: Label },
    Swap { a: Label, b: Label },
    RotateBasis { target: Label },
}

// Gate constructors skip label validation: a malformed name can never be in a
// register, so it surfaces as `UnknownLabel` when the gate is applied.
fn lbl(s: &str) -> Label {
    Label::new(s).unwrap_or_else(|_| Label::unvalidated(s))
}

impl GateOp {
    pub fn imprint(source: &str, target: &str) -> Self {
        GateOp::Imprint {
            source: lbl(source),
            target: lbl(target),
        }
    }

    pub fn inverse_imprint(source: &str, target: &str) -> Self {
        GateOp::InverseImprint {
            source: lbl(source),
            target: lbl(target),
        }
    }

    pub fn swap(a: &str, b: &str) -> Self {
        GateOp::Swap {
            a: lbl(a),
            b: lbl(b),
        }
    }

    pub fn rotate_basis(target: &str) -> Self {
        GateOp::RotateBasis {
            target: lbl(target),
        }
    }

    pub fn operands(&self) -> Vec<&Label> {
        match self {
            GateOp::Imprint { source, target } | GateOp::InverseImprint { source, target } => {
                vec![source, target]
            }
            GateOp::Swap { a, b } => vec![a, b],
            GateOp::RotateBasis { target } => vec![target],
        }
    }

    pub fn inverse(&self) -> GateOp {
        match self.clone() {
            GateOp::Imprint { source, target } => GateOp::InverseImprint { source, target },
            GateOp::InverseImprint { source, target } => GateOp::Imprint { source, target },
            other => other,
        }
    }

    /// Whether the gate maps computational basis states to basis states.
    pub fn is_permutation(&self) -> bool {
        !matches!(self, GateOp::RotateBasis { .. })
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Imprint { source, target } => write!(f, "imprint {source}→{target}"),
            GateOp::InverseImprint { source, target } => {
                write!(f, "inverse_imprint {source}→{target}")
            }
            GateOp::Swap { a, b } => write!(f, "swap {a}↔{b}"),
            GateOp::RotateBasis { target } => write!(f, "rotate_basis {target}"),
        }
    }
}

/// The reversed script of inverses; undoes `script`.
pub fn invert_script(script: &[GateOp]) -> Vec<GateOp> {
    script.iter().rev().map(GateOp::inverse).collect()
}

enum Resolved {
    Cnot(usize, usize),
    Swap(usize, usize),
    Rotate(usize),
}

fn resolve(state: &PureState, gate: &GateOp) -> Result<Resolved> {
    let reg = state.register();
    let pair = |a: &Label, b: &Label| -> Result<(usize, usize)> {
        if a == b {
            return Err(Error::SameOperand(a.to_string()));
        }
        Ok((reg.bit(a.as_str())?, reg.bit(b.as_str())?))
    };
    Ok(match gate {
        GateOp::Imprint { source, target } | GateOp::InverseImprint { source, target } => {
            let (c, t) = pair(source, target)?;
            Resolved::Cnot(c, t)
        }
        GateOp::Swap { a, b } => {
            let (x, y) = pair(a, b)?;
            Resolved::Swap(x, y)
        }
        GateOp::RotateBasis { target } => Resolved::Rotate(reg.bit(target.as_str())?),
    })
}

/// Checks that `gate` can act on `state` without applying it.
pub fn validate(state: &PureState, gate: &GateOp) -> Result<()> {
    resolve(state, gate).map(|_| ())
}

/// Applies `gate` to an owned state. On error the state is untouched.
pub fn apply_gate_in_place(state: &mut PureState, gate: &GateOp) -> Result<()> {
    let op = resolve(state, gate)?;
    let amps = state.amplitudes_mut();
    match op {
        Resolved::Cnot(c, t) => kernel::controlled_not(amps, c, t),
        Resolved::Swap(a, b) => kernel::swap_bits(amps, a, b),
        Resolved::Rotate(t) => kernel::hadamard(amps, t),
    }
    Ok(())
}

fn apply_one(state: &PureState, gate: GateOp) -> Result<PureState> {
    validate(state, &gate)?;
    let mut out = state.clone();
    apply_gate_in_place(&mut out, &gate)?;
    Ok(out)
}

pub fn imprint(state: &PureState, source: &str, target: &str) -> Result<PureState> {
    apply_one(state, GateOp::imprint(source, target))
}

pub fn inverse_imprint(state: &PureState, source: &str, target: &str) -> Result<PureState> {
    apply_one(state, GateOp::inverse_imprint(source, target))
}

pub fn swap(state: &PureState, a: &str, b: &str) -> Result<PureState> {
    apply_one(state, GateOp::swap(a, b))
}

pub fn rotate_basis(state: &PureState, target: &str) -> Result<PureState> {
    apply_one(state, GateOp::rotate_basis(target))
}

/// Max-norm deviation of `u†u` from the identity.
pub fn unitarity_deviation(u: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in u {
                acc += row[i].conj() * row[j];
            }
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - id).norm());
        }
    }
    worst
}

/// Applies an arbitrary single-qubit unitary (row-major) on `target`.
pub fn apply_single(state: &PureState, target: &str, u: &[[Complex64; 2]; 2]) -> Result<PureState> {
    let deviation = unitarity_deviation(u);
    if deviation.is_nan() || deviation > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary { deviation });
    }
    let bit = state.register().bit(target)?;
    let mut out = state.clone();
    kernel::single_qubit(out.amplitudes_mut(), bit, u);
    Ok(out)
}

/// Runs `script` left to right. Every gate is validated before any is applied.
pub fn apply_script(state: &PureState, script: &[GateOp]) -> Result<PureState> {
    for gate in script {
        validate(state, gate)?;
    }
    let mut out = state.clone();
    for gate in script {
        apply_gate_in_place(&mut out, gate)?;
    }
    Ok(out)
}
