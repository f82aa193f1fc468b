//! Dense reference implementation of the gate set.
//!
//! Every gate is written as a sum of Kronecker products of single-qubit
//! operators over the whole register and applied as an explicit
//! `2^n × 2^n` matrix. This is deliberately naive and shares no code with the
//! index-pair kernels in [`crate::gates`]:
//!
//! ```text
//! imprint a→b   = P↑_a ⊗ 1 + P↓_a ⊗ X_b
//! inverse       = (imprint a→b)†
//! swap a↔b      = ½ (1 + X_a X_b + Y_a Y_b + Z_a Z_b)
//! rotate t      = H_t
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::statevec::{PureState, Register};

/// Largest register the oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 12;

type Mat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(rows: [[Complex64; 2]; 2]) -> Mat {
    Mat::from_fn(2, 2, |r, col| rows[r][col])
}

fn identity2() -> Mat {
    Mat::identity(2, 2)
}

fn pauli_x() -> Mat {
    mat2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

fn pauli_y() -> Mat {
    mat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

fn pauli_z() -> Mat {
    mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

fn proj_up() -> Mat {
    mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])
}

fn proj_down() -> Mat {
    mat2([[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
}

fn hadamard() -> Mat {
    let r = 0.5f64.sqrt();
    mat2([[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]])
}

/// `⊗_p ops[p]` over all `n` positions, identity where none is given.
/// Position 0 is the leftmost factor.
fn embed(n: usize, ops: &[(usize, Mat)]) -> Mat {
    let mut acc = Mat::identity(1, 1);
    for p in 0..n {
        let factor = ops
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(identity2);
        acc = acc.kronecker(&factor);
    }
    acc
}

fn operand(register: &Register, label: &str) -> Result<usize> {
    register.position(label)
}

fn operand_pair(register: &Register, a: &str, b: &str) -> Result<(usize, usize)> {
    if a == b {
        return Err(Error::SameOperand(a.to_string()));
    }
    Ok((operand(register, a)?, operand(register, b)?))
}

fn check_size(register: &Register) -> Result<usize> {
    let n = register.len();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleTooLarge {
            qubits: n,
            cap: ORACLE_MAX_QUBITS,
        });
    }
    Ok(n)
}

/// Full-register matrix of one gate.
pub fn gate_matrix(register: &Register, gate: &GateOp) -> Result<Mat> {
    let n = check_size(register)?;
    Ok(match gate {
        GateOp::Imprint { source, target } => {
            let (a, b) = operand_pair(register, source.as_str(), target.as_str())?;
            embed(n, &[(a, proj_up())]) + embed(n, &[(a, proj_down()), (b, pauli_x())])
        }
        GateOp::InverseImprint { source, target } => {
            let forward = GateOp::Imprint {
                source: source.clone(),
                target: target.clone(),
            };
            gate_matrix(register, &forward)?.adjoint()
        }
        GateOp::Swap { a, b } => {
            let (a, b) = operand_pair(register, a.as_str(), b.as_str())?;
            let sum = embed(n, &[])
                + embed(n, &[(a, pauli_x()), (b, pauli_x())])
                + embed(n, &[(a, pauli_y()), (b, pauli_y())])
                + embed(n, &[(a, pauli_z()), (b, pauli_z())]);
            sum * c(0.5, 0.0)
        }
        GateOp::RotateBasis { target } => {
            let t = operand(register, target.as_str())?;
            embed(n, &[(t, hadamard())])
        }
    })
}

/// Product of the gate matrices; the first gate of `script` acts first.
pub fn script_matrix(register: &Register, script: &[GateOp]) -> Result<Mat> {
    let n = check_size(register)?;
    let mut total = Mat::identity(1 << n, 1 << n);
    for gate in script {
        total = gate_matrix(register, gate)? * total;
    }
    Ok(total)
}

/// Applies `script` by explicit matrix–vector products.
pub fn oracle_apply(state: &PureState, script: &[GateOp]) -> Result<PureState> {
    let register = state.register();
    check_size(register)?;
    let mut v = DVector::from_column_slice(state.amplitudes());
    for gate in script {
        v = gate_matrix(register, gate)? * v;
    }
    PureState::from_amplitudes(register.clone(), v.iter().copied().collect())
}

/// `matrix · state` for a matrix from [`script_matrix`] or [`gate_matrix`].
pub fn apply_matrix(matrix: &Mat, state: &PureState) -> Result<PureState> {
    if matrix.ncols() != state.dim() {
        return Err(Error::LengthMismatch {
            expected: state.dim(),
            found: matrix.ncols(),
        });
    }
    let v = matrix * DVector::from_column_slice(state.amplitudes());
    PureState::from_amplitudes(state.register().clone(), v.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(n: usize) -> Register {
        Register::new((0..n).map(|i| format!("q{i}"))).unwrap()
    }

    #[test]
    fn swap_on_two_qubits_is_permutation_matrix() {
        let m = gate_matrix(&reg(2), &GateOp::swap("q0", "q1")).unwrap();
        let perm = [0usize, 2, 1, 3];
        for r in 0..4 {
            for col in 0..4 {
                let want = if perm[col] == r { 1.0 } else { 0.0 };
                assert!((m[(r, col)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn imprint_matrix_follows_down_control() {
        let m = gate_matrix(&reg(2), &GateOp::imprint("q0", "q1")).unwrap();
        let perm = [0usize, 1, 3, 2];
        for col in 0..4 {
            assert_eq!(m[(perm[col], col)], c(1.0, 0.0));
        }
    }

    #[test]
    fn identity_script_returns_input() {
        let st = PureState::from_amplitudes(
            reg(2),
            vec![c(0.1, 0.2), c(0.3, -0.4), c(0.5, 0.0), c(0.0, 0.6)],
        )
        .unwrap();
        assert_eq!(oracle_apply(&st, &[]).unwrap(), st);
    }

    #[test]
    fn size_cap() {
        let st = PureState::basis(reg(13), 0).unwrap();
        assert_eq!(
            oracle_apply(&st, &[]),
            Err(Error::OracleTooLarge {
                qubits: 13,
                cap: 12
            })
        );
    }

    #[test]
    fn operand_errors() {
        assert_eq!(
            gate_matrix(&reg(2), &GateOp::swap("q0", "q0")),
            Err(Error::SameOperand("q0".into()))
        );
        assert_eq!(
            gate_matrix(&reg(2), &GateOp::rotate_basis("zz")),
            Err(Error::UnknownLabel("zz".into()))
        );
    }
}
