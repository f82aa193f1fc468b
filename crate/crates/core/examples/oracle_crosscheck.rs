//! Compare the fast kernels with the dense matrix reference on a random script.

use unimeas::gates::apply_script;
use unimeas::oracle::{oracle_apply, script_matrix};
use unimeas::prelude::*;

fn main() -> Result<()> {
    let labels = ["a", "b", "c", "d", "e"];
    let reg = Register::new(labels)?;
    let amps: Vec<Amplitude> = (0..reg.dim())
        .map(|i| Amplitude::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let start = PureState::from_amplitudes(reg.clone(), amps.iter().map(|a| a / norm).collect())?;

    let script = vec![
        GateOp::imprint("a", "c"),
        GateOp::swap("b", "e"),
        GateOp::rotate_basis("d"),
        GateOp::inverse_imprint("d", "a"),
        GateOp::imprint("e", "b"),
        GateOp::rotate_basis("a"),
    ];
    let fast = apply_script(&start, &script)?;
    let dense = oracle_apply(&start, &script)?;
    println!("max deviation {:.2e}", max_deviation(&fast, &dense, false)?);

    let u = script_matrix(&reg, &script)?;
    let gram = u.adjoint() * &u;
    let off = (gram - nalgebra::DMatrix::identity(reg.dim(), reg.dim())).norm();
    println!("‖U†U − 1‖ = {off:.2e}");
    Ok(())
}
