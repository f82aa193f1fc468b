//! Truth tables of the imprint and swap gates on two qubits.

use unimeas::prelude::*;

fn main() -> Result<()> {
    let reg = Register::new(["a", "b"])?;
    println!("in   imprint a→b   swap a↔b");
    for idx in 0..reg.dim() {
        let input = PureState::basis(reg.clone(), idx)?;
        let ket = |st: &PureState| st.branches().branches()[0].outcome_string();
        println!(
            "{}   {}            {}",
            ket(&input),
            ket(&imprint(&input, "a", "b")?),
            ket(&swap(&input, "a", "b")?)
        );
    }

    // Rotating both qubits turns the imprint around.
    let plus = product_state(reg, &[(re(1.0), re(1.0)), (re(1.0), re(0.0))])?;
    let turned = apply_script(
        &plus,
        &[
            GateOp::rotate_basis("a"),
            GateOp::rotate_basis("b"),
            GateOp::imprint("a", "b"),
            GateOp::rotate_basis("a"),
            GateOp::rotate_basis("b"),
        ],
    )?;
    let direct = imprint(&plus, "b", "a")?;
    println!(
        "rotated imprint a→b equals imprint b→a: {}",
        approx_eq(&turned, &direct, 1e-12, false)?
    );
    Ok(())
}
