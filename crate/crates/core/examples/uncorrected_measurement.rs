//! A measurement without environmental help and why it goes wrong.

use unimeas::prelude::*;
use unimeas::report::format_complex;

fn show(title: &str, state: &PureState) {
    println!("{title}");
    for b in state.branches().branches() {
        println!("  {}  {}", b.outcome_string(), format_complex(b.amplitude));
    }
}

fn main() -> Result<()> {
    let reg = Register::new(["s", "o", "e"])?;
    let psi = (re(0.6), re(0.8));
    let phi = (re(0.28), Amplitude::new(0.0, 0.96));

    for (name, chi) in [
        ("up", (re(1.0), re(0.0))),
        ("superposed", (re(0.8), re(0.6))),
    ] {
        let start = product_state(reg.clone(), &[psi, phi, chi])?;
        let out = uncorrected_measure(&start, "s", "o", "e")?;
        show(&format!("environment {name}:"), &out);
        let d = find_clusters(&out, DEFAULT_TOLERANCE, true);
        let residual: Vec<&str> = d.residual.iter().map(Label::as_str).collect();
        println!("  clusters {:?}, residual {residual:?}", d.member_sets());
        let a = agreement(&out.branches(), &[("s", "o")])?;
        println!("  s and o agree with weight {:.4}", a.aggregate[0]);
    }
    Ok(())
}
