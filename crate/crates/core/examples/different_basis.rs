//! Observers that measure in different bases stop agreeing.

use unimeas::prelude::*;
use unimeas::report::format_complex;

fn main() -> Result<()> {
    let r = 0.5f64.sqrt();
    for (name, psi) in [
        ("deterministic", (re(1.0), re(0.0))),
        ("balanced", (re(r), re(r))),
    ] {
        let out = run_scenario_different_basis(psi)?;
        let x = branch_decompose(&out, &BasisChoice::uniform(out.register(), Basis::X))?;
        println!("{name} signal, register {}:", out.register());
        for b in x.branches() {
            println!("  {}  {}", b.outcome_string(), format_complex(b.amplitude));
        }
        let a = agreement(&x, &[("o2", "o3'")])?;
        println!(
            "  o2 and o3' disagree with weight {:.3}",
            a.disagreement[0].abs()
        );
    }
    Ok(())
}
