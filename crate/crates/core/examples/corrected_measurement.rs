//! Corrected measurement with a GHZ environment, and the ledger before and after.

use unimeas::analysis::CorrelationLedger;
use unimeas::prelude::*;

fn main() -> Result<()> {
    let n = 4;
    let env: Vec<String> = (1..=n).map(|k| format!("e{k}")).collect();
    let s = product_state(Register::new(["s"])?, &[(re(0.6), re(0.8))])?;
    let o = product_state(
        Register::new(["o"])?,
        &[(re(0.28), Amplitude::new(0.0, 0.96))],
    )?;
    let start = tensor(&tensor(&s, &o)?, &make_ghz(&env, (re(0.8), re(0.6)))?)?;

    let spec = MeasurementSpec::new("s", "o", &env);
    let out = corrected_measure(&start, &spec)?;

    let ledger = ledger_record(&CorrelationLedger::default(), &start, "before")?;
    let ledger = ledger_record(&ledger, &out, "after")?;
    for entry in ledger.entries() {
        println!(
            "{}: total {}",
            entry.tag,
            entry.decomposition.total_measure()
        );
        for c in &entry.decomposition.clusters {
            let members: Vec<&str> = c.members.iter().map(Label::as_str).collect();
            println!("  {:?} measure {}", members, cluster_measure(c));
        }
    }
    Ok(())
}
