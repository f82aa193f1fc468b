//! Extra copies of o1's result let later observers tell which record they hold.

use unimeas::prelude::*;
use unimeas::protocol::appendix_records;

fn main() -> Result<()> {
    let psi = (re(0.6), re(0.8));
    for m in 1..=3 {
        let out = run_scenario_appendix(psi, m)?;
        let records = appendix_records(m);
        let overrides: Vec<(&str, Basis)> =
            records.iter().map(|r| (r.as_str(), Basis::Z)).collect();
        let basis = BasisChoice::with_overrides(out.register(), Basis::X, &overrides)?;
        let set = branch_decompose(&out, &basis)?;
        let inferred = recover_record(&set, &records)?;
        println!("{m} record(s), register {}:", out.register());
        for (b, inf) in set.branches().iter().zip(&inferred) {
            println!(
                "  {}  p = {:.4}  record {inf}",
                b.outcome_string(),
                b.probability()
            );
        }
    }
    Ok(())
}
