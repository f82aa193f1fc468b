//! Three observers measure the same signal one after another.

use unimeas::prelude::*;

fn main() -> Result<()> {
    let reg = Register::new(["s", "o1", "o2", "o3"])?;
    let ready = (re(1.0), re(0.0));
    let start = product_state(reg, &[(re(0.6), re(0.8)), ready, ready, ready])?;
    let out = sequential_ideal_measurements(&start, "s", &["o1", "o2", "o3"], Basis::Z)?;

    for b in out.branches().branches() {
        println!("{}  p = {:.2}", b.outcome_string(), b.probability());
    }
    let d = find_clusters(&out, DEFAULT_TOLERANCE, true);
    println!(
        "clusters {:?}, total measure {}",
        d.member_sets(),
        d.total_measure()
    );

    let pairs = [("o1", "o2"), ("o2", "o3"), ("o1", "o3")];
    let a = agreement(&out.branches(), &pairs)?;
    for ((x, y), w) in pairs.iter().zip(&a.aggregate) {
        println!("{x} and {y} agree with weight {w:.2}");
    }
    Ok(())
}
