//! Run a scenario file through the library and print its report.
//!
//! `cargo run --example scenario_file -- scenarios/corrected_n3.json`

use unimeas::scenario::{cross_check, parse_scenario};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/corrected_n3.json").into()
    });
    let text = std::fs::read_to_string(&path).expect("readable scenario");
    match parse_scenario(&text).and_then(|s| cross_check(&s)) {
        Ok(report) => print!("{}", report.to_text()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
