//! Runs a verification suite and prints one row per check.
//!
//! cargo run --release --example verify_suite [-- path/to/suite.json]

use std::time::Instant;

use gmlab::verify::{exit_code, run_suite, to_csv, SuiteConfig};

fn main() -> gmlab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/suite_ci.json").to_string());
    let config = SuiteConfig::load(&path)?;
    let start = Instant::now();
    let reports = run_suite(&config)?;
    print!("{}", to_csv(&reports));
    for r in &reports {
        if let Some(f) = &r.witness.function {
            println!("{}: attained by {f}", r.check_id);
        }
        for h in r.hypotheses.iter().filter(|h| !h.holds) {
            println!("{}: hypothesis {} fails ({})", r.check_id, h.name, h.detail);
        }
        for e in &r.exact_failures {
            println!("{}: {e}", r.check_id);
        }
    }
    println!("exit code {} after {:.1} s", exit_code(&reports, false), start.elapsed().as_secs_f64());
    Ok(())
}
