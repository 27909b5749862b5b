//! The full certification suite, one summary line per claim.
//!
//! cargo run --release --example certification_suite -- 200

use dyncool::certify::{run_suite, summarize, SuiteConfig};

fn main() -> dyncool::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0);
    let records = run_suite(&SuiteConfig {
        trajectory_trials: trials,
        ..SuiteConfig::default()
    })?;
    for r in summarize(&records) {
        println!(
            "{} {:<28} measured {:.4e}  bound {:.4e}  slack {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.claim,
            r.measured,
            r.bound,
            r.slack
        );
    }
    Ok(())
}
