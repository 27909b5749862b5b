//! A seeded batch from a JSON config, written as CSV and JSON.
//!
//! cargo run --example experiment_batch -- crates/core/examples/configs/tfim.json

use dyncool::experiment::{emit, run_experiment, ExperimentConfig, OutputFormat};

fn main() -> dyncool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/tfim.json").into());
    let cfg = ExperimentConfig::load(path.as_ref())?;
    let record = run_experiment(&cfg)?;
    println!("config hash {}, {} trials, success fraction {:.3}", record.config_hash, record.trials.len(), record.success_fraction());
    for t in record.trials.iter().take(5) {
        let last = t.steps.last().map_or(t.initial_energy, |s| s.true_energy);
        println!("trial {}: energy {:+.4} -> {:+.4}, leakage events {}", t.trial, t.initial_energy, last, t.leakage_events);
    }
    let dir = std::env::temp_dir().join("dyncool-example");
    for format in [OutputFormat::Csv, OutputFormat::Structured] {
        println!("wrote {}", emit(&record, format, &dir)?.display());
    }
    Ok(())
}
