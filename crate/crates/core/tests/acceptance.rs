use std::process::ExitCode;

use spgamma::suites::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!(
            "criterion {}: {} ({}, {} checks, {:.2} s)",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.checks,
            r.seconds
        );
        if let Some(c) = &r.first_counterexample {
            println!("    first counterexample: {c}");
        }
        if !r.detail.is_empty() {
            println!("    {}", r.detail);
        }
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
