//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any failure.

use std::process::ExitCode;

use stqrf::acceptance::{run_acceptance_with, DEFAULT_SEED};

fn main() -> ExitCode {
    let pool = stqrf::thread_pool().expect("thread pool");
    let report =
        pool.install(|| run_acceptance_with(DEFAULT_SEED, |c| println!("{}", c.summary())));
    let failed = report.criteria.iter().filter(|c| !c.pass).count();
    println!(
        "acceptance: {} passed, {} failed",
        report.criteria.len() - failed,
        failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
