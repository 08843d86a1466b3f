//! The acceptance suite: one verdict line per criterion, nonzero exit on
//! any failure.

use std::process::ExitCode;
use toricfib_cli::data::{default_dir, Fixtures};
use toricfib_cli::reproduce::{run_one, Context, CRITERIA};

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let ctx = Context::new(Fixtures::load(&default_dir()).expect("bundled fixtures"), 128, 2016);
    assert_eq!(CRITERIA.len(), 17);
    let mut failed = Vec::new();
    println!("\nacceptance criteria");
    for c in CRITERIA {
        let r = run_one(&ctx, c);
        println!("{}", r.line());
        if !r.passed {
            if let Some(e) = &r.error {
                println!("     error: {e}");
            }
            for x in r.checks.iter().filter(|x| !x.ok) {
                println!("     {}: {}", x.label, x.detail);
            }
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed\n", CRITERIA.len(), CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}\n", failed.join(", "));
        ExitCode::FAILURE
    }
}
