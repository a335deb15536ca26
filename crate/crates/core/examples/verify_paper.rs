//! Runs the full reproduction of the fold example and prints one line per check.

use mageo::verify::{run_all, VerifyOptions};

pub fn run() -> bool {
    let report = run_all(&VerifyOptions::default());
    for c in &report.criteria {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {}: {}", c.id, c.name, c.detail);
    }
    report.passed
}

#[allow(dead_code)]
fn main() {
    if !run() {
        std::process::exit(1);
    }
}
