//! One PASS/FAIL line per acceptance criterion, full level.
//!
//! Failing items are listed under their criterion. The process exits nonzero when a
//! criterion fails for any reason other than the documented discrepancies (see README),
//! which are still reported as FAIL.

use std::process::ExitCode;

use tautodensity::verify::{self, Level};

fn main() -> ExitCode {
    let checks = verify::run_all(Level::Full, None);
    let mut unexpected = false;
    for c in &checks {
        println!("{}", c.line());
        for item in c.items.iter().filter(|i| !i.pass) {
            let tag = if item.known_discrepancy { " [documented discrepancy]" } else { "" };
            println!("    - {}{}: {}", item.name, tag, item.detail);
        }
        unexpected |= !c.only_known_failures();
    }
    let passed = checks.iter().filter(|c| c.pass()).count();
    println!("{passed}/{} criteria passed", checks.len());
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
