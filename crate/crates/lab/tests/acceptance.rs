//! Runs every acceptance criterion at its stated tolerance and prints one
//! line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;

use mslab::criteria;

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let verdicts = criteria::run_all();
    for v in &verdicts {
        println!("{}", v.line());
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("acceptance: {passed}/{} criteria passed", verdicts.len());
    if passed == verdicts.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
