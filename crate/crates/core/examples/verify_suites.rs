//! Runs every verification suite at its default size and prints one line per
//! suite with the number of failing reports.

use std::time::Instant;

use blockkrylov::theory::{run_suite, Suite, SuiteOptions};

fn main() -> blockkrylov::Result<()> {
    let only = std::env::args().nth(1);
    let suites = match only {
        Some(s) => Suite::parse_list(&s)?,
        None => Suite::ALL.to_vec(),
    };
    let opts = SuiteOptions::default();
    for suite in suites {
        let t = Instant::now();
        let res = run_suite(suite, &opts)?;
        println!(
            "{:<12} {:>4} reports, {:>3} failed  ({:.1?})",
            suite.token(),
            res.reports.len(),
            res.failed(),
            t.elapsed()
        );
        for r in res.reports.iter().filter(|r| !r.passed).take(3) {
            println!("    {}", r.summary());
        }
    }
    Ok(())
}
