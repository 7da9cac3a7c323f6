//! Acceptance criteria, one line per criterion.
//!
//! The solenoidal check runs last so that it covers every run made by the
//! other suites.

use std::process::ExitCode;
use std::time::Instant;

use swlw::verify::{thread_cap, SuiteReport, Verifier};

const CRITERIA: [(usize, &str); 10] = [
    (1, "equilibrium"),
    (2, "energy"),
    (3, "conservation"),
    (5, "lagrangian"),
    (6, "contraction"),
    (7, "dependence"),
    (8, "vacuum"),
    (9, "decoupling"),
    (10, "mms"),
    (4, "solenoidal"),
];

fn main() -> ExitCode {
    let verifier = Verifier::with_threads(thread_cap());
    let mut lines: Vec<(usize, bool, String)> = Vec::new();
    for (id, suite) in CRITERIA {
        let start = Instant::now();
        let (passed, text) = match verifier.suite(suite) {
            Ok(report) => (report.passed, describe(&report)),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        lines.push((id, passed, format!("{text} [{secs:.1}s]")));
    }
    lines.sort_by_key(|l| l.0);
    for (id, passed, text) in &lines {
        println!("criterion {id:>2} {}: {text}", if *passed { "PASS" } else { "FAIL" });
    }
    let failed = lines.iter().filter(|l| !l.1).count();
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn describe(report: &SuiteReport) -> String {
    let mut checks: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{}={:.3e} {}", c.name, c.value, c.condition))
        .collect();
    // The per-run divergence list is long; the maximum says enough.
    if report.suite == "solenoidal" {
        checks.truncate(1);
        checks.push(format!("runs={}", report.checks.len() - 1));
    }
    format!("{} ({})", report.suite, checks.join("; "))
}
