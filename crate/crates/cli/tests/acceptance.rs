//! Runs every acceptance criterion and prints one line per criterion.

use std::io::Write;

use coalesce_cli::suite::{run_suite, Suite};

#[test]
fn all_criteria_pass() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_suite(Suite::All, dir.path(), |r| {
        // Written to the raw stdout handle so the lines survive test capture.
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{}", r.line());
        let _ = out.flush();
    });
    assert_eq!(report.results.len(), 12);
    let failed: Vec<String> = report
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.line())
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
