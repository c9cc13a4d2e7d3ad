//! Release acceptance suite: runs every criterion and prints one
//! pass/fail line per criterion (use `--nocapture` to see them live).

use hyperheat::acceptance::run_all;

#[test]
fn acceptance_criteria() {
    let results = run_all();
    let mut failed = Vec::new();
    for r in &results {
        println!(
            "{} {:<26} {:>7.2}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.seconds,
            r.detail
        );
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
