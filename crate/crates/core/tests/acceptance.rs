//! The acceptance battery: every criterion at its stated tolerance, one
//! pass/fail line each (run with `--nocapture` to see them).

use dblab_core::suite::{run_criterion, SuiteOptions, CRITERIA};

#[test]
fn acceptance_battery() {
    let opts = SuiteOptions::default();
    let mut failed = Vec::new();
    let mut sampling_seconds = 0.0;
    for &(id, _) in CRITERIA.iter() {
        let r = run_criterion(id, &opts);
        println!("{}", r.line());
        if id == 2 || id == 3 {
            sampling_seconds += r.seconds;
        }
        if !r.passed {
            failed.push(id);
        }
    }
    println!("criteria 2 and 3 together: {sampling_seconds:.2} s (limit 60 s)");
    assert!(sampling_seconds < 60.0, "criteria 2 and 3 took {sampling_seconds:.1} s");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
