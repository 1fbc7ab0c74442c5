//! Fuzzes the trial-report line parser consumed by `stable-meb eval`.
#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_meb::TrialReport;

fuzz_target!(|text: &str| {
    if let Ok(report) = TrialReport::from_json_line(text) {
        // Parsed reports must survive a serialize/parse cycle.
        let line = report.to_json_line();
        let again = TrialReport::from_json_line(&line).expect("round trip");
        assert_eq!(report.determinism_key(), again.determinism_key());
    }
});
