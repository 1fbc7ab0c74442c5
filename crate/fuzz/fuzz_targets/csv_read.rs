//! Fuzzes the CSV point reader: errors are expected, panics are not.
#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_meb::io::read_csv;

fuzz_target!(|text: &str| {
    if let Ok(ps) = read_csv(text) {
        assert!(ps.n() >= 1 && ps.d() >= 1);
        assert!(ps.data().iter().all(|x| x.is_finite()));
    }
});
