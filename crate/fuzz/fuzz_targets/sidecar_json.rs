//! Fuzzes the dataset sidecar parser.
#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_meb::io::Sidecar;

fuzz_target!(|text: &str| {
    if let Ok(sidecar) = Sidecar::from_json(text) {
        let json = sidecar.to_json();
        let _ = Sidecar::from_json(&json).expect("round trip");
    }
});
