//! Fuzzes the binary dataset decoder. Arbitrary bytes must never panic or
//! over-allocate; successful decodes must round-trip bit-exactly.
#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_meb::io::{read_mebd, write_mebd};

fuzz_target!(|data: &[u8]| {
    if let Ok(ps) = read_mebd(data) {
        let bytes = write_mebd(&ps);
        assert_eq!(bytes, data, "accepted input must re-encode identically");
        assert_eq!(read_mebd(&bytes).unwrap(), ps);
    }
});
