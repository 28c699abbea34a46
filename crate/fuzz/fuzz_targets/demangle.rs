#![no_main]

use jniflow::dataflow::{demangle, link_ffi};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|symbol: &str| {
    if let Some((package, class, method)) = demangle(symbol) {
        // decoding then encoding is stable, though not always the same text
        let again = link_ffi(&package, &class, &method);
        assert_eq!(demangle(&again), Some((package, class, method)));
    }
});
