#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = jniflow::source_sink::parse_source_list(text, "fuzz");
});
