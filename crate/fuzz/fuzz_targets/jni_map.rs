#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = jniflow::dataflow::JniMap::parse(text, "fuzz");
});
