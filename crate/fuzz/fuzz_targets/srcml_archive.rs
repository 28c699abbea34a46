#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(units) = jniflow::ast::parse_srcml_archive(data) {
        // anything that parses must survive the rest of the front end
        let symbols = jniflow::symbols::collect_symbols(&units);
        let _ = jniflow::slicer::build_all(&units, &symbols);
    }
});
