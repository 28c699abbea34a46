//! Replays the checked-in fuzz corpus through the same entry points as the
//! fuzz targets, so the seeds stay exercised on stable toolchains.

use std::path::PathBuf;

use jniflow::dataflow::{demangle, link_ffi, JniMap};
use jniflow::{ast, slicer, source_sink, symbols};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds for {target}");
    paths.into_iter().map(|p| std::fs::read(p).unwrap()).collect()
}

#[test]
fn srcml_archive_seeds_parse() {
    for data in seeds("srcml_archive") {
        let units = ast::parse_srcml_archive(&data).unwrap();
        let table = symbols::collect_symbols(&units);
        assert!(!slicer::build_all(&units, &table).is_empty());
    }
}

#[test]
fn list_seeds_parse() {
    for data in seeds("source_list") {
        source_sink::parse_source_list(std::str::from_utf8(&data).unwrap(), "seed").unwrap();
    }
    for data in seeds("sink_list") {
        source_sink::parse_sink_list(std::str::from_utf8(&data).unwrap(), "seed").unwrap();
    }
    for data in seeds("jni_map") {
        JniMap::parse(std::str::from_utf8(&data).unwrap(), "seed").unwrap();
    }
}

#[test]
fn demangle_seeds_round_trip() {
    for data in seeds("demangle") {
        let symbol = String::from_utf8(data).unwrap();
        let (p, c, m) = demangle(&symbol).unwrap_or_else(|| panic!("{symbol}"));
        assert_eq!(demangle(&link_ffi(&p, &c, &m)), Some((p, c, m)));
    }
}
