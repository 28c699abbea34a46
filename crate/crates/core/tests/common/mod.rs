#![allow(dead_code)]

use std::path::PathBuf;

use jniflow::ast::{self, AstUnit};
use jniflow::report::{AnalysisConfig, Warning};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().join("project.xml").is_file())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

pub fn units(name: &str) -> Vec<AstUnit> {
    let xml = std::fs::read(fixtures_dir().join(name).join("project.xml")).unwrap();
    ast::parse_srcml_archive(&xml).unwrap()
}

pub fn config(name: &str) -> AnalysisConfig {
    let dir = fixtures_dir().join(name);
    let mut c = AnalysisConfig::new(dir.join("sources.txt"));
    c.project_dir = Some(dir.clone());
    if dir.join("jni_map.txt").is_file() {
        c.jni_map = Some(dir.join("jni_map.txt"));
    }
    c
}

/// Lines of a fixture's expected.txt, comments dropped.
pub fn golden(name: &str) -> Vec<String> {
    let text = std::fs::read_to_string(fixtures_dir().join(name).join("expected.txt")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn golden_line(w: &Warning) -> String {
    let sev = match w.kind() {
        Some(_) => "warning",
        None => "note",
    };
    let kind = w.kind().map(|k| k.name()).unwrap_or("-");
    format!(
        "{sev} {kind} {} {} -> {}",
        w.category.name(),
        w.source(),
        w.sink_location()
    )
}

/// Minimal srcML archive around the given unit bodies.
pub fn archive(units: &[(&str, &str, &str)]) -> Vec<u8> {
    let mut s = String::from(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<unit xmlns="http://www.srcML.org/srcML/src" xmlns:pos="http://www.srcML.org/srcML/position" revision="1.0.0">"#,
    );
    for (lang, file, body) in units {
        s.push_str(&format!(
            r#"<unit revision="1.0.0" language="{lang}" filename="{file}" pos:tabs="8">{body}</unit>"#
        ));
    }
    s.push_str("</unit>");
    s.into_bytes()
}
pub mod oracles;
pub mod profile_oracle;
