mod common;

use jniflow::ast::{self, AccessMode, Language, NodeKind};
use jniflow::Error;
use proptest::prelude::*;

#[test]
fn both_position_encodings_give_the_same_tree() {
    assert_eq!(common::units("motivating"), common::units("motivating_legacy_pos"));
}

#[test]
fn motivating_units_and_languages() {
    let units = common::units("motivating");
    let langs: Vec<(&str, Language)> = units.iter().map(|u| (u.file_name.as_str(), u.language)).collect();
    assert_eq!(
        langs,
        [
            ("JniYuvOperator.cpp", Language::CPlusPlus),
            ("JniYuvOperator.h", Language::CPlusPlus),
            ("YuvOperator.java", Language::Java),
        ]
    );
}

#[test]
fn jni_function_signature() {
    let units = common::units("motivating");
    let cpp = units.iter().find(|u| u.file_name == "JniYuvOperator.cpp").unwrap();
    let fns = cpp.functions();
    assert_eq!(fns.len(), 1);
    let f = &fns[0];
    assert_eq!(f.name, "Java_YuvOperator_jniRotate");
    let params: Vec<(&str, &str)> = f
        .parameters
        .iter()
        .map(|p| (p.name.as_str(), p.type_name.as_str()))
        .collect();
    assert_eq!(params, [("env", "JNIEnv*"), ("obj", "jobject"), ("handle", "jobject")]);
    assert!(f.body_present);

    let java = units.iter().find(|u| u.file_name == "YuvOperator.java").unwrap();
    let natives: Vec<_> = java.functions().into_iter().filter(|f| f.is_native).collect();
    assert_eq!(natives.len(), 1);
    assert_eq!(natives[0].name, "jniRotate");
    assert!(!natives[0].body_present);
}

#[test]
fn rotation_loop_accesses() {
    let units = common::units("motivating");
    let cpp = units.iter().find(|u| u.file_name == "JniYuvOperator.cpp").unwrap();
    let stmt = cpp
        .nodes()
        .find(|n| n.is(&NodeKind::ExprStmt) && n.line == 12)
        .expect("statement on line 12");
    let acc: Vec<(String, AccessMode)> = ast::index_accesses_of(stmt)
        .into_iter()
        .map(|a| (a.buffer, a.mode))
        .collect();
    assert_eq!(
        acc,
        [("yuv".into(), AccessMode::Write), ("yuvCopy".into(), AccessMode::Read)]
    );
}

#[test]
fn every_fixture_parses_with_positions() {
    for name in common::fixture_names() {
        for unit in common::units(&name) {
            let src =
                std::fs::read_to_string(common::fixtures_dir().join(&name).join("src").join(&unit.file_name)).unwrap();
            let lines = src.lines().count() as u32;
            for n in unit.nodes() {
                assert!(
                    n.line >= 1 && n.line <= lines,
                    "{name}/{}: line {} of {lines}",
                    unit.file_name,
                    n.line
                );
            }
        }
    }
}

#[test]
fn empty_project_has_no_units() {
    assert!(common::units("empty").is_empty());
}

#[test]
fn unit_without_language_is_rejected() {
    let xml = br#"<unit xmlns="http://www.srcML.org/srcML/src"><unit filename="a.c"/></unit>"#;
    assert!(matches!(
        ast::parse_srcml_archive(xml),
        Err(Error::MissingAttribute { attribute: "language" })
    ));
}

proptest! {
    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let _ = ast::read_archive(&bytes);
    }

    #[test]
    fn truncated_archives_fail_cleanly(cut in 0usize..4000) {
        let xml = std::fs::read(common::fixtures_dir().join("motivating/project.xml")).unwrap();
        let cut = cut.min(xml.len());
        if cut < xml.len() {
            prop_assert!(ast::read_archive(&xml[..cut]).is_err());
        }
    }
}
