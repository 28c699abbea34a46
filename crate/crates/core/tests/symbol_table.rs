mod common;

use jniflow::ast;
use jniflow::symbols::{collect_symbols, SymbolKind, TypeRef};
use proptest::prelude::*;

fn dup_units() -> Vec<ast::AstUnit> {
    let xml = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/duplicates.xml")).unwrap();
    ast::parse_srcml_archive(&xml).unwrap()
}

#[test]
fn motivating_symbols() {
    let table = collect_symbols(&common::units("motivating"));
    let mut got: Vec<(String, SymbolKind, String)> = table
        .iter()
        .map(|(_, s)| (s.qualified_name.clone(), s.kind, s.type_name.to_string()))
        .collect();
    got.sort();
    let want = [
        ("Java_YuvOperator_jniRotate", SymbolKind::Function, "void"),
        ("JniYuvOperator", SymbolKind::Class, "class"),
        ("JniYuvOperator._width", SymbolKind::Field, "int"),
        ("JniYuvOperator._yuvData", SymbolKind::Field, "char*"),
        ("YuvOperator", SymbolKind::Class, "class"),
        ("YuvOperator.jniRotate", SymbolKind::Function, "void"),
        ("YuvOperator.rotate", SymbolKind::Function, "void"),
    ];
    let want: Vec<(String, SymbolKind, String)> = want
        .iter()
        .map(|(a, k, t)| (a.to_string(), *k, t.to_string()))
        .collect();
    assert_eq!(got, want);
    assert!(table.diagnostics().is_empty());
}

#[test]
fn fields_resolve_through_their_class() {
    let table = collect_symbols(&common::units("motivating"));
    let (class, _) = table.by_qualified_name("JniYuvOperator").unwrap();
    assert_eq!(table.resolve_type("_width", Some(class)), TypeRef::named("int"));
    assert_eq!(table.resolve_type("_width", None), TypeRef::Unresolved);
    assert_eq!(table.find_type("JniYuvOperator *"), Some(class));
}

#[test]
fn duplicate_definitions_are_reported_once() {
    let table = collect_symbols(&dup_units());
    let dups: Vec<_> = table
        .diagnostics()
        .iter()
        .filter(|d| d.code == "duplicate-symbol")
        .collect();
    assert_eq!(dups.len(), 1, "{dups:?}");
    assert!(dups[0].message.contains("helper"));
    // prototype plus definition keeps the definition
    let proto: Vec<_> = table.functions_named("proto").collect();
    assert!(proto.iter().any(|(_, s)| s.has_body && s.file == "c.c"));
    // overloads by arity both stay
    let arities: Vec<Option<usize>> = table.functions_named("over").map(|(_, s)| s.arity).collect();
    assert_eq!(arities.len(), 2);
    assert!(arities.contains(&Some(1)) && arities.contains(&Some(2)));
}

#[test]
fn globals_resolve_from_any_file() {
    let table = collect_symbols(&dup_units());
    assert_eq!(table.resolve_type("counter", None), TypeRef::named("int"));
}

proptest! {
    #[test]
    fn unit_order_does_not_matter(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut units = dup_units();
        units.extend(common::units("motivating"));
        let base = collect_symbols(&units);
        units.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        let shuffled = collect_symbols(&units);
        let a: Vec<_> = base.iter().map(|(_, s)| s.clone()).collect();
        let b: Vec<_> = shuffled.iter().map(|(_, s)| s.clone()).collect();
        prop_assert_eq!(a, b);
        prop_assert_eq!(base.diagnostics().len(), shuffled.diagnostics().len());
    }
}
