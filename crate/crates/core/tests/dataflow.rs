mod common;

use common::oracles::jni_spec_name;
use jniflow::dataflow::{self, demangle, link_ffi, EdgeReason, JniMap};
use jniflow::diagnostics::Diagnostics;
use jniflow::slicer::{self, NodeKey};
use jniflow::symbols::collect_symbols;
use proptest::prelude::*;

fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z_$\u{e9}\u{6f22}][A-Za-z0-9_$\u{e9}\u{6f22}]{0,8}"
}

fn package() -> impl Strategy<Value = String> {
    proptest::collection::vec(ident(), 0..4).prop_map(|segs| segs.join("."))
}

fn class() -> impl Strategy<Value = String> {
    (ident(), proptest::option::of(ident())).prop_map(|(outer, inner)| match inner {
        Some(i) => format!("{outer}${i}"),
        None => outer,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mangling_round_trips_and_matches_the_spec(p in package(), c in class(), m in ident()) {
        let name = link_ffi(&p, &c, &m);
        prop_assert_eq!(&name, &jni_spec_name(&p, &c, &m));
        prop_assert_eq!(demangle(&name), Some((p, c, m)));
    }
}

#[test]
fn known_names() {
    assert_eq!(link_ffi("", "YuvOperator", "jniRotate"), "Java_YuvOperator_jniRotate");
    assert_eq!(
        link_ffi("com.my_app", "Outer$Inner", "go"),
        "Java_com_my_1app_Outer_00024Inner_go"
    );
    assert_eq!(link_ffi("a_b", "C_d", "e_f"), jni_spec_name("a_b", "C_d", "e_f"));
    assert_eq!(link_ffi("a_b", "C_d", "e_f"), "Java_a_1b_C_1d_e_1f");
}

fn graph_of(name: &str) -> (dataflow::DataFlowGraph, Diagnostics) {
    let units = common::units(name);
    let symbols = collect_symbols(&units);
    let map = slicer::build_all(&units, &symbols);
    let jni = match std::fs::read_to_string(common::fixtures_dir().join(name).join("jni_map.txt")) {
        Ok(text) => JniMap::parse(&text, "jni_map.txt").unwrap(),
        Err(_) => JniMap::default(),
    };
    let mut diags = Diagnostics::new();
    let g = dataflow::analyse_slices(&map, &jni, &mut diags);
    (g, diags)
}

fn key(file: &str, function: &str, var: &str, line: u32) -> NodeKey {
    NodeKey {
        file: file.into(),
        function: function.into(),
        var: var.into(),
        line,
    }
}

#[test]
fn motivating_graph_crosses_into_native_code() {
    let (g, _) = graph_of("motivating");
    let ffi: Vec<_> = g.edges().filter(|e| e.reason == EdgeReason::FfiLink).collect();
    assert_eq!(ffi.len(), 1);
    assert_eq!(ffi[0].from, key("YuvOperator.java", "jniRotate", "handler", 3));
    assert_eq!(
        ffi[0].to,
        key("JniYuvOperator.cpp", "Java_YuvOperator_jniRotate", "handle", 4)
    );
    let arg = g
        .successors(&key("YuvOperator.java", "rotate", "handler", 6))
        .into_iter()
        .map(|(k, r)| (k.clone(), r))
        .collect::<Vec<_>>();
    assert_eq!(arg.len(), 1);
    assert_eq!(arg[0].0, key("YuvOperator.java", "jniRotate", "handler", 3));
    assert!(arg[0].1.contains(&EdgeReason::ArgPass));
}

#[test]
fn registered_natives_follow_the_map() {
    let (g, diags) = graph_of("registered_native");
    assert!(g
        .edges()
        .any(|e| e.reason == EdgeReason::FfiLink && e.to.function == "nativePush" && e.to.var == "data"));
    assert!(!diags.has_code("unlinked-native"));
}

#[test]
fn unmapped_dynamic_natives_are_reported() {
    let units = common::units("registered_native");
    let symbols = collect_symbols(&units);
    let map = slicer::build_all(&units, &symbols);
    let mut diags = Diagnostics::new();
    let g = dataflow::analyse_slices(&map, &JniMap::default(), &mut diags);
    assert!(g.edges().all(|e| e.reason != EdgeReason::FfiLink));
    assert!(diags.has_code("unlinked-native"));
}

#[test]
fn cross_file_calls_link_by_name_and_type() {
    let (g, _) = graph_of("cross_file_chain");
    let text = key("net.cpp", "Java_net_io_Net_send", "text", 2);
    let succ = g.successors(&text);
    let msg = key("packet.cpp", "stage", "msg", 3);
    assert!(succ.get(&msg).is_some_and(|r| r.contains(&EdgeReason::ArgPass)));
}

#[test]
fn recursion_terminates_with_a_self_edge() {
    let (g, _) = graph_of("recursion");
    let nodes = key("tree.cpp", "visit", "nodes", 1);
    assert!(g.successors(&nodes).contains_key(&nodes));
}

#[test]
fn every_ffi_edge_goes_from_java_to_native() {
    for name in common::fixture_names() {
        let (g, _) = graph_of(&name);
        for e in g.edges().filter(|e| e.reason == EdgeReason::FfiLink) {
            assert!(!g.language(&e.from).unwrap().is_native(), "{name}: {e:?}");
            assert!(g.language(&e.to).unwrap().is_native(), "{name}: {e:?}");
        }
    }
}

#[test]
fn dot_export_names_every_node() {
    let (g, _) = graph_of("motivating");
    let dot = g.to_dot();
    assert!(dot.starts_with("digraph"));
    for (k, _) in g.nodes() {
        assert!(dot.contains(&k.to_string()), "{k}");
    }
}
