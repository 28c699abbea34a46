//! Project-wide data-flow graph over slice profiles.
//!
//! Starting from every profile, the worklist follows three kinds of facts:
//! calls that receive the variable (an `ArgPass` edge to the callee's
//! parameter), JNI native declarations (an `FfiLink` edge to the matching
//! C/C++ parameter), and dependent variables (`DVar`, or `Assign` for a
//! plain copy). A visited set makes recursion and other cycles terminate.

pub mod jni;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::ast::{self, AstNode, Language, NodeKind};
use crate::diagnostics::Diagnostics;
pub use crate::slicer::NodeKey;
use crate::slicer::{
    self, CFunctionUse, FunctionSummary, ProfileKey, ProfileKind, SliceProfile, SliceProfileMap, ValueInfo,
};
use crate::source_sink::SinkCategory;
use crate::symbols::{base_type_name, TypeRef};

pub use jni::{demangle, link_ffi, JniMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeReason {
    ArgPass,
    FfiLink,
    DVar,
    Assign,
}

impl EdgeReason {
    pub fn label(self) -> &'static str {
        match self {
            EdgeReason::ArgPass => "ArgPass",
            EdgeReason::FfiLink => "FfiLink",
            EdgeReason::DVar => "DVar",
            EdgeReason::Assign => "Assign",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: NodeKey,
    pub to: NodeKey,
    pub reason: EdgeReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeMarks {
    pub source: bool,
    pub sinks: BTreeSet<SinkCategory>,
}

#[derive(Debug, Clone, Default)]
pub struct DataFlowGraph {
    nodes: BTreeMap<NodeKey, Language>,
    edges: BTreeSet<Edge>,
    marks: BTreeMap<NodeKey, NodeMarks>,
}

impl DataFlowGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, key: NodeKey, language: Language) {
        self.nodes.insert(key, language);
    }

    /// Adds an edge; both endpoints must already be nodes.
    pub fn add_edge(&mut self, from: NodeKey, to: NodeKey, reason: EdgeReason) -> bool {
        assert!(
            self.nodes.contains_key(&from) && self.nodes.contains_key(&to),
            "edge endpoints must be graph nodes"
        );
        if reason == EdgeReason::FfiLink {
            debug_assert!(self.nodes[&from] == Language::Java && self.nodes[&to].is_native());
        }
        self.edges.insert(Edge { from, to, reason })
    }

    pub fn contains(&self, key: &NodeKey) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn language(&self, key: &NodeKey) -> Option<Language> {
        self.nodes.get(key).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeKey, Language)> {
        self.nodes.iter().map(|(k, l)| (k, *l))
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Successors with the reasons linking them, sorted by node key.
    pub fn successors(&self, key: &NodeKey) -> BTreeMap<&NodeKey, BTreeSet<EdgeReason>> {
        let mut out: BTreeMap<&NodeKey, BTreeSet<EdgeReason>> = BTreeMap::new();
        let lo = Edge {
            from: key.clone(),
            to: NodeKey {
                file: String::new(),
                function: String::new(),
                var: String::new(),
                line: 0,
            },
            reason: EdgeReason::ArgPass,
        };
        for e in self.edges.range(lo..).take_while(|e| &e.from == key) {
            out.entry(&e.to).or_default().insert(e.reason);
        }
        out
    }

    pub fn mark_source(&mut self, key: &NodeKey) {
        if self.nodes.contains_key(key) {
            self.marks.entry(key.clone()).or_default().source = true;
        }
    }

    pub fn mark_sink(&mut self, key: &NodeKey, category: SinkCategory) {
        if self.nodes.contains_key(key) {
            self.marks.entry(key.clone()).or_default().sinks.insert(category);
        }
    }

    pub fn marks(&self, key: &NodeKey) -> Option<&NodeMarks> {
        self.marks.get(key)
    }

    /// DOT rendering: nodes labelled `file:function:var:line`, edges by
    /// reason.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dataflow {\n  node [shape=box];\n");
        let ids: BTreeMap<&NodeKey, usize> = self.nodes.keys().enumerate().map(|(i, k)| (k, i)).collect();
        for (k, lang) in &self.nodes {
            let mut attrs = format!("label=\"{}\"", dot_escape(&k.to_string()));
            if lang.is_native() {
                attrs.push_str(", style=filled, fillcolor=\"#eeeeee\"");
            }
            if let Some(m) = self.marks.get(k) {
                if m.source {
                    attrs.push_str(", color=blue");
                } else if !m.sinks.is_empty() {
                    attrs.push_str(", color=red");
                }
            }
            let _ = writeln!(out, "  n{} [{}];", ids[k], attrs);
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{}\"];",
                ids[&e.from],
                ids[&e.to],
                e.reason.label()
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// `env->CallVoidMethod(...)` and friends call back into Java; they are
/// reported, not modelled.
fn is_jni_callback(name: &str, receiver: Option<&str>) -> bool {
    receiver.is_some() && ((name.starts_with("Call") && name.contains("Method")) || name.starts_with("NewObject"))
}

/// Builds the graph by running the worklist over every profile.
pub fn analyse_slices(map: &SliceProfileMap, jni_map: &JniMap, diags: &mut Diagnostics) -> DataFlowGraph {
    let mut graph = DataFlowGraph::new();
    for p in map.values() {
        graph.add_node(p.node_key(), p.language);
    }
    let links = link_natives(map, jni_map, diags);

    let mut visited: BTreeSet<ProfileKey> = BTreeSet::new();
    let mut work: VecDeque<ProfileKey> = map.profiles.keys().cloned().collect();
    while let Some(key) = work.pop_front() {
        if !visited.insert(key.clone()) {
            continue;
        }
        let Some(profile) = map.get(&key) else { continue };
        let from = profile.node_key();

        for use_ in &profile.c_functions {
            let found = find_callee_profile(map, use_, &profile.file_name, profile.language);
            if found.candidates > 1 {
                diags.note_at(
                    "ambiguous-callee",
                    &profile.file_name,
                    use_.call_line,
                    format!(
                        "{} functions match `{}` with {} argument(s); using {}",
                        found.candidates,
                        use_.callee_name,
                        use_.arg_count,
                        found.profile.map(|p| p.file_name.as_str()).unwrap_or("none"),
                    ),
                );
            }
            match found.profile {
                Some(callee) => {
                    graph.add_edge(from.clone(), callee.node_key(), EdgeReason::ArgPass);
                    if !visited.contains(&callee.key()) {
                        work.push_back(callee.key());
                    }
                }
                None if is_jni_callback(&use_.callee_name, use_.receiver.as_deref()) => {
                    diags.note_at(
                        "jni-callback",
                        &profile.file_name,
                        use_.call_line,
                        format!("call back into Java through `{}` is not followed", use_.callee_name),
                    );
                }
                None => {
                    diags.note(
                        "unresolved-callee",
                        format!(
                            "no project function `{}` takes {} argument(s) of type {} at position {}",
                            use_.callee_name, use_.arg_count, use_.arg_type, use_.arg_position
                        ),
                    );
                }
            }
        }

        if let ProfileKind::Parameter { index } = profile.kind {
            if let Some(target) = links.get(&(profile.file_name.clone(), profile.function_name.clone())) {
                match map_ffi_arguments(index, target) {
                    Some(param) => {
                        if let Some(q) = map.get(param) {
                            graph.add_edge(from.clone(), q.node_key(), EdgeReason::FfiLink);
                            if !visited.contains(&q.key()) {
                                work.push_back(q.key());
                            }
                        }
                    }
                    None => diags.note_at(
                        "jni-arity",
                        &target.file,
                        target.line,
                        format!(
                            "`{}` has {} parameter(s); Java argument {} needs position {}",
                            target.name,
                            target.arity(),
                            index,
                            index + 2
                        ),
                    ),
                }
            }
        }

        for dv in &profile.dependent_vars {
            let Some(q) = map.get(dv) else { continue };
            let is_copy = q.updates.iter().any(|u| u.value == ValueInfo::RefTo(from.clone()));
            let reason = if is_copy { EdgeReason::Assign } else { EdgeReason::DVar };
            graph.add_edge(from.clone(), q.node_key(), reason);
            if !visited.contains(dv) {
                work.push_back(dv.clone());
            }
        }
    }
    graph
}

/// Result of a callee lookup: the chosen parameter profile and how many
/// functions qualified.
#[derive(Debug, Clone, Copy)]
pub struct CalleeLookup<'m> {
    pub profile: Option<&'m SliceProfile>,
    pub candidates: usize,
}

/// Parameter profile receiving argument `use_.arg_position` of a call:
/// same language family, same name and arity, and a compatible type at that
/// position (an unresolved type on either side matches). Several matches
/// are ordered by same file first, then file name, then line.
pub fn find_callee_profile<'m>(
    map: &'m SliceProfileMap,
    use_: &CFunctionUse,
    caller_file: &str,
    caller_language: Language,
) -> CalleeLookup<'m> {
    let mut matches: Vec<&FunctionSummary> = map
        .functions
        .iter()
        .filter(|f| {
            f.simple_name == use_.callee_name
                && f.language.same_family(caller_language)
                && f.arity() == use_.arg_count
                && f.param_types
                    .get(use_.arg_position)
                    .is_some_and(|t| types_compatible(t, &use_.arg_type))
        })
        .collect();
    matches.sort_by(|a, b| {
        let rank = |f: &FunctionSummary| (f.file != caller_file, f.file.clone(), f.line);
        rank(a).cmp(&rank(b))
    });
    let profile = matches
        .first()
        .and_then(|f| f.params.get(use_.arg_position))
        .and_then(|k| map.get(k));
    CalleeLookup {
        profile,
        candidates: matches.len(),
    }
}

fn types_compatible(param: &TypeRef, arg: &str) -> bool {
    let TypeRef::Named(p) = param else { return true };
    if arg.is_empty() || arg == TypeRef::Unresolved.as_str() {
        return true;
    }
    normalize_type(p) == normalize_type(arg)
}

fn normalize_type(t: &str) -> String {
    let mut s: String = t
        .split_whitespace()
        .filter(|w| *w != "const" && *w != "final")
        .collect::<Vec<_>>()
        .join(" ");
    s = s.replace(" *", "*").replace(" &", "&").replace(" [", "[");
    // arrays decay to pointers in parameter position; references bind directly
    s = s.replace("[]", "*").replace('&', "");
    // `java.lang.String` and `String` name the same type
    if s.contains('.') && !s.contains("::") {
        let base = base_type_name(&s);
        let suffix = &s[base.len()..];
        let simple = base.rsplit('.').next().unwrap_or(&base).to_string();
        return format!("{simple}{suffix}");
    }
    s
}

/// For every Java native declaration, the C/C++ function it binds to.
/// Keyed by `(file, function)` of the native declaration.
pub fn link_natives<'m>(
    map: &'m SliceProfileMap,
    jni_map: &JniMap,
    diags: &mut Diagnostics,
) -> BTreeMap<(String, String), &'m FunctionSummary> {
    let mut out = BTreeMap::new();
    let natives: Vec<&FunctionSummary> = map
        .functions
        .iter()
        .filter(|f| f.language == Language::Java && f.is_native)
        .collect();
    let mut per_class: BTreeMap<(Option<String>, &str), usize> = BTreeMap::new();
    for f in &natives {
        *per_class
            .entry((f.qualified_class(), f.simple_name.as_str()))
            .or_default() += 1;
    }
    for f in natives {
        let class = f.qualified_class();
        if per_class[&(class.clone(), f.simple_name.as_str())] > 1 {
            diags.note_at(
                "overloaded-native",
                &f.file,
                f.line,
                format!(
                    "overloaded native `{}` needs signature-suffixed JNI names, which are not generated",
                    f.simple_name
                ),
            );
        }
        let qualified = match &class {
            Some(c) => format!("{c}.{}", f.simple_name),
            None => f.simple_name.clone(),
        };
        let target_name = match jni_map.get(&qualified) {
            Some(n) => n.to_string(),
            None => link_ffi(
                f.package.as_deref().unwrap_or(""),
                &f.class_path.join("$"),
                &f.simple_name,
            ),
        };
        let mut candidates: Vec<&FunctionSummary> = map
            .functions
            .iter()
            .filter(|g| g.language.is_native() && g.has_body && g.simple_name == target_name)
            .collect();
        candidates.sort_by(|a, b| (&a.file, a.line).cmp(&(&b.file, b.line)));
        match candidates.first() {
            Some(target) => {
                if candidates.len() > 1 {
                    diags.note_at(
                        "ambiguous-jni",
                        &f.file,
                        f.line,
                        format!(
                            "`{target_name}` is defined {} times; using {}",
                            candidates.len(),
                            target.file
                        ),
                    );
                }
                out.insert((f.file.clone(), f.name.clone()), *target);
            }
            None => diags.note_at(
                "unlinked-native",
                &f.file,
                f.line,
                format!("no C/C++ definition of `{target_name}` for native `{qualified}`"),
            ),
        }
    }
    out
}

/// JNI parameter receiving Java argument `java_position`: two leading
/// parameters (`JNIEnv*` and the receiver) are skipped.
pub fn map_ffi_arguments(java_position: usize, jni_function: &FunctionSummary) -> Option<&ProfileKey> {
    jni_function.params.get(java_position + 2)
}

/// Value `profile` holds after `assign`: a literal gives `IntLiteral`, a
/// lone variable `RefTo` it, anything else `Unknown`. Returns `None` when
/// `assign` does not assign to the profile's variable.
pub fn update_value(profile: &SliceProfile, assign: &AstNode, map: &SliceProfileMap) -> Option<ValueInfo> {
    let expr = assign
        .descendants()
        .find(|n| n.is(&NodeKind::Expr) && n.children.iter().any(ast::is_assign_op))?;
    let split = expr.children.iter().position(ast::is_assign_op)?;
    let target = expr.children[..split].iter().find(|c| c.is(&NodeKind::Name))?;
    if ast::name_segments(target) != [profile.var_name.as_str()] {
        return None;
    }
    if expr.children[split].token() != "=" {
        return Some(ValueInfo::Unknown);
    }
    Some(slicer::classify_rhs(&expr.children[split + 1..], |name| {
        let local = ProfileKey::new(&profile.file_name, &profile.function_name, name);
        map.get(&local)
            .or_else(|| {
                map.values()
                    .find(|p| p.var_name == name && p.file_name == profile.file_name && p.key().is_field_scope())
            })
            .map(SliceProfile::node_key)
    }))
}
