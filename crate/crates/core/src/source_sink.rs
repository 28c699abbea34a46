//! Sources, sinks and the paths between them.
//!
//! Sources come from a list of external API methods (`qualified.Name/N`).
//! A Java call matches an entry when its terminal name and argument count
//! agree and the call is not local; a Java method whose name and arity match
//! an entry is treated as an overridden callback and its data-carrying
//! parameters become sources.
//!
//! Sinks fall into five categories: calls to listed input, memory, output
//! and utility functions, and any indexed buffer access.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path as FsPath;

use serde::Serialize;

use crate::ast::{self, AccessMode, AstNode, AstUnit, Language, NodeKind};
use crate::dataflow::{DataFlowGraph, EdgeReason};
use crate::error::{Error, Result};
use crate::slicer::{self, CallRecord, FunctionSummary, NodeKey, ProfileKey, SliceProfileMap};
use crate::symbols::{base_type_name, SymbolKind, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceFnSpec {
    pub qualified_name: String,
    pub param_count: usize,
}

impl SourceFnSpec {
    /// Qualified class part of the entry.
    pub fn class_name(&self) -> &str {
        self.qualified_name.rsplit_once('.').map_or("", |(c, _)| c)
    }

    pub fn method_name(&self) -> &str {
        self.qualified_name.rsplit('.').next().unwrap_or(&self.qualified_name)
    }
}

/// Parses a source list: one `qualified.Name/paramCount` per line, with
/// blank lines and `#` comments ignored.
pub fn parse_source_list(text: &str, origin: &str) -> Result<Vec<SourceFnSpec>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::ListFormat {
            path: origin.to_string(),
            line: i + 1,
            message,
        };
        let (name, count) = line
            .rsplit_once('/')
            .ok_or_else(|| err(format!("expected `qualified.Name/paramCount`, found `{line}`")))?;
        let name = name.trim();
        let valid_segments = name.split('.').all(|s| {
            let mut c = s.chars();
            c.next().is_some_and(|f| f.is_alphabetic() || f == '_' || f == '$')
                && c.all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '$')
        });
        if !name.contains('.') || !valid_segments {
            return Err(err(format!("`{name}` is not a dotted qualified name")));
        }
        let param_count = count
            .trim()
            .parse()
            .map_err(|_| err(format!("`{}` is not a parameter count", count.trim())))?;
        out.push(SourceFnSpec {
            qualified_name: name.to_string(),
            param_count,
        });
    }
    Ok(out)
}

pub fn load_source_list(path: &FsPath) -> Result<Vec<SourceFnSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_source_list(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SinkCategory {
    Input,
    Memory,
    Output,
    Utility,
    BufferAccess,
}

impl SinkCategory {
    pub const ALL: [SinkCategory; 5] = [
        SinkCategory::Input,
        SinkCategory::Memory,
        SinkCategory::Output,
        SinkCategory::Utility,
        SinkCategory::BufferAccess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SinkCategory::Input => "Input",
            SinkCategory::Memory => "Memory",
            SinkCategory::Output => "Output",
            SinkCategory::Utility => "Utility",
            SinkCategory::BufferAccess => "BufferAccess",
        }
    }

    /// File name of the category's list inside a sinks directory.
    pub fn list_file(self) -> Option<&'static str> {
        match self {
            SinkCategory::Input => Some("input.txt"),
            SinkCategory::Memory => Some("memory.txt"),
            SinkCategory::Output => Some("output.txt"),
            SinkCategory::Utility => Some("utility.txt"),
            SinkCategory::BufferAccess => None,
        }
    }
}

impl fmt::Display for SinkCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Function names per call-based sink category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkLists {
    lists: BTreeMap<SinkCategory, BTreeSet<String>>,
}

const DEFAULT_INPUT: &str = include_str!("../data/sinks/input.txt");
const DEFAULT_MEMORY: &str = include_str!("../data/sinks/memory.txt");
const DEFAULT_OUTPUT: &str = include_str!("../data/sinks/output.txt");
const DEFAULT_UTILITY: &str = include_str!("../data/sinks/utility.txt");

impl Default for SinkLists {
    fn default() -> Self {
        let mut lists = BTreeMap::new();
        for (cat, text) in [
            (SinkCategory::Input, DEFAULT_INPUT),
            (SinkCategory::Memory, DEFAULT_MEMORY),
            (SinkCategory::Output, DEFAULT_OUTPUT),
            (SinkCategory::Utility, DEFAULT_UTILITY),
        ] {
            let names = parse_sink_list(text, "<built-in>").expect("built-in sink lists are valid");
            lists.insert(cat, names);
        }
        SinkLists { lists }
    }
}

/// One C identifier per line; blank lines and `#` comments ignored.
pub fn parse_sink_list(text: &str, origin: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut chars = line.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::ListFormat {
                path: origin.to_string(),
                line: i + 1,
                message: format!("`{line}` is not a function name"),
            });
        }
        out.insert(line.to_string());
    }
    Ok(out)
}

impl SinkLists {
    /// Built-in lists, with each category replaced by `<dir>/<category>.txt`
    /// when that file exists.
    pub fn load_dir(dir: &FsPath) -> Result<SinkLists> {
        if !dir.is_dir() {
            return Err(Error::Config(format!(
                "sinks directory `{}` does not exist",
                dir.display()
            )));
        }
        let mut lists = SinkLists::default();
        for cat in SinkCategory::ALL {
            let Some(file) = cat.list_file() else { continue };
            let path = dir.join(file);
            if path.is_file() {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                lists
                    .lists
                    .insert(cat, parse_sink_list(&text, &path.display().to_string())?);
            }
        }
        Ok(lists)
    }

    pub fn with_category(mut self, cat: SinkCategory, names: BTreeSet<String>) -> Self {
        self.lists.insert(cat, names);
        self
    }

    /// Highest-priority call category for a function name.
    pub fn category_of(&self, callee: &str) -> Option<SinkCategory> {
        self.lists
            .iter()
            .find(|(_, names)| names.contains(callee))
            .map(|(cat, _)| *cat)
    }

    pub fn names(&self, cat: SinkCategory) -> impl Iterator<Item = &str> {
        self.lists.get(&cat).into_iter().flatten().map(String::as_str)
    }
}

/// Category of `var`'s involvement in `stmt`: the listed call it is passed
/// to, or `BufferAccess` when it is an indexed buffer or an index. Java
/// code is never a sink.
pub fn classify_sink(var: &str, language: Language, stmt: &AstNode, lists: &SinkLists) -> Option<SinkCategory> {
    if !language.is_native() {
        return None;
    }
    let mut best: Option<SinkCategory> = None;
    for call in slicer::calls_in(stmt) {
        let (callee, _) = slicer::callee_of(call);
        let Some(cat) = lists.category_of(&callee) else {
            continue;
        };
        if slicer::call_args(call)
            .iter()
            .any(|a| slicer::plain_refs(a).contains(&var))
        {
            best = Some(best.map_or(cat, |b| b.min(cat)));
        }
    }
    if best.is_some() {
        return best;
    }
    for acc in ast::index_accesses_of(stmt) {
        let base = acc.mode == AccessMode::Read && acc.buffer == var;
        if base || slicer::plain_refs(acc.index).contains(&var) {
            return Some(SinkCategory::BufferAccess);
        }
    }
    None
}

/// How a variable takes part in a sink site. Lower ranks are preferred when
/// choosing the node that stands for a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SinkRole {
    /// The accessed or copied buffer.
    Buffer,
    /// Argument at this position of a listed call.
    Argument(usize),
    /// A variable in an index expression.
    Index,
}

#[derive(Debug, Clone)]
pub enum SiteShape<'a> {
    Call {
        callee: String,
        call: &'a AstNode,
    },
    Index {
        /// Root variable of the indexed expression.
        buffer: String,
        /// The indexed expression as written (`obj->buf`).
        path: String,
        mode: AccessMode,
        index: &'a AstNode,
    },
    /// Whole-buffer assignment `dst = src` between array or container
    /// variables.
    BufferAssign {
        dst: String,
        src: String,
    },
}

/// A place in C/C++ code where tainted data could overflow a buffer.
#[derive(Debug, Clone)]
pub struct SinkSite<'a> {
    pub file: String,
    pub function: String,
    pub line: u32,
    pub category: SinkCategory,
    pub shape: SiteShape<'a>,
    pub stmt: &'a AstNode,
    /// Body of the enclosing function.
    pub function_node: &'a AstNode,
    pub participants: Vec<(NodeKey, SinkRole)>,
}

/// Every sink site in the project's C/C++ functions.
pub fn find_sink_sites<'a>(units: &'a [AstUnit], map: &SliceProfileMap, lists: &SinkLists) -> Vec<SinkSite<'a>> {
    let mut out = Vec::new();
    for unit in units.iter().filter(|u| u.language.is_native()) {
        for info in ast::functions_of(unit) {
            let Some(body) = info.body() else { continue };
            let Some(summary) = map
                .functions
                .iter()
                .find(|f| f.file == unit.file_name && f.line == info.line && f.simple_name == info.name)
            else {
                continue;
            };
            let resolver = SiteResolver { map, summary };
            let mut stmts = Vec::new();
            collect_statements(body, &mut stmts);
            for stmt in stmts {
                sites_in_statement(stmt, info.node, &resolver, lists, &mut out);
            }
        }
    }
    out
}

fn collect_statements<'a>(node: &'a AstNode, out: &mut Vec<&'a AstNode>) {
    for c in &node.children {
        match &c.kind {
            NodeKind::Function | NodeKind::Class | NodeKind::Struct => {}
            NodeKind::ExprStmt | NodeKind::DeclStmt | NodeKind::Condition => out.push(c),
            NodeKind::Opaque(t) if t == "return" || t == "control" => out.push(c),
            NodeKind::Init | NodeKind::Expr => out.push(c),
            _ => collect_statements(c, out),
        }
    }
}

struct SiteResolver<'m> {
    map: &'m SliceProfileMap,
    summary: &'m FunctionSummary,
}

impl SiteResolver<'_> {
    /// Node for the root variable of a name, falling back to a field or
    /// global profile of the same name in this file.
    fn resolve(&self, var: &str) -> Option<NodeKey> {
        let local = ProfileKey::new(&self.summary.file, &self.summary.name, var);
        if let Some(p) = self.map.get(&local) {
            return Some(p.node_key());
        }
        self.map
            .values()
            .filter(|p| p.var_name == var && p.key().is_field_scope())
            .min_by_key(|p| (p.file_name != self.summary.file, p.key()))
            .map(|p| p.node_key())
    }

    /// Nodes for every variable in an expression, with field segments of
    /// member paths included.
    fn resolve_all(&self, node: &AstNode) -> Vec<NodeKey> {
        let mut out = Vec::new();
        for var in slicer::plain_refs(node) {
            if let Some(k) = self.resolve(var) {
                out.push(k);
            }
        }
        for n in node
            .descendants()
            .filter(|n| n.is(&NodeKind::Name) && n.children.iter().any(|c| c.is(&NodeKind::Operator)))
        {
            for seg in ast::name_segments(n).into_iter().skip(1) {
                if let Some(p) = self
                    .map
                    .values()
                    .find(|p| p.var_name == seg && p.key().is_field_scope())
                {
                    out.push(p.node_key());
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn type_of(&self, var: &str) -> Option<String> {
        let k = self.resolve(var)?;
        self.map.get_node(&k).map(|p| p.type_name.as_str().to_string())
    }
}

fn sites_in_statement<'a>(
    stmt: &'a AstNode,
    function_node: &'a AstNode,
    resolver: &SiteResolver<'_>,
    lists: &SinkLists,
    out: &mut Vec<SinkSite<'a>>,
) {
    let base = |line: u32, category, shape, participants| SinkSite {
        file: resolver.summary.file.clone(),
        function: resolver.summary.name.clone(),
        line,
        category,
        shape,
        stmt,
        function_node,
        participants,
    };
    for call in slicer::calls_in(stmt) {
        let (callee, _) = slicer::callee_of(call);
        let Some(category) = lists.category_of(&callee) else {
            continue;
        };
        let mut participants = Vec::new();
        for (i, arg) in slicer::call_args(call).iter().enumerate() {
            for k in resolver.resolve_all(arg) {
                participants.push((k, SinkRole::Argument(i)));
            }
        }
        out.push(base(
            call.line,
            category,
            SiteShape::Call { callee, call },
            participants,
        ));
    }
    for acc in ast::index_accesses_of(stmt) {
        let mut participants = Vec::new();
        if acc.mode == AccessMode::Read {
            if let Some(k) = resolver.resolve(&acc.buffer) {
                participants.push((k, SinkRole::Buffer));
            }
        }
        for k in resolver.resolve_all(acc.index) {
            participants.push((k, SinkRole::Index));
        }
        out.push(base(
            acc.line,
            SinkCategory::BufferAccess,
            SiteShape::Index {
                buffer: acc.buffer.clone(),
                path: acc.buffer_path.clone(),
                mode: acc.mode,
                index: acc.index,
            },
            participants,
        ));
    }
    if let Some((dst, src, line)) = buffer_assignment(stmt, resolver) {
        let participants = resolver
            .resolve(&src)
            .map(|k| vec![(k, SinkRole::Buffer)])
            .unwrap_or_default();
        out.push(base(
            line,
            SinkCategory::BufferAccess,
            SiteShape::BufferAssign { dst, src },
            participants,
        ));
    }
}

pub fn is_buffer_type(type_name: &str) -> bool {
    let t = type_name.replace(' ', "");
    t.ends_with("[]")
        || ["vector<", "array<", "basic_string<", "std::string", "ByteBuffer"]
            .iter()
            .any(|m| t.contains(m))
}

/// `dst = src` (assignment or copy-initialization) where both sides are
/// array or container variables and `dst` is not a pointer.
fn buffer_assignment(stmt: &AstNode, resolver: &SiteResolver<'_>) -> Option<(String, String, u32)> {
    let (dst, src_nodes, line): (String, &[AstNode], u32) = if stmt.is(&NodeKind::DeclStmt) {
        let decl = stmt.child(&NodeKind::Decl)?;
        let name = ast::decl_name(decl)?;
        let rhs: &[AstNode] = if let Some(init) = decl.child(&NodeKind::Init) {
            &init.child(&NodeKind::Expr)?.children
        } else {
            let args = decl.child(&NodeKind::ArgumentList)?;
            let [arg] = args.children.as_slice() else { return None };
            &arg.child(&NodeKind::Expr)?.children
        };
        (ast::name_segments(name)[0].to_string(), rhs, decl.line)
    } else {
        let expr = if stmt.is(&NodeKind::ExprStmt) {
            stmt.child(&NodeKind::Expr)?
        } else {
            stmt
        };
        if !expr.is(&NodeKind::Expr) {
            return None;
        }
        let split = expr
            .children
            .iter()
            .position(|c| c.is(&NodeKind::Operator) && c.token() == "=")?;
        let [lhs] = &expr.children[..split] else { return None };
        if !lhs.is(&NodeKind::Name) || !lhs.children.is_empty() {
            return None;
        }
        (lhs.token().to_string(), &expr.children[split + 1..], lhs.line)
    };
    let [src] = src_nodes else { return None };
    if !src.is(&NodeKind::Name) || !src.children.is_empty() {
        return None;
    }
    let dst_type = resolver.type_of(&dst)?;
    let src_type = resolver.type_of(src.token())?;
    let pointer = dst_type.trim_end().ends_with('*');
    (is_buffer_type(&dst_type) && is_buffer_type(&src_type) && !pointer).then(|| (dst, src.token().to_string(), line))
}

/// Source nodes: receivers and data-carrying arguments of matching
/// non-local calls, and data-carrying parameters of Java methods that match
/// an entry by name and arity and belong to (or extend) the entry's class.
pub fn match_sources(
    graph: &DataFlowGraph,
    map: &SliceProfileMap,
    symbols: &SymbolTable,
    specs: &[SourceFnSpec],
) -> Vec<NodeKey> {
    let mut out = BTreeSet::new();
    for call in map.calls.iter().filter(|c| c.language == Language::Java) {
        let matched = specs
            .iter()
            .any(|s| s.method_name() == call.callee_name && s.param_count == call.args.len());
        if !matched || is_local_call(call, map, symbols) {
            continue;
        }
        if let Some(t) = &call.target {
            if let Some(p) = map.get(t) {
                out.insert(p.node_key());
            }
        }
        for arg in &call.args {
            for k in arg {
                if let Some(p) = map.get(k) {
                    if is_data_carrying(p.type_name.as_str()) {
                        out.insert(p.node_key());
                    }
                }
            }
        }
    }
    for f in map
        .functions
        .iter()
        .filter(|f| f.language == Language::Java && f.has_body && !f.is_native)
    {
        let matched = specs.iter().any(|s| {
            s.method_name() == f.simple_name && s.param_count == f.arity() && overrides_class(f, s.class_name())
        });
        if !matched {
            continue;
        }
        for (k, ty) in f.params.iter().zip(&f.param_types) {
            if is_data_carrying(ty.as_str()) {
                if let Some(p) = map.get(k) {
                    out.insert(p.node_key());
                }
            }
        }
    }
    out.into_iter()
        .filter(|k| graph.language(k) == Some(Language::Java))
        .collect()
}

/// Is `f` declared in `class` (compared by simple name) or in a class that
/// extends or implements it?
fn overrides_class(f: &FunctionSummary, class: &str) -> bool {
    let simple = class.rsplit(['.', '$']).next().unwrap_or(class);
    f.class_path.last().is_some_and(|c| c == simple) || f.supertypes.iter().any(|s| s == simple)
}

/// Java types that carry external bytes or text.
pub fn is_data_carrying(type_name: &str) -> bool {
    let base = base_type_name(type_name);
    let simple = base.rsplit('.').next().unwrap_or(&base);
    type_name.trim_end().ends_with("[]")
        || matches!(
            simple,
            "String" | "CharSequence" | "ByteBuffer" | "CharBuffer" | "StringBuilder" | "StringBuffer" | "ByteBuf"
        )
}

/// A call is local when it resolves to a method declared in the project:
/// unqualified and `this.` calls against the enclosing class, qualified
/// calls against the receiver's declared type (or the receiver itself when
/// it names a class). `super.` calls go to a superclass we do not model and
/// count as external.
pub fn is_local_call(call: &CallRecord, map: &SliceProfileMap, symbols: &SymbolTable) -> bool {
    let arity = call.args.len();
    let class_decl = |class_id: usize| {
        symbols
            .methods_of(class_id, &call.callee_name)
            .any(|(_, s)| s.arity == Some(arity))
    };
    match call.receiver.as_deref() {
        Some("super") => false,
        None | Some("this") => {
            let Some(class) = map
                .function(&call.file, &call.function)
                .and_then(|f| f.qualified_class())
            else {
                return symbols
                    .functions_named(&call.callee_name)
                    .any(|(_, s)| s.parent.is_none() && s.arity == Some(arity));
            };
            symbols
                .by_qualified_name(&class)
                .filter(|(_, s)| matches!(s.kind, SymbolKind::Class | SymbolKind::Struct))
                .is_some_and(|(id, _)| class_decl(id))
        }
        Some(_) => call
            .receiver_type
            .as_deref()
            .and_then(|t| symbols.find_type(t))
            .is_some_and(class_decl),
    }
}

/// A source-to-sink path. `reasons[i]` labels the edge from `nodes[i]` to
/// `nodes[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub nodes: Vec<NodeKey>,
    pub reasons: Vec<EdgeReason>,
    pub sink_category: SinkCategory,
}

impl Path {
    pub fn source(&self) -> &NodeKey {
        &self.nodes[0]
    }

    pub fn sink(&self) -> &NodeKey {
        self.nodes.last().expect("paths are non-empty")
    }

    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    pub fn crosses_ffi(&self) -> bool {
        self.reasons.contains(&EdgeReason::FfiLink)
    }
}

/// Breadth-first search from `source` visiting successors in node-key
/// order. Returns each reached node's predecessor and the edge reason used.
pub fn bfs_tree<'g>(
    graph: &'g DataFlowGraph,
    source: &'g NodeKey,
) -> BTreeMap<&'g NodeKey, Option<(&'g NodeKey, EdgeReason)>> {
    let mut parent: BTreeMap<&NodeKey, Option<(&NodeKey, EdgeReason)>> = BTreeMap::new();
    if !graph.contains(source) {
        return parent;
    }
    parent.insert(source, None);
    let mut queue = VecDeque::from([source]);
    while let Some(n) = queue.pop_front() {
        for (m, reasons) in graph.successors(n) {
            if parent.contains_key(m) {
                continue;
            }
            parent.insert(m, Some((n, preferred_reason(&reasons))));
            queue.push_back(m);
        }
    }
    parent
}

fn preferred_reason(reasons: &BTreeSet<EdgeReason>) -> EdgeReason {
    if reasons.contains(&EdgeReason::FfiLink) {
        EdgeReason::FfiLink
    } else {
        *reasons.iter().next().expect("edges carry a reason")
    }
}

/// Path from the root of a [`bfs_tree`] to `sink`, if reached.
pub fn path_from_tree(
    tree: &BTreeMap<&NodeKey, Option<(&NodeKey, EdgeReason)>>,
    sink: &NodeKey,
    category: SinkCategory,
) -> Option<Path> {
    let mut nodes = vec![sink.clone()];
    let mut reasons = Vec::new();
    let mut cur = sink;
    loop {
        match tree.get(cur)? {
            None => break,
            Some((prev, reason)) => {
                nodes.push((*prev).clone());
                reasons.push(*reason);
                cur = prev;
            }
        }
    }
    nodes.reverse();
    reasons.reverse();
    Some(Path {
        nodes,
        reasons,
        sink_category: category,
    })
}

/// Shortest path for every `(source, sink)` pair that is connected and
/// crosses the JNI boundary. A sink's category is the first one marked on
/// it, `BufferAccess` when unmarked.
pub fn find_paths(graph: &DataFlowGraph, sources: &[NodeKey], sinks: &[NodeKey]) -> Vec<Path> {
    let mut sources: Vec<&NodeKey> = sources.iter().collect();
    sources.sort();
    sources.dedup();
    let mut sinks: Vec<&NodeKey> = sinks.iter().collect();
    sinks.sort();
    sinks.dedup();
    let mut out = Vec::new();
    for src in sources {
        let tree = bfs_tree(graph, src);
        for &sink in &sinks {
            let category = graph
                .marks(sink)
                .and_then(|m| m.sinks.iter().next().copied())
                .unwrap_or(SinkCategory::BufferAccess);
            if let Some(path) = path_from_tree(&tree, sink, category) {
                if path.crosses_ffi() {
                    out.push(path);
                }
            }
        }
    }
    out
}

/// Up to `limit` simple paths from `source` to `sink` in order of length
/// (ties in node-key order), skipping paths that do not cross the JNI
/// boundary. Search stops after `expansion_cap` partial paths.
pub fn k_paths(
    graph: &DataFlowGraph,
    source: &NodeKey,
    sink: &NodeKey,
    category: SinkCategory,
    limit: usize,
    expansion_cap: usize,
) -> Vec<Path> {
    let mut out = Vec::new();
    if !graph.contains(source) || limit == 0 {
        return out;
    }
    let mut queue: VecDeque<(Vec<NodeKey>, Vec<EdgeReason>)> = VecDeque::from([(vec![source.clone()], Vec::new())]);
    let mut expanded = 0;
    while let Some((nodes, reasons)) = queue.pop_front() {
        let last = nodes.last().expect("partial paths are non-empty");
        if last == sink {
            let path = Path {
                nodes,
                reasons,
                sink_category: category,
            };
            if path.crosses_ffi() {
                out.push(path);
                if out.len() == limit {
                    break;
                }
            }
            continue;
        }
        expanded += 1;
        if expanded > expansion_cap {
            break;
        }
        for (next, rs) in graph.successors(last) {
            if nodes.contains(next) {
                continue;
            }
            let mut n = nodes.clone();
            n.push(next.clone());
            let mut r = reasons.clone();
            r.push(preferred_reason(&rs));
            queue.push_back((n, r));
        }
    }
    out
}
