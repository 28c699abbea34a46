//! Forward slice profiles: one record per variable per function, listing
//! where it is used, which variables its data flows into, which calls
//! receive it, and the integer value it is known to hold.
//!
//! Profiles are keyed by `(file, function, variable)`. Class and struct
//! fields get one profile per declaring type under the function name
//! `#<qualified type>`; C/C++ globals live under `#`. A variable assigned in
//! a function without being declared there, and that is not a field or
//! global, gets an implicit local profile at its first assignment.
//!
//! Each function is sliced in two passes: the first collects every name the
//! function defines, the second records uses, so a use that textually
//! precedes its definition inside a loop is still attributed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::ast::{self, AstNode, AstUnit, FunctionInfo, Language, NodeKind};
use crate::symbols::{SymbolId, SymbolKind, SymbolTable, TypeRef};

/// Reserved function name for C/C++ globals.
pub const GLOBAL_SCOPE: &str = "#";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProfileKey {
    pub file: String,
    pub function: String,
    pub var: String,
}

impl ProfileKey {
    pub fn new(file: impl Into<String>, function: impl Into<String>, var: impl Into<String>) -> Self {
        ProfileKey {
            file: file.into(),
            function: function.into(),
            var: var.into(),
        }
    }

    pub fn is_field_scope(&self) -> bool {
        self.function.starts_with('#')
    }
}

impl fmt::Display for ProfileKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.function, self.var)
    }
}

/// Graph node identity: a profile key plus its definition line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeKey {
    pub file: String,
    pub function: String,
    pub var: String,
    pub line: u32,
}

impl NodeKey {
    pub fn profile_key(&self) -> ProfileKey {
        ProfileKey::new(&self.file, &self.function, &self.var)
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.file, self.function, self.var, self.line)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueInfo {
    IntLiteral(i64),
    BufferSize(u64),
    RefTo(NodeKey),
    Unknown,
}

impl fmt::Display for ValueInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueInfo::IntLiteral(n) => write!(f, "int({n})"),
            ValueInfo::BufferSize(n) => write!(f, "size({n})"),
            ValueInfo::RefTo(k) => write!(f, "ref({k})"),
            ValueInfo::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CFunctionUse {
    /// Last segment of the called name (`GetDirectBufferAddress`).
    pub callee_name: String,
    pub arg_position: usize,
    pub arg_type: String,
    pub call_line: u32,
    pub arg_count: usize,
    /// First segment of a qualified call (`env` in `env->Foo()`).
    pub receiver: Option<String>,
}

/// A value recorded by an assignment (or by a declaration initializer that
/// copies another variable).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValueUpdate {
    pub line: u32,
    pub value: ValueInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProfileKind {
    Parameter { index: usize },
    Local,
    Implicit,
    Field,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceProfile {
    pub file_name: String,
    pub function_name: String,
    pub var_name: String,
    pub language: Language,
    pub kind: ProfileKind,
    pub type_name: TypeRef,
    pub defined_position: u32,
    pub used_positions: Vec<u32>,
    pub dependent_vars: Vec<ProfileKey>,
    pub c_functions: Vec<CFunctionUse>,
    /// Value at the definition.
    pub value: ValueInfo,
    /// Later updates in line order; see [`crate::dataflow::update_value`].
    pub updates: Vec<ValueUpdate>,
}

impl SliceProfile {
    pub fn key(&self) -> ProfileKey {
        ProfileKey::new(&self.file_name, &self.function_name, &self.var_name)
    }

    pub fn node_key(&self) -> NodeKey {
        NodeKey {
            file: self.file_name.clone(),
            function: self.function_name.clone(),
            var: self.var_name.clone(),
            line: self.defined_position,
        }
    }

    /// Value after applying every update, latest line winning.
    pub fn current_value(&self) -> &ValueInfo {
        self.updates.last().map(|u| &u.value).unwrap_or(&self.value)
    }

    fn absorb(&mut self, other: SliceProfile) {
        self.used_positions.extend(other.used_positions);
        self.dependent_vars.extend(other.dependent_vars);
        self.c_functions.extend(other.c_functions);
        self.updates.extend(other.updates);
        if other.kind != ProfileKind::Field && other.kind != ProfileKind::Global {
            return;
        }
        if self.value == ValueInfo::Unknown {
            self.value = other.value;
        }
    }

    fn finish(&mut self) {
        self.used_positions.sort_unstable();
        self.used_positions.dedup();
        let own = self.key();
        self.dependent_vars.retain(|k| k != &own);
        self.dependent_vars.sort();
        self.dependent_vars.dedup();
        self.c_functions.sort();
        self.c_functions.dedup();
        self.updates.sort();
        self.updates.dedup();
    }
}

/// Signature-level facts about each sliced function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSummary {
    pub file: String,
    /// Name used in profile keys (`name@line` for same-file overloads).
    pub name: String,
    pub simple_name: String,
    pub language: Language,
    pub package: Option<String>,
    pub class_path: Vec<String>,
    pub supertypes: Vec<String>,
    pub is_native: bool,
    pub has_body: bool,
    pub line: u32,
    pub last_line: u32,
    pub params: Vec<ProfileKey>,
    pub param_types: Vec<TypeRef>,
    pub return_type: String,
}

impl FunctionSummary {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn qualified_class(&self) -> Option<String> {
        if self.class_path.is_empty() {
            return None;
        }
        let mut parts: Vec<&str> = self.package.iter().map(String::as_str).collect();
        parts.extend(self.class_path.iter().map(String::as_str));
        Some(parts.join("."))
    }
}

/// A call site, kept for source matching.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CallRecord {
    pub file: String,
    pub function: String,
    pub language: Language,
    pub callee_name: String,
    pub receiver: Option<String>,
    /// Declared type of the receiver variable, or the receiver itself when
    /// it names a type (static call).
    pub receiver_type: Option<String>,
    pub line: u32,
    /// Variable receiving the call's result.
    pub target: Option<ProfileKey>,
    /// Variables appearing in each argument.
    pub args: Vec<Vec<ProfileKey>>,
}

/// The project-wide list of profiles plus function and call indexes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SliceProfileMap {
    pub profiles: BTreeMap<ProfileKey, SliceProfile>,
    pub functions: Vec<FunctionSummary>,
    pub calls: Vec<CallRecord>,
}

impl SliceProfileMap {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, key: &ProfileKey) -> Option<&SliceProfile> {
        self.profiles.get(key)
    }

    pub fn get_node(&self, key: &NodeKey) -> Option<&SliceProfile> {
        self.profiles
            .get(&key.profile_key())
            .filter(|p| p.defined_position == key.line)
    }

    pub fn values(&self) -> impl Iterator<Item = &SliceProfile> {
        self.profiles.values()
    }

    pub fn function(&self, file: &str, name: &str) -> Option<&FunctionSummary> {
        self.functions.iter().find(|f| f.file == file && f.name == name)
    }

    /// Profiles of one function (excluding field and global scope).
    pub fn profiles_of<'a>(&'a self, file: &'a str, function: &'a str) -> impl Iterator<Item = &'a SliceProfile> + 'a {
        self.profiles
            .values()
            .filter(move |p| p.file_name == file && p.function_name == function)
    }

    pub fn merge(&mut self, other: SliceProfileMap) {
        for (k, p) in other.profiles {
            match self.profiles.get_mut(&k) {
                Some(existing) => existing.absorb(p),
                None => {
                    self.profiles.insert(k, p);
                }
            }
        }
        self.functions.extend(other.functions);
        self.calls.extend(other.calls);
        self.normalize();
    }

    fn normalize(&mut self) {
        for p in self.profiles.values_mut() {
            p.finish();
        }
        self.functions
            .sort_by(|a, b| (&a.file, a.line, &a.name).cmp(&(&b.file, b.line, &b.name)));
        self.functions.dedup();
        self.calls.sort();
        self.calls.dedup();
    }

    /// One profile per line, fields separated by `|`:
    /// `file|function|var|type|defined|uses|dvars|cfunctions|value`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in self.profiles.values() {
            let uses: Vec<String> = p.used_positions.iter().map(u32::to_string).collect();
            let dvars: Vec<String> = p
                .dependent_vars
                .iter()
                .map(|k| format!("{}.{}", k.function, k.var))
                .collect();
            let cfuncs: Vec<String> = p
                .c_functions
                .iter()
                .map(|c| format!("{}:{}:{}:{}", c.callee_name, c.arg_position, c.arg_type, c.call_line))
                .collect();
            let _ = writeln!(
                out,
                "{}|{}|{}|{}|{}|{}|{}|{}|{}",
                p.file_name,
                p.function_name,
                p.var_name,
                p.type_name,
                p.defined_position,
                uses.join(","),
                dvars.join(";"),
                cfuncs.join(";"),
                p.current_value(),
            );
        }
        out
    }
}

/// Slices every unit and merges the fragments.
pub fn build_all(units: &[AstUnit], symbols: &SymbolTable) -> SliceProfileMap {
    let mut map = SliceProfileMap::default();
    for unit in units {
        map.merge(build_slice_profiles(unit, symbols));
    }
    map
}

/// Slice profiles for one unit. The fragment may contain partial profiles
/// for fields declared in other files; [`SliceProfileMap::merge`] combines
/// them.
pub fn build_slice_profiles(unit: &AstUnit, symbols: &SymbolTable) -> SliceProfileMap {
    let mut map = SliceProfileMap::default();
    for (_, sym) in symbols.iter() {
        if sym.file != unit.file_name {
            continue;
        }
        if let Some(key) = scope_key(symbols, sym_id_of(symbols, sym)) {
            let kind = if sym.kind == SymbolKind::Field {
                ProfileKind::Field
            } else {
                ProfileKind::Global
            };
            map.profiles.insert(
                key.clone(),
                new_profile(
                    &key,
                    unit.language,
                    kind,
                    sym.type_name.clone(),
                    sym.line,
                    field_initial_value(unit, sym.line, &sym.name),
                ),
            );
        }
    }

    let functions = ast::functions_of(unit);
    let mut name_count: BTreeMap<&str, usize> = BTreeMap::new();
    for f in functions.iter().filter(|f| sliced(f)) {
        *name_count.entry(f.name.as_str()).or_default() += 1;
    }
    for f in functions.iter().filter(|f| sliced(f)) {
        let name = if name_count[f.name.as_str()] > 1 {
            format!("{}@{}", f.name, f.line)
        } else {
            f.name.clone()
        };
        FunctionSlicer::new(unit, f, name, symbols, &mut map).run();
    }
    map.normalize();
    map
}

fn sliced(f: &FunctionInfo<'_>) -> bool {
    !f.name.is_empty() && (f.body_present || f.is_native)
}

fn sym_id_of(symbols: &SymbolTable, sym: &crate::symbols::Symbol) -> SymbolId {
    symbols
        .by_name(&sym.name)
        .find(|(_, s)| *s == sym)
        .map(|(id, _)| id)
        .expect("symbol is in its own table")
}

/// Profile key for a field or global symbol; `None` for other kinds.
pub fn scope_key(symbols: &SymbolTable, id: SymbolId) -> Option<ProfileKey> {
    let sym = symbols.get(id);
    match sym.kind {
        SymbolKind::Field => {
            let parent = symbols.get(sym.parent?);
            Some(ProfileKey::new(
                &sym.file,
                format!("#{}", parent.qualified_name),
                &sym.name,
            ))
        }
        SymbolKind::Global => Some(ProfileKey::new(&sym.file, GLOBAL_SCOPE, &sym.name)),
        _ => None,
    }
}

fn field_initial_value(unit: &AstUnit, line: u32, name: &str) -> ValueInfo {
    unit.nodes()
        .filter(|n| n.is(&NodeKind::Decl) && n.line == line)
        .find(|d| ast::decl_name(d).map(|n| ast::name_segments(n)[0]) == Some(name))
        .map(initial_value)
        .unwrap_or(ValueInfo::Unknown)
}

fn new_profile(
    key: &ProfileKey,
    language: Language,
    kind: ProfileKind,
    type_name: TypeRef,
    line: u32,
    value: ValueInfo,
) -> SliceProfile {
    SliceProfile {
        file_name: key.file.clone(),
        function_name: key.function.clone(),
        var_name: key.var.clone(),
        language,
        kind,
        type_name,
        defined_position: line,
        used_positions: Vec::new(),
        dependent_vars: Vec::new(),
        c_functions: Vec::new(),
        value,
        updates: Vec::new(),
    }
}

/// Value a declaration gives its variable: an integer literal initializer,
/// or a buffer size from a literal array extent, an initializer list or a
/// string literal. Anything else is `Unknown`.
pub fn initial_value(decl: &AstNode) -> ValueInfo {
    let init = decl.child(&NodeKind::Init);
    if let Some(name) = ast::decl_name(decl) {
        if let Some(index) = name.children.iter().find(|c| c.is(&NodeKind::Index)) {
            if let Some(n) = index.child(&NodeKind::Expr).and_then(literal_int) {
                return if n >= 0 {
                    ValueInfo::BufferSize(n as u64)
                } else {
                    ValueInfo::Unknown
                };
            }
            if index.child(&NodeKind::Expr).is_none() {
                if let Some(n) = init.and_then(initializer_len) {
                    return ValueInfo::BufferSize(n);
                }
            }
            return ValueInfo::Unknown;
        }
    }
    let Some(expr) = init.and_then(|i| i.child(&NodeKind::Expr)) else {
        return ValueInfo::Unknown;
    };
    if let Some(n) = literal_int(expr) {
        return ValueInfo::IntLiteral(n);
    }
    // Java / C++ `new T[N]`
    if let [op, name] = expr.children.as_slice() {
        if op.is(&NodeKind::Operator) && op.token() == "new" && name.is(&NodeKind::Name) {
            if let Some(n) = name
                .children
                .iter()
                .find(|c| c.is(&NodeKind::Index))
                .and_then(|i| i.child(&NodeKind::Expr))
                .and_then(literal_int)
            {
                if n >= 0 {
                    return ValueInfo::BufferSize(n as u64);
                }
            }
        }
    }
    ValueInfo::Unknown
}

fn initializer_len(init: &AstNode) -> Option<u64> {
    if let Some(list) = init.child(&NodeKind::Block) {
        return Some(list.children_of(&NodeKind::Expr).count() as u64);
    }
    let expr = init.child(&NodeKind::Expr)?;
    match expr.children.as_slice() {
        [lit] if lit.is(&NodeKind::Literal) && lit.type_attr.as_deref() == Some("string") => {
            let text = lit.token();
            let body = text.strip_prefix('"')?.strip_suffix('"')?;
            Some(unescaped_len(body) as u64 + 1)
        }
        _ => None,
    }
}

fn unescaped_len(s: &str) -> usize {
    let mut n = 0;
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            chars.next();
        }
        n += 1;
    }
    n
}

/// Integer value of an expression that is a single (possibly negated)
/// number literal.
pub fn literal_int(expr: &AstNode) -> Option<i64> {
    literal_of(&expr.children)
}

fn literal_of(nodes: &[AstNode]) -> Option<i64> {
    match nodes {
        [lit] if is_number(lit) => parse_int(lit.token()),
        [op, lit] if op.is(&NodeKind::Operator) && op.token() == "-" && is_number(lit) => {
            parse_int(lit.token()).map(|n| -n)
        }
        _ => None,
    }
}

fn is_number(n: &AstNode) -> bool {
    n.is(&NodeKind::Literal) && n.type_attr.as_deref() == Some("number")
}

pub fn parse_int(text: &str) -> Option<i64> {
    let t = text.trim().trim_end_matches(['u', 'U', 'l', 'L']).replace('_', "");
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        return i64::from_str_radix(hex, 16).ok();
    }
    if let Some(bin) = t.strip_prefix("0b").or_else(|| t.strip_prefix("0B")) {
        return i64::from_str_radix(bin, 2).ok();
    }
    if t.len() > 1 && t.starts_with('0') && t.chars().all(|c| c.is_ascii_digit()) {
        return i64::from_str_radix(&t[1..], 8).ok();
    }
    t.parse().ok()
}

/// Calls in `stmt` that pass `var` (by its first name segment) as an
/// argument, one entry per argument position.
pub fn extract_cfunctions(stmt: &AstNode, var: &str, var_type: &str) -> Vec<CFunctionUse> {
    let mut out = Vec::new();
    for call in calls_in(stmt) {
        let args = call_args(call);
        for (i, arg) in args.iter().enumerate() {
            let mentions = plain_refs(arg).contains(&var);
            if mentions {
                out.push(cfunction_use(call, i, args.len(), var_type));
            }
        }
    }
    out
}

fn cfunction_use(call: &AstNode, pos: usize, arg_count: usize, arg_type: &str) -> CFunctionUse {
    let (callee, receiver) = callee_of(call);
    CFunctionUse {
        callee_name: callee,
        arg_position: pos,
        arg_type: arg_type.to_string(),
        call_line: call.line,
        arg_count,
        receiver,
    }
}

/// `(terminal name, first segment if qualified)`.
pub fn callee_of(call: &AstNode) -> (String, Option<String>) {
    let Some(name) = call.child(&NodeKind::Name) else {
        return (String::new(), None);
    };
    let segs = ast::name_segments(name);
    let callee = segs.last().copied().unwrap_or("").to_string();
    let receiver = (segs.len() > 1).then(|| segs[0].to_string());
    (callee, receiver)
}

/// Calls anywhere under `node`, in document order, skipping types.
pub fn calls_in(node: &AstNode) -> Vec<&AstNode> {
    let mut out = Vec::new();
    fn walk<'a>(n: &'a AstNode, out: &mut Vec<&'a AstNode>) {
        if n.is(&NodeKind::Type) {
            return;
        }
        if n.is(&NodeKind::Call) {
            out.push(n);
        }
        for c in &n.children {
            walk(c, out);
        }
    }
    walk(node, &mut out);
    out
}

pub fn call_args(call: &AstNode) -> Vec<&AstNode> {
    call.child(&NodeKind::ArgumentList)
        .map(|l| l.children_of(&NodeKind::Argument).collect())
        .unwrap_or_default()
}

/// Root identifiers referenced in an expression, outside `sizeof` and
/// types, in document order. Called names are not references, but the
/// receiver of a qualified call is.
pub fn plain_refs(node: &AstNode) -> Vec<&str> {
    let mut out = Vec::new();
    fn walk<'a>(n: &'a AstNode, out: &mut Vec<&'a str>) {
        match &n.kind {
            NodeKind::Type | NodeKind::Literal | NodeKind::Operator => {}
            NodeKind::Opaque(t) if t == "sizeof" => {}
            NodeKind::Name => {
                if let Some(first) = ast::name_segments(n).first() {
                    if !first.is_empty() {
                        out.push(first);
                    }
                }
                for c in n.children.iter().filter(|c| c.is(&NodeKind::Index)) {
                    walk(c, out);
                }
            }
            NodeKind::Call => {
                if let Some(name) = n.child(&NodeKind::Name) {
                    let segs = ast::name_segments(name);
                    if segs.len() > 1 {
                        out.push(segs[0]);
                    }
                }
                for c in n.children.iter().filter(|c| !c.is(&NodeKind::Name)) {
                    walk(c, out);
                }
            }
            _ => {
                for c in &n.children {
                    walk(c, out);
                }
            }
        }
    }
    walk(node, &mut out);
    out
}

#[derive(Debug, Clone)]
struct Ref {
    key: ProfileKey,
    line: u32,
    in_sizeof: bool,
}

struct FunctionSlicer<'a, 'm> {
    unit: &'a AstUnit,
    info: &'a FunctionInfo<'a>,
    name: String,
    symbols: &'a SymbolTable,
    class_ctx: Option<SymbolId>,
    locals: BTreeMap<String, ProfileKey>,
    map: &'m mut SliceProfileMap,
}

impl<'a, 'm> FunctionSlicer<'a, 'm> {
    fn new(
        unit: &'a AstUnit,
        info: &'a FunctionInfo<'a>,
        name: String,
        symbols: &'a SymbolTable,
        map: &'m mut SliceProfileMap,
    ) -> Self {
        let class_ctx = info
            .qualified_class_name()
            .and_then(|q| symbols.by_qualified_name(&q))
            .map(|(id, _)| id)
            .or_else(|| {
                info.enclosing_class()
                    .and_then(|c| symbols.types_named(c).next())
                    .map(|(id, _)| id)
            });
        FunctionSlicer {
            unit,
            info,
            name,
            symbols,
            class_ctx,
            locals: BTreeMap::new(),
            map,
        }
    }

    fn run(mut self) {
        let mut params = Vec::new();
        let mut param_types = Vec::new();
        for (i, p) in self.info.parameters.iter().enumerate() {
            if p.name.is_empty() {
                continue;
            }
            let ty = TypeRef::named(p.type_name.clone());
            let key = self.declare(
                &p.name,
                ProfileKind::Parameter { index: i },
                ty.clone(),
                p.line,
                ValueInfo::Unknown,
            );
            params.push(key);
            param_types.push(ty);
        }
        self.map.functions.push(FunctionSummary {
            file: self.unit.file_name.clone(),
            name: self.name.clone(),
            simple_name: self.info.name.clone(),
            language: self.unit.language,
            package: self.info.package.clone(),
            class_path: self.info.class_path.clone(),
            supertypes: self.info.supertypes.clone(),
            is_native: self.info.is_native,
            has_body: self.info.body_present,
            line: self.info.line,
            last_line: self.info.node.last_line(),
            params,
            param_types,
            return_type: self.info.return_type.clone(),
        });
        let Some(body) = self.info.body() else {
            return;
        };
        self.declare_locals(body);
        self.declare_implicit(body);
        self.walk(body);
    }

    fn declare(&mut self, var: &str, kind: ProfileKind, ty: TypeRef, line: u32, value: ValueInfo) -> ProfileKey {
        let key = ProfileKey::new(&self.unit.file_name, &self.name, var);
        if !self.locals.contains_key(var) {
            self.locals.insert(var.to_string(), key.clone());
            self.map.profiles.insert(
                key.clone(),
                new_profile(&key, self.unit.language, kind, ty, line, value),
            );
        }
        key
    }

    fn declare_locals(&mut self, node: &AstNode) {
        for c in &node.children {
            if matches!(c.kind, NodeKind::Function | NodeKind::Class | NodeKind::Struct) {
                continue;
            }
            if c.is(&NodeKind::Decl) {
                self.declare_decl(c);
            }
            self.declare_locals(c);
        }
    }

    fn declare_decl(&mut self, decl: &AstNode) {
        let Some(name) = ast::decl_name(decl).map(|n| ast::name_segments(n)[0]) else {
            return;
        };
        if name.is_empty() || self.locals.contains_key(name) {
            return;
        }
        let ty = decl_type(decl, self.symbols);
        self.declare(name, ProfileKind::Local, ty, decl.line, initial_value(decl));
    }

    fn declare_implicit(&mut self, body: &AstNode) {
        let mut pending: Vec<(String, u32, &AstNode)> = Vec::new();
        for expr in body.descendants().filter(|n| n.is(&NodeKind::Expr)) {
            let Some(split) = expr.children.iter().position(ast::is_assign_op) else {
                continue;
            };
            let Some(target) = expr.children[..split].iter().find(|c| c.is(&NodeKind::Name)) else {
                continue;
            };
            if !target.children.is_empty() {
                continue;
            }
            let var = target.token();
            if var.is_empty() || self.locals.contains_key(var) || pending.iter().any(|(v, _, _)| v == var) {
                continue;
            }
            if self.resolve_outer(var).is_some() {
                continue;
            }
            pending.push((var.to_string(), target.line, expr));
        }
        for (var, line, expr) in pending {
            let ty = self.infer_implicit_type(&var, expr, body);
            self.declare(&var, ProfileKind::Implicit, ty, line, ValueInfo::Unknown);
        }
    }

    /// Type of an undeclared variable: the return type of the project
    /// function whose result it receives, the type of the variable it
    /// copies, or the parameter type of a project function it is passed to.
    fn infer_implicit_type(&self, var: &str, assign: &AstNode, body: &AstNode) -> TypeRef {
        let split = assign.children.iter().position(ast::is_assign_op).unwrap_or(0);
        let rhs = &assign.children[split + 1..];
        match rhs {
            [call] if call.is(&NodeKind::Call) => {
                let (callee, _) = callee_of(call);
                let arity = call_args(call).len();
                let rets: BTreeSet<&TypeRef> = self
                    .symbols
                    .functions_named(&callee)
                    .filter(|(_, s)| s.arity == Some(arity))
                    .map(|(_, s)| &s.type_name)
                    .collect();
                if let [only] = rets.into_iter().collect::<Vec<_>>()[..] {
                    return only.clone();
                }
            }
            [name] if name.is(&NodeKind::Name) && name.children.is_empty() => {
                if let Some(k) = self.locals.get(name.token()) {
                    if let Some(p) = self.map.profiles.get(k) {
                        return p.type_name.clone();
                    }
                }
            }
            _ => {}
        }
        let mut candidates = BTreeSet::new();
        for call in calls_in(body) {
            let (callee, _) = callee_of(call);
            let args = call_args(call);
            for (i, arg) in args.iter().enumerate() {
                let single = arg
                    .child(&NodeKind::Expr)
                    .is_some_and(|e| matches!(e.children.as_slice(), [n] if n.is(&NodeKind::Name) && n.token() == var));
                if !single {
                    continue;
                }
                for f in self.project_functions(&callee, args.len()) {
                    if let Some(t) = f.get(i) {
                        candidates.insert(t.clone());
                    }
                }
            }
        }
        match candidates.len() {
            1 => TypeRef::named(candidates.into_iter().next().unwrap_or_default()),
            _ => TypeRef::Unresolved,
        }
    }

    /// Parameter type lists of project functions with this name and arity,
    /// read from the ASTs.
    fn project_functions(&self, name: &str, arity: usize) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for (_, sym) in self.symbols.functions_named(name) {
            if sym.arity != Some(arity) {
                continue;
            }
            // parameter types live on the AST; look the declaration up in this
            // unit when possible
            if sym.file == self.unit.file_name {
                for f in ast::functions_of(self.unit) {
                    if f.name == name && f.line == sym.line {
                        out.push(f.parameters.iter().map(|p| p.type_name.clone()).collect());
                    }
                }
            }
        }
        out
    }

    /// Field of the enclosing type or a global.
    fn resolve_outer(&self, var: &str) -> Option<ProfileKey> {
        let id = self.symbols.resolve_member(var, self.class_ctx)?;
        scope_key(self.symbols, id)
    }

    fn resolve_var(&self, var: &str) -> Option<ProfileKey> {
        self.locals.get(var).cloned().or_else(|| self.resolve_outer(var))
    }

    fn var_type(&self, key: &ProfileKey) -> TypeRef {
        if let Some(p) = self.map.profiles.get(key) {
            return p.type_name.clone();
        }
        self.symbols
            .by_name(&key.var)
            .find(|(id, _)| scope_key(self.symbols, *id).as_ref() == Some(key))
            .map(|(_, s)| s.type_name.clone())
            .unwrap_or(TypeRef::Unresolved)
    }

    /// Keys referenced by a member path `a.b.c`: the root variable plus
    /// every field that resolves through the declared types.
    fn resolve_path(&self, segs: &[&str]) -> Vec<ProfileKey> {
        let mut out = Vec::new();
        let Some((&root, rest)) = segs.split_first() else {
            return out;
        };
        let mut ty: Option<SymbolId>;
        if root == "this" || root == "super" {
            ty = self.class_ctx;
        } else if let Some(k) = self.resolve_var(root) {
            ty = self.symbols.find_type(self.var_type(&k).as_str());
            out.push(k);
        } else {
            // static member access through a type name
            ty = self.symbols.types_named(root).next().map(|(id, _)| id);
        }
        for seg in rest {
            let Some(t) = ty else { break };
            let Some(field) = self.symbols.resolve_member(seg, Some(t)) else {
                break;
            };
            if let Some(k) = scope_key(self.symbols, field) {
                out.push(k);
            }
            ty = self.symbols.find_type(self.symbols.get(field).type_name.as_str());
        }
        out
    }

    fn collect_refs(&self, node: &AstNode, in_sizeof: bool, out: &mut Vec<Ref>) {
        match &node.kind {
            NodeKind::Type | NodeKind::Literal | NodeKind::Operator => {}
            NodeKind::Opaque(t) if t == "sizeof" => {
                for c in &node.children {
                    self.collect_refs(c, true, out);
                }
            }
            NodeKind::Name => {
                let segs = ast::name_segments(node);
                for key in self.resolve_path(&segs) {
                    out.push(Ref {
                        key,
                        line: node.line,
                        in_sizeof,
                    });
                }
                for c in node.children.iter().filter(|c| c.is(&NodeKind::Index)) {
                    self.collect_refs(c, in_sizeof, out);
                }
            }
            NodeKind::Call => {
                if let Some(name) = node.child(&NodeKind::Name) {
                    let segs = ast::name_segments(name);
                    if segs.len() > 1 {
                        for key in self.resolve_path(&segs[..segs.len() - 1]) {
                            out.push(Ref {
                                key,
                                line: name.line,
                                in_sizeof,
                            });
                        }
                    }
                }
                for c in node.children.iter().filter(|c| !c.is(&NodeKind::Name)) {
                    self.collect_refs(c, in_sizeof, out);
                }
            }
            _ => {
                for c in &node.children {
                    self.collect_refs(c, in_sizeof, out);
                }
            }
        }
    }

    fn refs(&self, nodes: &[AstNode]) -> Vec<Ref> {
        let mut out = Vec::new();
        for n in nodes {
            self.collect_refs(n, false, &mut out);
        }
        out
    }

    fn profile_mut(&mut self, key: &ProfileKey) -> &mut SliceProfile {
        if !self.map.profiles.contains_key(key) {
            // field or global declared in another file
            let line = self
                .symbols
                .by_name(&key.var)
                .find(|(id, _)| scope_key(self.symbols, *id).as_ref() == Some(key))
                .map(|(_, s)| s.line)
                .unwrap_or(1);
            let kind = if key.function == GLOBAL_SCOPE {
                ProfileKind::Global
            } else {
                ProfileKind::Field
            };
            let ty = self.var_type(key);
            let language = self.symbol_language(key);
            self.map.profiles.insert(
                key.clone(),
                new_profile(key, language, kind, ty, line, ValueInfo::Unknown),
            );
        }
        self.map.profiles.get_mut(key).expect("inserted above")
    }

    fn symbol_language(&self, key: &ProfileKey) -> Language {
        if key.file.ends_with(".java") {
            Language::Java
        } else if key.file.ends_with(".c") {
            Language::C
        } else if self.unit.language == Language::Java {
            Language::Java
        } else {
            Language::CPlusPlus
        }
    }

    fn use_refs(&mut self, refs: &[Ref]) {
        for r in refs {
            if r.key.file != self.unit.file_name {
                continue;
            }
            let line = r.line;
            self.profile_mut(&r.key).used_positions.push(line);
        }
    }

    fn add_dvars(&mut self, from: &[Ref], targets: &[ProfileKey]) {
        for r in from.iter().filter(|r| !r.in_sizeof) {
            for t in targets {
                if *t != r.key {
                    let t = t.clone();
                    self.profile_mut(&r.key).dependent_vars.push(t);
                }
            }
        }
    }

    fn record_calls(&mut self, node: &AstNode, target: Option<&ProfileKey>, whole_rhs_call: Option<&AstNode>) {
        for call in calls_in(node) {
            let args = call_args(call);
            let (callee, receiver) = callee_of(call);
            if callee.is_empty() {
                continue;
            }
            let mut arg_keys = Vec::new();
            for (i, arg) in args.iter().enumerate() {
                let mut refs = Vec::new();
                self.collect_refs(arg, false, &mut refs);
                let mut keys: Vec<ProfileKey> = Vec::new();
                for r in refs.iter().filter(|r| !r.in_sizeof) {
                    if keys.contains(&r.key) {
                        continue;
                    }
                    keys.push(r.key.clone());
                    if r.key.is_field_scope() && r.key.file != self.unit.file_name {
                        continue;
                    }
                    let ty = self.var_type(&r.key);
                    let use_ = cfunction_use(call, i, args.len(), ty.as_str());
                    self.profile_mut(&r.key).c_functions.push(use_);
                }
                arg_keys.push(keys);
            }
            let receiver_type = receiver.as_deref().and_then(|r| {
                if let Some(k) = self.resolve_var(r) {
                    Some(self.var_type(&k).as_str().to_string())
                } else if self.symbols.types_named(r).next().is_some() {
                    Some(r.to_string())
                } else {
                    None
                }
            });
            let is_result = whole_rhs_call.is_some_and(|c| std::ptr::eq(c, call));
            self.map.calls.push(CallRecord {
                file: self.unit.file_name.clone(),
                function: self.name.clone(),
                language: self.unit.language,
                callee_name: callee,
                receiver,
                receiver_type,
                line: call.line,
                target: if is_result { target.cloned() } else { None },
                args: arg_keys,
            });
        }
    }

    fn walk(&mut self, node: &AstNode) {
        for c in &node.children {
            match &c.kind {
                NodeKind::Function | NodeKind::Class | NodeKind::Struct => {}
                NodeKind::DeclStmt => {
                    for d in c.children_of(&NodeKind::Decl) {
                        self.process_decl(d);
                    }
                }
                NodeKind::Decl => self.process_decl(c),
                NodeKind::Expr => self.process_expr(c),
                _ => self.walk(c),
            }
        }
    }

    fn process_decl(&mut self, decl: &AstNode) {
        let Some(name_node) = ast::decl_name(decl) else {
            return;
        };
        let var = ast::name_segments(name_node)[0];
        let Some(key) = self.locals.get(var).cloned() else {
            return;
        };
        // array extents: `char buf[n]`
        for idx in name_node.children.iter().filter(|c| c.is(&NodeKind::Index)) {
            let refs = self.refs(std::slice::from_ref(idx));
            self.use_refs(&refs);
        }
        let rhs: Vec<AstNode> = if let Some(init) = decl.child(&NodeKind::Init) {
            init.children.clone()
        } else if let Some(args) = decl.child(&NodeKind::ArgumentList) {
            // constructor-style initialization
            args.children.clone()
        } else {
            return;
        };
        let refs = self.refs(&rhs);
        self.use_refs(&refs);
        self.add_dvars(&refs, std::slice::from_ref(&key));
        let profile = &self.map.profiles[&key];
        let is_redeclaration = profile.defined_position != decl.line;
        let init_expr = decl.child(&NodeKind::Init).and_then(|i| i.child(&NodeKind::Expr));
        if let Some(expr) = init_expr {
            let value = self.rhs_value(&expr.children);
            if is_redeclaration || matches!(value, ValueInfo::RefTo(_)) {
                self.profile_mut(&key)
                    .updates
                    .push(ValueUpdate { line: decl.line, value });
            }
        } else if is_redeclaration {
            self.profile_mut(&key).updates.push(ValueUpdate {
                line: decl.line,
                value: ValueInfo::Unknown,
            });
        }
        let whole = init_expr.and_then(single_call);
        for n in &rhs {
            self.record_calls(n, Some(&key), whole);
        }
    }

    fn process_expr(&mut self, expr: &AstNode) {
        let children = &expr.children;
        let Some(split) = children.iter().position(ast::is_assign_op) else {
            let refs = self.refs(children);
            self.use_refs(&refs);
            self.record_steps(children);
            for n in children {
                self.record_calls(n, None, None);
            }
            return;
        };
        let lhs = &children[..split];
        let rhs = &children[split + 1..];
        let op = children[split].token();
        let target_name = lhs.iter().find(|c| c.is(&NodeKind::Name));
        let targets: Vec<ProfileKey> = target_name
            .map(|n| self.resolve_path(&ast::name_segments(n)))
            .unwrap_or_default();
        let lhs_refs = self.refs(lhs);
        self.use_refs(&lhs_refs);
        let rhs_refs = self.refs(rhs);
        self.use_refs(&rhs_refs);
        self.add_dvars(&rhs_refs, &targets);
        if op != "=" {
            // `x += y` also keeps x's old contents
            let own: Vec<Ref> = lhs_refs.iter().filter(|r| targets.contains(&r.key)).cloned().collect();
            self.add_dvars(&own, &targets);
        }
        if let Some(n) = target_name {
            let simple = n.children.is_empty()
                || ast::name_segments(n).len() == 1 && !n.children.iter().any(|c| c.is(&NodeKind::Index));
            if simple {
                if let Some(key) = targets.first().cloned() {
                    let value = if op == "=" {
                        self.rhs_value(rhs)
                    } else {
                        ValueInfo::Unknown
                    };
                    self.profile_mut(&key).updates.push(ValueUpdate { line: n.line, value });
                }
            }
        }
        self.record_steps(lhs);
        let whole = match rhs {
            [c] if c.is(&NodeKind::Call) => Some(c),
            _ => None,
        };
        let target = if whole.is_some() { targets.last() } else { None };
        for n in lhs {
            self.record_calls(n, None, None);
        }
        for n in rhs {
            self.record_calls(n, target, whole);
        }
    }

    /// `i++` / `--i` update `i` to an unknown value.
    fn record_steps(&mut self, nodes: &[AstNode]) {
        self.record_steps_shallow(nodes);
        for n in nodes {
            for inner in n.descendants().skip(1).filter(|d| d.is(&NodeKind::Expr)) {
                if !inner.children.iter().any(ast::is_assign_op) {
                    self.record_steps_shallow(&inner.children);
                }
            }
        }
    }

    fn record_steps_shallow(&mut self, nodes: &[AstNode]) {
        let step =
            |m: Option<&AstNode>| m.is_some_and(|m| m.is(&NodeKind::Operator) && matches!(m.token(), "++" | "--"));
        for (i, n) in nodes.iter().enumerate() {
            if !n.is(&NodeKind::Name) || !n.children.is_empty() {
                continue;
            }
            if step(nodes.get(i + 1)) || (i > 0 && step(nodes.get(i - 1))) {
                if let Some(key) = self.resolve_var(n.token()) {
                    self.profile_mut(&key).updates.push(ValueUpdate {
                        line: n.line,
                        value: ValueInfo::Unknown,
                    });
                }
            }
        }
    }

    fn rhs_value(&self, rhs: &[AstNode]) -> ValueInfo {
        classify_rhs(rhs, |name| {
            let key = self.resolve_var(name)?;
            let line = self.map.profiles.get(&key).map(|p| p.defined_position).or_else(|| {
                self.symbols
                    .by_name(&key.var)
                    .find(|(id, _)| scope_key(self.symbols, *id).as_ref() == Some(&key))
                    .map(|(_, s)| s.line)
            })?;
            Some(NodeKey {
                file: key.file,
                function: key.function,
                var: key.var,
                line,
            })
        })
    }
}

fn single_call(expr: &AstNode) -> Option<&AstNode> {
    match expr.children.as_slice() {
        [c] if c.is(&NodeKind::Call) => Some(c),
        _ => None,
    }
}

/// Classifies an assignment's right-hand side: a number literal gives
/// `IntLiteral`, a lone variable gives `RefTo` that variable, everything
/// else is `Unknown`.
pub fn classify_rhs(rhs: &[AstNode], resolve: impl Fn(&str) -> Option<NodeKey>) -> ValueInfo {
    let nodes = match rhs {
        [e] if e.is(&NodeKind::Expr) => &e.children[..],
        _ => rhs,
    };
    if let Some(n) = literal_of(nodes) {
        return ValueInfo::IntLiteral(n);
    }
    match nodes {
        [name] if name.is(&NodeKind::Name) && name.children.is_empty() => resolve(name.token())
            .map(ValueInfo::RefTo)
            .unwrap_or(ValueInfo::Unknown),
        _ => ValueInfo::Unknown,
    }
}

fn decl_type(decl: &AstNode, _symbols: &SymbolTable) -> TypeRef {
    let Some(t) = decl.child(&NodeKind::Type) else {
        return TypeRef::Unresolved;
    };
    let mut s = ast::type_string(t);
    if s == "auto" || s == "var" {
        return TypeRef::Unresolved;
    }
    if decl
        .child(&NodeKind::Name)
        .is_some_and(|n| n.children.iter().any(|c| c.is(&NodeKind::Index)))
    {
        s.push_str("[]");
    }
    TypeRef::named(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_literals_parse_in_common_bases() {
        assert_eq!(parse_int("10"), Some(10));
        assert_eq!(parse_int("0x1F"), Some(31));
        assert_eq!(parse_int("010"), Some(8));
        assert_eq!(parse_int("42u"), Some(42));
        assert_eq!(parse_int("100L"), Some(100));
        assert_eq!(parse_int("1.5"), None);
    }

    #[test]
    fn string_initializer_length_counts_terminator() {
        assert_eq!(unescaped_len("ab\\n"), 3);
    }
}
