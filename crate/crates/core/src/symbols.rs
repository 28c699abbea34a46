//! Project-wide symbol table: classes, structs, their fields and methods,
//! free functions and C/C++ globals.
//!
//! Lookup is purely syntactic. A name resolves against the fields of the
//! context symbol, then its enclosing symbols, then globals; there is no
//! inheritance walk and includes/imports do not narrow the search.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{self, AstNode, AstUnit, Language, NodeKind};
use crate::diagnostics::Diagnostics;

pub type SymbolId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Class,
    Struct,
    Function,
    Field,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeRef {
    Named(String),
    Unresolved,
}

impl TypeRef {
    pub fn named(s: impl Into<String>) -> TypeRef {
        let s = s.into();
        if s.is_empty() {
            TypeRef::Unresolved
        } else {
            TypeRef::Named(s)
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            TypeRef::Named(s) => s,
            TypeRef::Unresolved => "<unresolved>",
        }
    }

    pub fn is_resolved(&self) -> bool {
        matches!(self, TypeRef::Named(_))
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    /// Declared type; `class`/`struct` for type symbols, the return type
    /// for functions.
    pub type_name: TypeRef,
    pub parent: Option<SymbolId>,
    pub qualified_name: String,
    pub file: String,
    pub line: u32,
    /// Parameter count, for functions.
    pub arity: Option<usize>,
    pub has_body: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    by_name: BTreeMap<String, Vec<SymbolId>>,
    by_qualified: BTreeMap<String, SymbolId>,
    diagnostics: Diagnostics,
}

/// Walks every unit and records its classes, structs, fields, methods, free
/// functions and globals. Units are visited in file-name order so the result
/// does not depend on the order they are passed in.
pub fn collect_symbols(units: &[AstUnit]) -> SymbolTable {
    let mut sorted: Vec<&AstUnit> = units.iter().collect();
    sorted.sort_by(|a, b| a.file_name.cmp(&b.file_name));
    let mut table = SymbolTable::default();
    for unit in sorted {
        let prefix = java_package(unit);
        for node in &unit.root {
            table.visit(unit, node, None, &prefix);
        }
    }
    table
}

fn java_package(unit: &AstUnit) -> Vec<String> {
    if unit.language != Language::Java {
        return Vec::new();
    }
    unit.root
        .iter()
        .find(|n| n.is_opaque("package"))
        .and_then(|p| p.child(&NodeKind::Name))
        .map(|n| ast::name_segments(n).into_iter().map(String::from).collect())
        .unwrap_or_default()
}

impl SymbolTable {
    fn visit(&mut self, unit: &AstUnit, node: &AstNode, parent: Option<SymbolId>, prefix: &[String]) {
        match &node.kind {
            NodeKind::Class | NodeKind::Struct => {
                let Some(name) = node.child(&NodeKind::Name).map(ast::terminal_name) else {
                    return;
                };
                let (kind, ty) = if node.is(&NodeKind::Class) {
                    (SymbolKind::Class, "class")
                } else {
                    (SymbolKind::Struct, "struct")
                };
                let id = self.add(
                    unit,
                    name,
                    kind,
                    TypeRef::named(ty),
                    parent,
                    prefix,
                    node.line,
                    None,
                    false,
                );
                let mut inner = prefix.to_vec();
                inner.push(name.to_string());
                for c in &node.children {
                    self.visit(unit, c, Some(id), &inner);
                }
            }
            NodeKind::Function | NodeKind::FunctionDecl => {
                let Some(name_node) = node.child(&NodeKind::Name) else {
                    return;
                };
                let segments = ast::name_segments(name_node);
                let name = segments.last().copied().unwrap_or("");
                if name.is_empty() {
                    return;
                }
                // out-of-line member definition: `void Foo::bar() {}`
                let (owner, path) = if parent.is_none() && segments.len() > 1 {
                    let qual: Vec<String> = segments[..segments.len() - 1].iter().map(|s| s.to_string()).collect();
                    (self.by_qualified.get(&qual.join(".")).copied(), qual)
                } else {
                    (parent, prefix.to_vec())
                };
                let arity = node
                    .child(&NodeKind::ParameterList)
                    .map(|l| {
                        let n = l.children_of(&NodeKind::Parameter).count();
                        let is_void = n == 1
                            && l.children_of(&NodeKind::Parameter).all(|p| {
                                let d = p.child(&NodeKind::Decl).unwrap_or(p);
                                d.child(&NodeKind::Name).is_none()
                                    && d.child(&NodeKind::Type).map(ast::type_string).as_deref() == Some("void")
                            });
                        if is_void {
                            0
                        } else {
                            n
                        }
                    })
                    .unwrap_or(0);
                let ret = node.child(&NodeKind::Type).map(ast::type_string).unwrap_or_default();
                let ret = if ret.is_empty() {
                    TypeRef::named("function")
                } else {
                    TypeRef::named(ret)
                };
                let has_body = node.child(&NodeKind::Block).is_some();
                self.add(
                    unit,
                    name,
                    SymbolKind::Function,
                    ret,
                    owner,
                    &path,
                    node.line,
                    Some(arity),
                    has_body,
                );
            }
            NodeKind::DeclStmt => {
                let kind = if parent.is_some() {
                    SymbolKind::Field
                } else {
                    SymbolKind::Global
                };
                // Java has no globals; a top-level decl_stmt there is a parse artefact
                if kind == SymbolKind::Global && unit.language == Language::Java {
                    return;
                }
                let mut last_type = TypeRef::Unresolved;
                for decl in node.children_of(&NodeKind::Decl) {
                    let ty = decl_type(decl);
                    // `int a, b;` gives b an empty type element
                    let ty = if ty.is_resolved() { ty } else { last_type.clone() };
                    last_type = ty.clone();
                    if let Some(name) = ast::decl_name(decl).map(|n| ast::name_segments(n)[0]) {
                        if !name.is_empty() {
                            self.add(unit, name, kind, ty, parent, prefix, decl.line, None, false);
                        }
                    }
                }
            }
            NodeKind::Block | NodeKind::Opaque(_) => {
                // class bodies, access sections, namespaces, extern blocks
                for c in &node.children {
                    self.visit(unit, c, parent, prefix);
                }
            }
            _ => {}
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn add(
        &mut self,
        unit: &AstUnit,
        name: &str,
        kind: SymbolKind,
        type_name: TypeRef,
        parent: Option<SymbolId>,
        prefix: &[String],
        line: u32,
        arity: Option<usize>,
        has_body: bool,
    ) -> SymbolId {
        let mut qualified: Vec<&str> = prefix.iter().map(String::as_str).collect();
        qualified.push(name);
        let qualified_name = qualified.join(".");
        let id = self.symbols.len();
        self.symbols.push(Symbol {
            name: name.to_string(),
            kind,
            type_name,
            parent,
            qualified_name: qualified_name.clone(),
            file: unit.file_name.clone(),
            line,
            arity,
            has_body,
        });
        self.by_name.entry(name.to_string()).or_default().push(id);
        match self.by_qualified.get(&qualified_name).copied() {
            None => {
                self.by_qualified.insert(qualified_name, id);
            }
            Some(prev) => {
                let old = &self.symbols[prev];
                let new = &self.symbols[id];
                let declaration_pair = old.kind == SymbolKind::Function
                    && new.kind == SymbolKind::Function
                    && old.has_body != new.has_body;
                let overload =
                    old.kind == SymbolKind::Function && new.kind == SymbolKind::Function && old.arity != new.arity;
                if declaration_pair {
                    // prefer the definition over a prototype
                    if new.has_body {
                        self.by_qualified.insert(qualified_name, id);
                    }
                } else if !overload
                    && !(old.kind == new.kind
                        && matches!(old.kind, SymbolKind::Class | SymbolKind::Struct)
                        && old.file == new.file)
                {
                    let msg = format!(
                        "`{qualified_name}` is defined in both {}:{} and {}:{}",
                        old.file, old.line, new.file, new.line
                    );
                    self.diagnostics.note_at("duplicate-symbol", &new.file, new.line, msg);
                }
            }
        }
        id
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols.iter().enumerate()
    }

    pub fn by_name(&self, name: &str) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.by_name
            .get(name)
            .into_iter()
            .flatten()
            .map(|&id| (id, &self.symbols[id]))
    }

    pub fn by_qualified_name(&self, qualified: &str) -> Option<(SymbolId, &Symbol)> {
        self.by_qualified.get(qualified).map(|&id| (id, &self.symbols[id]))
    }

    pub fn qualified_names(&self) -> impl Iterator<Item = &str> {
        self.by_qualified.keys().map(String::as_str)
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Resolves a variable name against `context` (fields first, then the
    /// fields of enclosing types), then globals.
    pub fn resolve_type(&self, name: &str, context: Option<SymbolId>) -> TypeRef {
        self.resolve_member(name, context)
            .map(|id| self.symbols[id].type_name.clone())
            .unwrap_or(TypeRef::Unresolved)
    }

    /// Like [`resolve_type`](Self::resolve_type) but returns the symbol.
    pub fn resolve_member(&self, name: &str, context: Option<SymbolId>) -> Option<SymbolId> {
        let candidates: Vec<SymbolId> = self.by_name.get(name).cloned().unwrap_or_default();
        let mut scope = context;
        let mut guard = 0;
        while let Some(ctx) = scope {
            if let Some(&id) = candidates
                .iter()
                .find(|&&id| self.symbols[id].kind == SymbolKind::Field && self.symbols[id].parent == Some(ctx))
            {
                return Some(id);
            }
            scope = self.symbols[ctx].parent;
            guard += 1;
            if guard > self.symbols.len() {
                break;
            }
        }
        candidates
            .iter()
            .copied()
            .find(|&id| self.symbols[id].kind == SymbolKind::Global)
    }

    /// Finds the class or struct a type string refers to: `JniYuvOperator *`,
    /// `const ns::Foo&` and `com.x.Foo` all resolve by their last segment,
    /// preferring an exact qualified match.
    pub fn find_type(&self, type_name: &str) -> Option<SymbolId> {
        let base = base_type_name(type_name);
        if base.is_empty() {
            return None;
        }
        let dotted = base.replace("::", ".");
        if let Some((id, s)) = self.by_qualified_name(&dotted) {
            if matches!(s.kind, SymbolKind::Class | SymbolKind::Struct) {
                return Some(id);
            }
        }
        let simple = dotted.rsplit('.').next().unwrap_or(&dotted);
        self.by_name(simple)
            .find(|(_, s)| matches!(s.kind, SymbolKind::Class | SymbolKind::Struct))
            .map(|(id, _)| id)
    }

    /// Classes and structs with this simple name.
    pub fn types_named(&self, name: &str) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.by_name(name)
            .filter(|(_, s)| matches!(s.kind, SymbolKind::Class | SymbolKind::Struct))
    }

    /// Methods named `method` declared in the given type.
    pub fn methods_of(&self, ty: SymbolId, method: &str) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.by_name(method)
            .filter(move |(_, s)| s.kind == SymbolKind::Function && s.parent == Some(ty))
    }

    pub fn functions_named(&self, name: &str) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.by_name(name).filter(|(_, s)| s.kind == SymbolKind::Function)
    }
}

fn decl_type(decl: &AstNode) -> TypeRef {
    match decl.child(&NodeKind::Type) {
        Some(t) if t.children.is_empty() && t.token().is_empty() => TypeRef::Unresolved,
        Some(t) => {
            let mut s = ast::type_string(t);
            if decl
                .child(&NodeKind::Name)
                .is_some_and(|n| n.children.iter().any(|c| c.is(&NodeKind::Index)))
            {
                s.push_str("[]");
            }
            TypeRef::named(s)
        }
        None => TypeRef::Unresolved,
    }
}

/// Strips qualifiers, pointers, references, array brackets and template
/// arguments: `const std::vector<int> &` gives `std::vector`.
pub fn base_type_name(type_name: &str) -> String {
    let no_template = match type_name.find('<') {
        Some(i) => &type_name[..i],
        None => type_name,
    };
    no_template
        .split_whitespace()
        .filter(|w| {
            !matches!(
                *w,
                "const" | "volatile" | "struct" | "class" | "unsigned" | "signed" | "final" | "static"
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
        .trim_end_matches(|c: char| c == '*' || c == '&' || c == '[' || c == ']' || c.is_whitespace())
        .to_string()
}
