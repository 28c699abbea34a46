//! In-memory model of srcML ASTs.
//!
//! srcML renders Java, C and C++ with one shared element vocabulary
//! (`class`, `function`, `decl_stmt`, `expr`, `call`, `index`, ...), which is
//! what lets the rest of the pipeline treat both sides of a JNI boundary the
//! same way. Only the elements the analysis consults get a dedicated
//! [`NodeKind`]; everything else is kept as [`NodeKind::Opaque`] so traversal
//! still reaches the code inside it.
//!
//! Two position encodings are accepted:
//!
//! * srcML 1.x: `pos:start="LINE:COL"` (plus `pos:end`, ignored)
//! * srcML 0.9.x: `pos:line="LINE"` and `pos:column="COL"`
//!
//! Elements without their own position inherit the line of their parent. A
//! unit in which no element carries a position is rejected.

use std::fmt;

use quick_xml::events::{BytesStart, Event};
use quick_xml::reader::Reader;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    Java,
    C,
    CPlusPlus,
}

impl Language {
    /// Maps the value of a srcML `language` attribute.
    pub fn from_srcml(value: &str) -> Option<Self> {
        match value {
            "Java" => Some(Language::Java),
            "C" => Some(Language::C),
            "C++" => Some(Language::CPlusPlus),
            _ => None,
        }
    }

    pub fn is_native(self) -> bool {
        matches!(self, Language::C | Language::CPlusPlus)
    }

    /// Java and C/C++ form two families; calls never resolve across them
    /// except through JNI linking.
    pub fn same_family(self, other: Language) -> bool {
        self.is_native() == other.is_native()
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Java => "Java",
            Language::C => "C",
            Language::CPlusPlus => "C++",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Class,
    Struct,
    Function,
    FunctionDecl,
    ParameterList,
    Parameter,
    DeclStmt,
    Decl,
    ExprStmt,
    Expr,
    Call,
    ArgumentList,
    Argument,
    Block,
    IfStmt,
    Condition,
    ForLoop,
    WhileLoop,
    Index,
    Name,
    Literal,
    Operator,
    Specifier,
    Init,
    Type,
    /// Any element the analysis does not model; the tag is kept verbatim.
    Opaque(String),
}

impl NodeKind {
    fn from_tag(tag: &str) -> NodeKind {
        match tag {
            "class" | "interface" | "enum" => NodeKind::Class,
            "struct" | "union" => NodeKind::Struct,
            "function" | "constructor" | "destructor" => NodeKind::Function,
            "function_decl" | "constructor_decl" | "destructor_decl" => NodeKind::FunctionDecl,
            "parameter_list" => NodeKind::ParameterList,
            "parameter" => NodeKind::Parameter,
            "decl_stmt" => NodeKind::DeclStmt,
            "decl" => NodeKind::Decl,
            "expr_stmt" => NodeKind::ExprStmt,
            "expr" => NodeKind::Expr,
            "call" => NodeKind::Call,
            "argument_list" => NodeKind::ArgumentList,
            "argument" => NodeKind::Argument,
            "block" => NodeKind::Block,
            "if_stmt" | "if" => NodeKind::IfStmt,
            "condition" => NodeKind::Condition,
            "for" => NodeKind::ForLoop,
            "while" => NodeKind::WhileLoop,
            "index" => NodeKind::Index,
            "name" => NodeKind::Name,
            "literal" => NodeKind::Literal,
            "operator" => NodeKind::Operator,
            "specifier" => NodeKind::Specifier,
            "init" => NodeKind::Init,
            "type" => NodeKind::Type,
            other => NodeKind::Opaque(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub kind: NodeKind,
    /// Element name as it appeared in the XML (qualified for prefixed tags).
    pub tag: String,
    pub line: u32,
    pub column: u32,
    /// Text content, only for elements without element children.
    pub text: Option<String>,
    /// Value of the srcML `type` attribute (`number` on literals, `generic`
    /// on template argument lists, `pseudo` on brace-less blocks, ...).
    pub type_attr: Option<String>,
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn is(&self, kind: &NodeKind) -> bool {
        &self.kind == kind
    }

    pub fn is_opaque(&self, tag: &str) -> bool {
        matches!(&self.kind, NodeKind::Opaque(t) if t == tag)
    }

    pub fn token(&self) -> &str {
        self.text.as_deref().unwrap_or("")
    }

    pub fn child(&self, kind: &NodeKind) -> Option<&AstNode> {
        self.children.iter().find(|c| c.is(kind))
    }

    pub fn children_of<'a>(&'a self, kind: &'a NodeKind) -> impl Iterator<Item = &'a AstNode> + 'a {
        self.children.iter().filter(move |c| c.is(kind))
    }

    /// Pre-order traversal including `self`.
    pub fn descendants(&self) -> Descendants<'_> {
        Descendants { stack: vec![self] }
    }

    /// Largest line number in this subtree.
    pub fn last_line(&self) -> u32 {
        self.descendants().map(|n| n.line).max().unwrap_or(self.line)
    }

    pub fn contains_line(&self, line: u32) -> bool {
        self.line <= line && line <= self.last_line()
    }
}

pub struct Descendants<'a> {
    stack: Vec<&'a AstNode>,
}

impl<'a> Iterator for Descendants<'a> {
    type Item = &'a AstNode;

    fn next(&mut self) -> Option<&'a AstNode> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstUnit {
    pub file_name: String,
    pub language: Language,
    pub root: Vec<AstNode>,
}

impl AstUnit {
    pub fn nodes(&self) -> impl Iterator<Item = &AstNode> {
        self.root.iter().flat_map(|n| n.descendants())
    }

    pub fn functions(&self) -> Vec<FunctionInfo<'_>> {
        functions_of(self)
    }
}

/// Result of reading an archive: supported units plus `(filename, language)`
/// of units written in languages the analysis does not handle.
#[derive(Debug, Default)]
pub struct SrcmlArchive {
    pub units: Vec<AstUnit>,
    pub skipped: Vec<(String, String)>,
}

pub fn parse_srcml_archive(xml: &[u8]) -> Result<Vec<AstUnit>> {
    read_archive(xml).map(|a| a.units)
}

/// Parses a srcML document: either an archive (a root `unit` holding
/// per-file `unit` elements) or a single-file unit.
pub fn read_archive(xml: &[u8]) -> Result<SrcmlArchive> {
    let root = parse_xml(xml)?;
    if local_tag(&root.name) != "unit" {
        return Err(Error::Xml {
            offset: 0,
            message: format!("expected a <unit> root element, found <{}>", root.name),
        });
    }
    let mut archive = SrcmlArchive::default();
    let nested: Vec<&RawElem> = root.children.iter().filter(|c| c.name == "unit").collect();
    if !nested.is_empty() {
        for unit in nested {
            convert_unit(unit, &mut archive)?;
        }
    } else if root.attr("language").is_some() {
        convert_unit(&root, &mut archive)?;
    }
    Ok(archive)
}

fn local_tag(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

fn convert_unit(unit: &RawElem, archive: &mut SrcmlArchive) -> Result<()> {
    let language = unit
        .attr("language")
        .ok_or(Error::MissingAttribute { attribute: "language" })?;
    let file_name = unit
        .attr("filename")
        .filter(|f| !f.is_empty())
        .ok_or(Error::MissingAttribute { attribute: "filename" })?;
    let Some(lang) = Language::from_srcml(language) else {
        archive.skipped.push((file_name.to_string(), language.to_string()));
        return Ok(());
    };
    let mut saw_position = false;
    let root: Vec<AstNode> = unit
        .children
        .iter()
        .map(|c| convert_node(c, 1, 1, &mut saw_position))
        .collect();
    if !root.is_empty() && !saw_position {
        return Err(Error::MissingPositions {
            file: file_name.to_string(),
        });
    }
    archive.units.push(AstUnit {
        file_name: file_name.to_string(),
        language: lang,
        root,
    });
    Ok(())
}

fn convert_node(raw: &RawElem, parent_line: u32, parent_col: u32, saw: &mut bool) -> AstNode {
    let (line, column) = match raw.position() {
        Some(pos) => {
            *saw = true;
            pos
        }
        None => (parent_line, parent_col),
    };
    let children: Vec<AstNode> = raw
        .children
        .iter()
        .map(|c| convert_node(c, line, column, saw))
        .collect();
    let text = children.is_empty().then(|| raw.text.clone());
    let kind = if raw.name.contains(':') {
        NodeKind::Opaque(raw.name.clone())
    } else {
        NodeKind::from_tag(&raw.name)
    };
    AstNode {
        kind,
        tag: raw.name.clone(),
        line,
        column,
        text,
        type_attr: raw.attr("type").map(str::to_string),
        children,
    }
}

#[derive(Debug)]
struct RawElem {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<RawElem>,
    text: String,
}

impl RawElem {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn position(&self) -> Option<(u32, u32)> {
        if let Some(start) = self.attr("pos:start") {
            let (l, c) = start.split_once(':')?;
            let line = l.trim().parse().ok().filter(|&l: &u32| l >= 1)?;
            return Some((line, c.trim().parse().unwrap_or(1)));
        }
        let line = self.attr("pos:line")?.trim().parse().ok().filter(|&l: &u32| l >= 1)?;
        let col = self.attr("pos:column").and_then(|c| c.trim().parse().ok()).unwrap_or(1);
        Some((line, col))
    }
}

fn start_elem(e: &BytesStart<'_>, reader: &Reader<&[u8]>) -> Result<RawElem> {
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    let mut attrs = Vec::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::Xml {
            offset: reader.buffer_position(),
            message: err.to_string(),
        })?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .decode_and_unescape_value(reader.decoder())
            .map_err(|err| Error::Xml {
                offset: reader.buffer_position(),
                message: err.to_string(),
            })?
            .into_owned();
        attrs.push((key, value));
    }
    Ok(RawElem {
        name,
        attrs,
        children: Vec::new(),
        text: String::new(),
    })
}

fn parse_xml(xml: &[u8]) -> Result<RawElem> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().trim_text(false);
    let mut stack: Vec<RawElem> = Vec::new();
    let mut root: Option<RawElem> = None;
    loop {
        let event = reader.read_event().map_err(|err| Error::Xml {
            offset: reader.error_position(),
            message: err.to_string(),
        })?;
        match event {
            Event::Start(e) => {
                if root.is_some() && stack.is_empty() {
                    return Err(Error::Xml {
                        offset: reader.buffer_position(),
                        message: "content after the root element".into(),
                    });
                }
                stack.push(start_elem(&e, &reader)?);
            }
            Event::Empty(e) => {
                let elem = start_elem(&e, &reader)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(elem),
                    None if root.is_none() => root = Some(elem),
                    None => {
                        return Err(Error::Xml {
                            offset: reader.buffer_position(),
                            message: "content after the root element".into(),
                        })
                    }
                }
            }
            Event::End(_) => {
                let elem = stack.pop().ok_or_else(|| Error::Xml {
                    offset: reader.buffer_position(),
                    message: "unbalanced closing tag".into(),
                })?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(elem),
                    None => root = Some(elem),
                }
            }
            Event::Text(t) => {
                let text = t.unescape().map_err(|err| Error::Xml {
                    offset: reader.buffer_position(),
                    message: err.to_string(),
                })?;
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(&text);
                } else if !text.trim().is_empty() {
                    return Err(Error::Xml {
                        offset: reader.buffer_position(),
                        message: "text outside the root element".into(),
                    });
                }
            }
            Event::CData(t) => {
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(Error::Xml {
            offset: xml.len() as u64,
            message: format!("unexpected end of document inside <{}>", open.name),
        });
    }
    root.ok_or_else(|| Error::Xml {
        offset: xml.len() as u64,
        message: "document has no root element".into(),
    })
}

// ---------------------------------------------------------------------------
// Names and types

/// Identifier segments of a (possibly compound) name, skipping operators,
/// index expressions and template arguments: `a->b.c[i]` gives `[a, b, c]`.
pub fn name_segments(name: &AstNode) -> Vec<&str> {
    if name.children.is_empty() {
        return vec![name.token()];
    }
    name.children
        .iter()
        .filter(|c| c.is(&NodeKind::Name))
        .flat_map(name_segments)
        .collect()
}

pub fn terminal_name(name: &AstNode) -> &str {
    name_segments(name).last().copied().unwrap_or("")
}

/// Source-like rendering of a name (`env->GetDirectBufferAddress`, `byte[]`).
pub fn name_string(name: &AstNode) -> String {
    if name.children.is_empty() {
        return name.token().to_string();
    }
    let mut out = String::new();
    for c in &name.children {
        match &c.kind {
            NodeKind::Name => out.push_str(&name_string(c)),
            NodeKind::Operator => out.push_str(c.token()),
            NodeKind::Index => out.push_str("[]"),
            NodeKind::ArgumentList => {
                let args: Vec<String> = c
                    .children_of(&NodeKind::Argument)
                    .map(|a| join_type_parts(a.descendants().skip(1).filter(|n| n.text.is_some())))
                    .collect();
                out.push('<');
                out.push_str(&args.join(","));
                out.push('>');
            }
            _ => {}
        }
    }
    out
}

fn join_type_parts<'a>(parts: impl Iterator<Item = &'a AstNode>) -> String {
    let mut out = String::new();
    for p in parts {
        let t = p.token();
        let needs_space = out.chars().last().is_some_and(|c| c.is_alphanumeric() || c == '_')
            && t.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_');
        if needs_space {
            out.push(' ');
        }
        out.push_str(t);
    }
    out
}

/// Renders a `type` element without specifiers: `const char *` gives `char*`,
/// `std::vector<unsigned char>` is kept as written.
pub fn type_string(ty: &AstNode) -> String {
    let mut out = String::new();
    for c in &ty.children {
        let part = match &c.kind {
            NodeKind::Specifier => continue,
            // JNI linkage macros carry no type information
            NodeKind::Name if matches!(c.token(), "JNIEXPORT" | "JNICALL" | "JNIIMPORT") => continue,
            NodeKind::Name => name_string(c),
            _ if c.text.is_some() => c.token().to_string(),
            _ => continue,
        };
        let needs_space = out
            .chars()
            .last()
            .is_some_and(|ch| ch.is_alphanumeric() || ch == '_' || ch == '>')
            && part.chars().next().is_some_and(|ch| ch.is_alphanumeric() || ch == '_');
        if needs_space {
            out.push(' ');
        }
        out.push_str(&part);
    }
    out
}

fn specifiers(node: &AstNode) -> impl Iterator<Item = &str> {
    let direct = node.children_of(&NodeKind::Specifier).map(AstNode::token);
    let in_type = node
        .child(&NodeKind::Type)
        .into_iter()
        .flat_map(|t| t.children_of(&NodeKind::Specifier).map(AstNode::token));
    direct.chain(in_type)
}

/// The declared name of a `decl`: its name child, with any array extent.
pub fn decl_name(decl: &AstNode) -> Option<&AstNode> {
    decl.child(&NodeKind::Name)
}

// ---------------------------------------------------------------------------
// Functions

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: String,
    pub type_name: String,
    pub line: u32,
}

#[derive(Debug, Clone)]
pub struct FunctionInfo<'a> {
    pub name: String,
    pub package: Option<String>,
    /// Enclosing classes, outermost first. For out-of-line C++ definitions
    /// (`void Foo::bar()`) the qualifier segments are used.
    pub class_path: Vec<String>,
    /// Names in the enclosing class's `extends`/`implements` clauses.
    pub supertypes: Vec<String>,
    pub parameters: Vec<ParamInfo>,
    pub return_type: String,
    pub is_native: bool,
    pub body_present: bool,
    pub unit: &'a AstUnit,
    pub node: &'a AstNode,
    pub line: u32,
}

impl<'a> FunctionInfo<'a> {
    pub fn qualified_class_name(&self) -> Option<String> {
        if self.class_path.is_empty() {
            return None;
        }
        let mut parts: Vec<&str> = Vec::new();
        if let Some(pkg) = &self.package {
            parts.push(pkg);
        }
        parts.extend(self.class_path.iter().map(String::as_str));
        Some(parts.join("."))
    }

    /// JVM binary class name without the package (`Outer$Inner`).
    pub fn binary_class_name(&self) -> String {
        self.class_path.join("$")
    }

    pub fn enclosing_class(&self) -> Option<&str> {
        self.class_path.last().map(String::as_str)
    }

    pub fn body(&self) -> Option<&'a AstNode> {
        self.node.child(&NodeKind::Block)
    }
}

pub fn functions_of(unit: &AstUnit) -> Vec<FunctionInfo<'_>> {
    let package = (unit.language == Language::Java)
        .then(|| {
            unit.root
                .iter()
                .find(|n| n.is_opaque("package"))
                .and_then(|p| p.child(&NodeKind::Name))
                .map(|n| name_segments(n).join("."))
        })
        .flatten();
    let mut out = Vec::new();
    let mut classes = Vec::new();
    let mut supers = Vec::new();
    for node in &unit.root {
        collect_functions(unit, node, &package, (&mut classes, &mut supers), &mut out);
    }
    out
}

fn collect_functions<'a>(
    unit: &'a AstUnit,
    node: &'a AstNode,
    package: &Option<String>,
    (classes, supers): (&mut Vec<String>, &mut Vec<Vec<String>>),
    out: &mut Vec<FunctionInfo<'a>>,
) {
    match &node.kind {
        NodeKind::Class | NodeKind::Struct => {
            let name = node
                .child(&NodeKind::Name)
                .map(|n| terminal_name(n).to_string())
                .unwrap_or_default();
            let names = node
                .children
                .iter()
                .filter(|c| c.is_opaque("super_list"))
                .flat_map(|c| c.descendants())
                .filter(|d| d.is(&NodeKind::Name))
                .map(|d| terminal_name(d).to_string())
                .filter(|n| !n.is_empty())
                .collect();
            classes.push(name);
            supers.push(names);
            for c in &node.children {
                collect_functions(unit, c, package, (classes, supers), out);
            }
            classes.pop();
            supers.pop();
        }
        NodeKind::Function | NodeKind::FunctionDecl => {
            let mut info = function_info(unit, node, package, classes);
            info.supertypes = supers.last().cloned().unwrap_or_default();
            out.push(info);
        }
        // statements never hold declarations we report
        NodeKind::DeclStmt | NodeKind::ExprStmt => {}
        _ => {
            for c in &node.children {
                collect_functions(unit, c, package, (classes, supers), out);
            }
        }
    }
}

fn function_info<'a>(
    unit: &'a AstUnit,
    node: &'a AstNode,
    package: &Option<String>,
    classes: &[String],
) -> FunctionInfo<'a> {
    let name_node = node.child(&NodeKind::Name);
    let segments = name_node.map(name_segments).unwrap_or_default();
    let name = segments.last().copied().unwrap_or("").to_string();
    let mut class_path = classes.to_vec();
    if class_path.is_empty() && segments.len() > 1 {
        class_path = segments[..segments.len() - 1].iter().map(|s| s.to_string()).collect();
    }
    let parameters = node
        .child(&NodeKind::ParameterList)
        .map(parameters_of)
        .unwrap_or_default();
    let is_native = unit.language == Language::Java && specifiers(node).any(|s| s == "native");
    FunctionInfo {
        name,
        package: package.clone(),
        class_path,
        supertypes: Vec::new(),
        parameters,
        return_type: node.child(&NodeKind::Type).map(type_string).unwrap_or_default(),
        is_native,
        body_present: node.child(&NodeKind::Block).is_some(),
        unit,
        node,
        line: node.line,
    }
}

fn parameters_of(list: &AstNode) -> Vec<ParamInfo> {
    let params: Vec<ParamInfo> = list
        .children_of(&NodeKind::Parameter)
        .map(|p| {
            let decl = p.child(&NodeKind::Decl).unwrap_or(p);
            let name = decl_name(decl)
                .map(|n| name_segments(n).first().copied().unwrap_or("").to_string())
                .unwrap_or_default();
            let type_name = decl.child(&NodeKind::Type).map(type_string).unwrap_or_default();
            ParamInfo {
                name,
                type_name,
                line: decl.line,
            }
        })
        .collect();
    // `f(void)` declares no parameters
    if params.len() == 1 && params[0].name.is_empty() && params[0].type_name == "void" {
        return Vec::new();
    }
    params
}

// ---------------------------------------------------------------------------
// Statements and index accesses

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccessMode {
    Read,
    Write,
}

#[derive(Debug, Clone)]
pub struct IndexAccess<'a> {
    /// Root variable of the indexed expression (`obj` in `obj->buf[i]`).
    pub buffer: String,
    /// The indexed expression as written (`obj->buf`).
    pub buffer_path: String,
    pub index: &'a AstNode,
    pub mode: AccessMode,
    pub line: u32,
}

pub const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="];

pub fn is_assign_op(node: &AstNode) -> bool {
    node.is(&NodeKind::Operator) && ASSIGN_OPS.contains(&node.token())
}

/// Is `node` a statement that [`statement_parts`] can split?
pub fn is_statement(node: &AstNode) -> bool {
    matches!(
        node.kind,
        NodeKind::ExprStmt | NodeKind::DeclStmt | NodeKind::IfStmt | NodeKind::ForLoop | NodeKind::WhileLoop
    ) || node.is_opaque("return")
        || node.is_opaque("do")
}

/// The expression-bearing parts of a statement, excluding nested bodies:
/// the whole node for simple statements, the condition for `if`/`while`,
/// the control header for `for`.
pub fn statement_parts(stmt: &AstNode) -> Vec<&AstNode> {
    match &stmt.kind {
        NodeKind::IfStmt => {
            if stmt.tag == "if_stmt" {
                stmt.children
                    .iter()
                    .filter(|c| c.is(&NodeKind::IfStmt))
                    .filter_map(|c| c.child(&NodeKind::Condition))
                    .collect()
            } else {
                stmt.child(&NodeKind::Condition).into_iter().collect()
            }
        }
        NodeKind::WhileLoop => stmt.child(&NodeKind::Condition).into_iter().collect(),
        NodeKind::ForLoop => stmt
            .children
            .iter()
            .find(|c| c.is_opaque("control"))
            .map(|c| c.children.iter().collect())
            .unwrap_or_default(),
        NodeKind::Opaque(t) if t == "do" => stmt.child(&NodeKind::Condition).into_iter().collect(),
        _ => vec![stmt],
    }
}

pub fn index_accesses_of(stmt: &AstNode) -> Vec<IndexAccess<'_>> {
    let mut out = Vec::new();
    for part in statement_parts(stmt) {
        scan_accesses(part, false, &mut out);
    }
    out
}

fn scan_accesses<'a>(node: &'a AstNode, in_target: bool, out: &mut Vec<IndexAccess<'a>>) {
    match &node.kind {
        NodeKind::Type => {}
        NodeKind::Decl => {
            // the declared name's extent (`char buf[10]`) is not an access
            for c in &node.children {
                if !c.is(&NodeKind::Name) && !c.is(&NodeKind::Type) {
                    scan_accesses(c, false, out);
                }
            }
        }
        NodeKind::Expr | NodeKind::Init | NodeKind::Condition | NodeKind::Argument => {
            let split = node.children.iter().position(is_assign_op);
            for (i, c) in node.children.iter().enumerate() {
                let target = match split {
                    Some(s) => i < s,
                    None => false,
                };
                let stepped = is_stepped(&node.children, i);
                scan_accesses(c, target || stepped, out);
            }
        }
        NodeKind::Name => scan_name(node, in_target, out),
        _ => {
            for c in &node.children {
                scan_accesses(c, false, out);
            }
        }
    }
}

/// `a[i]++` and `--a[i]` write their operand.
fn is_stepped(siblings: &[AstNode], i: usize) -> bool {
    let step = |n: Option<&AstNode>| n.is_some_and(|n| n.is(&NodeKind::Operator) && matches!(n.token(), "++" | "--"));
    siblings[i].is(&NodeKind::Name) && (step(siblings.get(i + 1)) || (i > 0 && step(siblings.get(i - 1))))
}

fn scan_name<'a>(name: &'a AstNode, in_target: bool, out: &mut Vec<IndexAccess<'a>>) {
    let mut prefix: Vec<&AstNode> = Vec::new();
    let mut indexes = Vec::new();
    for c in &name.children {
        if c.is(&NodeKind::Index) {
            if let Some(expr) = c.child(&NodeKind::Expr) {
                let root = prefix
                    .iter()
                    .find(|p| p.is(&NodeKind::Name))
                    .map(|p| name_segments(p)[0].to_string())
                    .unwrap_or_default();
                let path: String = prefix
                    .iter()
                    .map(|p| match p.kind {
                        NodeKind::Name => name_string(p),
                        _ => p.token().to_string(),
                    })
                    .collect();
                out.push(IndexAccess {
                    buffer: root,
                    buffer_path: path,
                    index: expr,
                    mode: if in_target { AccessMode::Write } else { AccessMode::Read },
                    line: c.line,
                });
                indexes.push(expr);
            }
        }
        prefix.push(c);
    }
    for expr in indexes {
        scan_accesses(expr, false, out);
    }
}
