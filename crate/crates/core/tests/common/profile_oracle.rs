//! Profile keys found by walking the AST directly: fields, globals,
//! parameters, declared locals and locals introduced by assignment.

use std::collections::{BTreeMap, BTreeSet};

use jniflow::ast::{self, AstNode, AstUnit, Language, NodeKind};

/// Every `(file, function, variable)` a slice profile should exist for.
pub fn expected_profile_keys(units: &[AstUnit]) -> BTreeSet<(String, String, String)> {
    Oracle::run(units)
}

fn unit_root(u: &AstUnit) -> AstNode {
    AstNode {
        kind: NodeKind::Opaque("root".into()),
        tag: "root".into(),
        line: 1,
        column: 1,
        text: None,
        type_attr: None,
        children: u.root.clone(),
    }
}

#[derive(Default)]
struct Oracle {
    /// Field names per class, keyed by the class path.
    fields: BTreeMap<Vec<String>, BTreeSet<String>>,
    globals: BTreeSet<String>,
    keys: BTreeSet<(String, String, String)>,
}

fn declared_name(decl: &AstNode) -> Option<String> {
    let name = decl.children.iter().find(|c| c.is(&NodeKind::Name))?;
    let first = if name.children.is_empty() {
        name.token().to_string()
    } else {
        name.children
            .iter()
            .find(|c| c.is(&NodeKind::Name))?
            .token()
            .to_string()
    };
    (!first.is_empty()).then_some(first)
}

fn class_name(node: &AstNode) -> String {
    node.children
        .iter()
        .find(|c| c.is(&NodeKind::Name))
        .map(|n| n.token().to_string())
        .unwrap_or_default()
}

impl Oracle {
    fn scan_members(&mut self, unit: &AstUnit, node: &AstNode, class: &mut Vec<String>) {
        for c in &node.children {
            match &c.kind {
                NodeKind::Class | NodeKind::Struct => {
                    class.push(class_name(c));
                    self.scan_members(unit, c, class);
                    class.pop();
                }
                NodeKind::Function | NodeKind::FunctionDecl => {}
                NodeKind::DeclStmt => {
                    for d in c.children.iter().filter(|d| d.is(&NodeKind::Decl)) {
                        let Some(n) = declared_name(d) else { continue };
                        if !class.is_empty() {
                            self.fields.entry(class.clone()).or_default().insert(n.clone());
                            let key = format!("#{}", qualified(unit, class));
                            self.keys.insert((unit.file_name.clone(), key, n));
                        } else if unit.language != Language::Java {
                            self.globals.insert(n.clone());
                            self.keys.insert((unit.file_name.clone(), "#".into(), n));
                        }
                    }
                }
                _ => self.scan_members(unit, c, class),
            }
        }
    }

    fn scan_functions(node: &AstNode, class: &mut Vec<String>, out: &mut Vec<(Vec<String>, AstNode)>) {
        for c in &node.children {
            match &c.kind {
                NodeKind::Class | NodeKind::Struct => {
                    class.push(class_name(c));
                    Self::scan_functions(c, class, out);
                    class.pop();
                }
                NodeKind::Function | NodeKind::FunctionDecl => out.push((class.clone(), c.clone())),
                NodeKind::DeclStmt | NodeKind::ExprStmt => {}
                _ => Self::scan_functions(c, class, out),
            }
        }
    }

    fn run(units: &[AstUnit]) -> BTreeSet<(String, String, String)> {
        let mut o = Oracle::default();
        for u in units {
            o.scan_members(u, &unit_root(u), &mut Vec::new());
        }
        for u in units {
            let mut fns = Vec::new();
            Self::scan_functions(&unit_root(u), &mut Vec::new(), &mut fns);
            let sliced: Vec<&(Vec<String>, AstNode)> = fns
                .iter()
                .filter(|(_, f)| {
                    let body = f.children.iter().any(|c| c.is(&NodeKind::Block));
                    let native = u.language == Language::Java && has_native(f);
                    !fn_name(f).is_empty() && (body || native)
                })
                .collect();
            let mut count: BTreeMap<String, usize> = BTreeMap::new();
            for (_, f) in &sliced {
                *count.entry(fn_name(f)).or_default() += 1;
            }
            for (class, f) in sliced {
                let name = fn_name(f);
                let key = if count[&name] > 1 {
                    format!("{name}@{}", f.line)
                } else {
                    name
                };
                let mut class = class.clone();
                if class.is_empty() {
                    class = fn_qualifier(f);
                }
                for v in o.function_vars(f, &class) {
                    o.keys.insert((u.file_name.clone(), key.clone(), v));
                }
            }
        }
        o.keys
    }

    fn function_vars(&self, f: &AstNode, class: &[String]) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        if let Some(params) = f.children.iter().find(|c| c.is(&NodeKind::ParameterList)) {
            let ps: Vec<&AstNode> = params.children.iter().filter(|p| p.is(&NodeKind::Parameter)).collect();
            for p in &ps {
                let d = p.children.iter().find(|c| c.is(&NodeKind::Decl)).unwrap_or(p);
                if let Some(n) = declared_name(d) {
                    vars.insert(n);
                }
            }
        }
        let Some(body) = f.children.iter().find(|c| c.is(&NodeKind::Block)) else {
            return vars;
        };
        let mut stack = vec![body];
        let mut exprs = Vec::new();
        while let Some(n) = stack.pop() {
            for c in &n.children {
                match &c.kind {
                    NodeKind::Function | NodeKind::Class | NodeKind::Struct => continue,
                    NodeKind::Decl => {
                        if let Some(name) = declared_name(c) {
                            vars.insert(name);
                        }
                    }
                    NodeKind::Expr => exprs.push(c),
                    _ => {}
                }
                stack.push(c);
            }
        }
        for e in exprs {
            let Some(split) = e
                .children
                .iter()
                .position(|c| c.is(&NodeKind::Operator) && ast::ASSIGN_OPS.contains(&c.token()))
            else {
                continue;
            };
            let Some(target) = e.children[..split].iter().find(|c| c.is(&NodeKind::Name)) else {
                continue;
            };
            if !target.children.is_empty() || target.token().is_empty() {
                continue;
            }
            let v = target.token();
            let is_field = (1..=class.len()).any(|k| self.fields.get(&class[..k]).is_some_and(|f| f.contains(v)));
            if !is_field && !self.globals.contains(v) {
                vars.insert(v.to_string());
            }
        }
        vars
    }
}

fn fn_name(f: &AstNode) -> String {
    match f.children.iter().find(|c| c.is(&NodeKind::Name)) {
        Some(n) if n.children.is_empty() => n.token().to_string(),
        Some(n) => n
            .children
            .iter()
            .rfind(|c| c.is(&NodeKind::Name))
            .map(|c| c.token().to_string())
            .unwrap_or_default(),
        None => String::new(),
    }
}

fn fn_qualifier(f: &AstNode) -> Vec<String> {
    match f.children.iter().find(|c| c.is(&NodeKind::Name)) {
        Some(n) if !n.children.is_empty() => {
            let segs: Vec<String> = n
                .children
                .iter()
                .filter(|c| c.is(&NodeKind::Name))
                .map(|c| c.token().to_string())
                .collect();
            segs[..segs.len() - 1].to_vec()
        }
        _ => Vec::new(),
    }
}

fn has_native(f: &AstNode) -> bool {
    f.descendants()
        .take_while(|n| !n.is(&NodeKind::Block))
        .any(|n| n.is(&NodeKind::Specifier) && n.token() == "native")
}

fn qualified(unit: &AstUnit, class: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    if unit.language == Language::Java {
        if let Some(pkg) = unit.root.iter().find(|n| n.is_opaque("package")) {
            if let Some(name) = pkg.children.iter().find(|c| c.is(&NodeKind::Name)) {
                parts.extend(ast::name_segments(name).into_iter().map(String::from));
            }
        }
    }
    parts.extend(class.iter().cloned());
    parts.join(".")
}
