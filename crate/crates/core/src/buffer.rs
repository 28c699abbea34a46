//! Bound-check analysis of sink sites.
//!
//! A site is guarded when a condition in its enclosing function, at or
//! before the site, compares the index (or copy length) with the buffer's
//! size: `sizeof(buf)`, `buf.size()`, `buf.length`, `strlen(buf)`, or a
//! variable holding one of those. Failing that, integer values are tracked
//! backwards through slice profiles and loop bounds; when both the largest
//! index and the buffer size are known, `max < size` decides.
//!
//! Indexes are assumed non-negative; only overflow past the end is checked.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::ast::{self, AstNode, AstUnit, NodeKind};
use crate::slicer::{self, ProfileKey, SliceProfile, SliceProfileMap, ValueInfo};
use crate::source_sink::{SinkCategory, SinkSite, SiteShape};

pub const DEFAULT_VALUE_CHAIN_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BoundIssueKind {
    IndexedAccessUnchecked,
    BufferAssignNoSizeCheck,
    BufferAssignUnguarded,
    MemFnNoSizeGuard,
}

impl BoundIssueKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundIssueKind::IndexedAccessUnchecked => "IndexedAccessUnchecked",
            BoundIssueKind::BufferAssignNoSizeCheck => "BufferAssignNoSizeCheck",
            BoundIssueKind::BufferAssignUnguarded => "BufferAssignUnguarded",
            BoundIssueKind::MemFnNoSizeGuard => "MemFnNoSizeGuard",
        }
    }
}

impl fmt::Display for BoundIssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a site counts as guarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GuardBasis {
    /// A condition relates the index or length to a size expression.
    SizeCheck,
    /// Tracked values show the largest index (or length) fits.
    Values { max_index: i64, size: i64 },
    /// The length argument is itself the destination's size.
    SizedArgument,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Vulnerable(BoundIssueKind),
    Guarded { guard_line: u32, basis: GuardBasis },
    Inconclusive(String),
}

impl Verdict {
    pub fn is_guarded(&self) -> bool {
        matches!(self, Verdict::Guarded { .. })
    }
}

/// Inputs shared by every verdict.
#[derive(Clone, Copy)]
pub struct AnalysisContext<'a> {
    pub map: &'a SliceProfileMap,
    pub units: &'a [AstUnit],
    pub value_chain_cap: usize,
}

/// Value `profile` holds just before `at_line`: its latest update on an
/// earlier line (or its initial value), with `RefTo` links followed at the
/// same point. Chains longer than `cap` and cycles give `Unknown`.
pub fn backtrack_value(profile: &SliceProfile, at_line: u32, map: &SliceProfileMap, cap: usize) -> ValueInfo {
    let mut seen: BTreeSet<ProfileKey> = BTreeSet::new();
    let mut cur = profile;
    for _ in 0..=cap {
        if !seen.insert(cur.key()) {
            return ValueInfo::Unknown;
        }
        let same_scope = cur.file_name == profile.file_name && cur.function_name == profile.function_name;
        let value = cur
            .updates
            .iter()
            .rfind(|u| !same_scope || u.line < at_line)
            .map(|u| &u.value)
            .unwrap_or(&cur.value);
        match value {
            ValueInfo::RefTo(k) => match map.get_node(k) {
                Some(next) => cur = next,
                None => return ValueInfo::Unknown,
            },
            other => return other.clone(),
        }
    }
    ValueInfo::Unknown
}

/// Verdict for a source-to-sink path ending at `site`; without the site's
/// AST the path is inconclusive.
pub fn analyze_path(site: Option<&SinkSite<'_>>, ctx: &AnalysisContext<'_>) -> Verdict {
    match site {
        Some(site) => analyze_site(site, ctx),
        None => Verdict::Inconclusive("sink has no AST context".into()),
    }
}

pub fn analyze_site(site: &SinkSite<'_>, ctx: &AnalysisContext<'_>) -> Verdict {
    let scope = Scope { site, ctx };
    match &site.shape {
        SiteShape::Index { path, index, .. } => scope.indexed_access(path, index),
        SiteShape::BufferAssign { dst, src } => scope.buffer_assign(dst, src),
        SiteShape::Call { callee, call } if site.category == SinkCategory::Memory => scope.memory_call(callee, call),
        SiteShape::Call { callee, .. } => {
            Verdict::Inconclusive(format!("no bound rule for {} call `{callee}`", site.category))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    fn point(v: i64) -> Self {
        Interval { lo: v, hi: v }
    }
}

struct Scope<'s, 'a> {
    site: &'s SinkSite<'a>,
    ctx: &'s AnalysisContext<'a>,
}

impl<'a> Scope<'_, 'a> {
    fn profile(&self, var: &str) -> Option<&'a SliceProfile> {
        let map = self.ctx.map;
        map.get(&ProfileKey::new(&self.site.file, &self.site.function, var))
            .or_else(|| {
                map.values()
                    .filter(|p| p.var_name == var && p.key().is_field_scope())
                    .min_by_key(|p| (p.file_name != self.site.file, p.key()))
            })
    }

    fn value_of(&self, var: &str) -> Option<ValueInfo> {
        let p = self.profile(var)?;
        Some(backtrack_value(
            p,
            self.site.line,
            self.ctx.map,
            self.ctx.value_chain_cap,
        ))
    }

    /// Conditions in the enclosing function at or before the site.
    fn conditions(&self) -> Vec<&'a AstNode> {
        self.site
            .function_node
            .descendants()
            .filter(|n| n.is(&NodeKind::Condition) && n.line <= self.site.line)
            .collect()
    }

    /// Declaration of `var`, in the function or at file scope.
    fn declaration(&self, var: &str) -> Option<&'a AstNode> {
        let is_decl =
            |n: &&AstNode| n.is(&NodeKind::Decl) && ast::decl_name(n).map(|d| ast::name_segments(d)[0]) == Some(var);
        if let Some(d) = self.site.function_node.descendants().find(is_decl) {
            return Some(d);
        }
        let unit = self.ctx.units.iter().find(|u| u.file_name == self.site.file)?;
        unit.root
            .iter()
            .filter(|n| !n.is(&NodeKind::Function))
            .flat_map(|n| n.descendants())
            .find(is_decl)
    }

    /// Variables holding a size of `buffer`: the names in its declared
    /// extent and anything assigned from a size expression of it.
    fn size_aliases(&self, buffer: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Some(decl) = self.declaration(buffer) {
            if let Some(name) = ast::decl_name(decl) {
                for idx in name.children.iter().filter(|c| c.is(&NodeKind::Index)) {
                    out.extend(slicer::plain_refs(idx).into_iter().map(String::from));
                }
            }
        }
        for n in self.site.function_node.descendants() {
            let (target, rhs): (Option<&str>, &[AstNode]) = match &n.kind {
                NodeKind::Decl => (
                    ast::decl_name(n).map(|d| ast::name_segments(d)[0]),
                    n.child(&NodeKind::Init).map(|i| &i.children[..]).unwrap_or(&[]),
                ),
                NodeKind::Expr => match n
                    .children
                    .iter()
                    .position(|c| c.is(&NodeKind::Operator) && c.token() == "=")
                {
                    Some(s) => (
                        n.children[..s]
                            .iter()
                            .find(|c| c.is(&NodeKind::Name))
                            .map(|c| c.token()),
                        &n.children[s + 1..],
                    ),
                    None => continue,
                },
                _ => continue,
            };
            let Some(target) = target.filter(|t| !t.is_empty()) else {
                continue;
            };
            if rhs.iter().any(|r| r.descendants().any(|d| is_size_expr(d, buffer))) {
                out.insert(target.to_string());
            }
        }
        out.remove(buffer);
        out
    }

    /// Does `node` contain a size expression or size alias of `buffer`?
    fn mentions_size(&self, node: &AstNode, buffer: &str, aliases: &BTreeSet<String>) -> bool {
        node.descendants().any(|d| is_size_expr(d, buffer))
            || slicer::plain_refs(node).iter().any(|r| aliases.contains(*r))
    }

    fn syntactic_guard(&self, buffer: &str, vars: &BTreeSet<&str>) -> Option<u32> {
        if vars.is_empty() {
            return None;
        }
        let aliases = self.size_aliases(buffer);
        self.conditions()
            .into_iter()
            .filter(|c| has_comparison(c))
            .filter(|c| self.mentions_size(c, buffer, &aliases))
            .filter(|c| {
                let refs = slicer::plain_refs(c);
                vars.iter().any(|v| refs.contains(v))
                    || c.descendants().any(|d| vars.iter().any(|v| is_size_expr(d, v)))
            })
            .map(|c| c.line)
            .max()
    }

    /// Known size of `buffer`, from its tracked value or a declared extent
    /// that evaluates to a constant.
    fn buffer_size(&self, buffer: &str) -> Option<i64> {
        if let Some(ValueInfo::BufferSize(n)) = self.value_of(buffer) {
            return i64::try_from(n).ok();
        }
        let decl = self.declaration(buffer)?;
        let idx = ast::decl_name(decl)?
            .children
            .iter()
            .find(|c| c.is(&NodeKind::Index))?
            .child(&NodeKind::Expr)?;
        let v = self.eval(&idx.children, &mut Vec::new())?;
        (v.lo == v.hi && v.lo >= 0).then_some(v.lo)
    }

    /// Upper bound placed on `var` by an enclosing loop or `if` condition,
    /// with the condition's line.
    fn enclosing_bound(&self, var: &str) -> Option<(Interval, u32)> {
        let line = self.site.line;
        let mut best: Option<(Interval, u32)> = None;
        for node in self.site.function_node.descendants() {
            let is_scope = matches!(node.kind, NodeKind::ForLoop | NodeKind::WhileLoop)
                || (node.is(&NodeKind::IfStmt) && node.tag == "if");
            if !is_scope || !node.contains_line(line) {
                continue;
            }
            let cond = match node.kind {
                NodeKind::ForLoop => node
                    .children
                    .iter()
                    .find(|c| c.is_opaque("control"))
                    .unwrap_or(node)
                    .child(&NodeKind::Condition),
                _ => node.child(&NodeKind::Condition),
            };
            let Some(cond) = cond else { continue };
            if cond.line > line {
                continue;
            }
            let Some(expr) = cond.child(&NodeKind::Expr) else {
                continue;
            };
            for conj in split_conjuncts(&expr.children) {
                let Some(hi) = self.upper_bound_in(conj, var) else {
                    continue;
                };
                let lo = if node.is(&NodeKind::ForLoop) {
                    self.loop_start(node, var).unwrap_or(0)
                } else {
                    0
                };
                let iv = Interval { lo, hi };
                if best.is_none_or(|(b, _)| iv.hi < b.hi) {
                    best = Some((iv, cond.line));
                }
            }
        }
        best
    }

    /// `var < E`, `var <= E`, `E > var`, `E >= var`: the largest value `var`
    /// can take.
    fn upper_bound_in(&self, conj: &[AstNode], var: &str) -> Option<i64> {
        let pos = conj
            .iter()
            .position(|c| c.is(&NodeKind::Operator) && matches!(c.token(), "<" | "<=" | ">" | ">="))?;
        let (lhs, rhs) = (&conj[..pos], &conj[pos + 1..]);
        let op = conj[pos].token();
        let is_var = |side: &[AstNode]| matches!(side, [n] if n.is(&NodeKind::Name) && n.children.is_empty() && n.token() == var);
        let (bound_side, strict) = match op {
            "<" if is_var(lhs) => (rhs, true),
            "<=" if is_var(lhs) => (rhs, false),
            ">" if is_var(rhs) => (lhs, true),
            ">=" if is_var(rhs) => (lhs, false),
            _ => return None,
        };
        let b = self.eval(bound_side, &mut Vec::new())?;
        Some(if strict { b.hi - 1 } else { b.hi })
    }

    fn loop_start(&self, for_node: &AstNode, var: &str) -> Option<i64> {
        let control = for_node
            .children
            .iter()
            .find(|c| c.is_opaque("control"))
            .unwrap_or(for_node);
        let init = control.child(&NodeKind::Init)?;
        for n in init.descendants() {
            if n.is(&NodeKind::Decl) && ast::decl_name(n).map(ast::terminal_name) == Some(var) {
                return n
                    .child(&NodeKind::Init)?
                    .child(&NodeKind::Expr)
                    .and_then(slicer::literal_int);
            }
            if n.is(&NodeKind::Expr) {
                if let [name, op, rest @ ..] = n.children.as_slice() {
                    if name.token() == var && op.token() == "=" {
                        return self.eval(rest, &mut Vec::new()).filter(|i| i.lo == i.hi).map(|i| i.lo);
                    }
                }
            }
        }
        None
    }

    /// Range of an index variable, with the line of the condition that
    /// bounded it (if any).
    fn var_range(&self, var: &str) -> Option<(Interval, Option<u32>)> {
        if let Some((iv, line)) = self.enclosing_bound(var) {
            return Some((iv, Some(line)));
        }
        match self.value_of(var)? {
            ValueInfo::IntLiteral(n) => Some((Interval::point(n), None)),
            _ => None,
        }
    }

    /// Interval of a flat srcML expression; `None` when any operand is
    /// unknown or an operator is not `+ - * / %`. Lines of bounding
    /// conditions are appended to `lines`.
    fn eval(&self, nodes: &[AstNode], lines: &mut Vec<u32>) -> Option<Interval> {
        let mut toks: Vec<Tok> = Vec::new();
        for n in nodes {
            match &n.kind {
                NodeKind::Literal if n.type_attr.as_deref() == Some("number") => {
                    toks.push(Tok::Val(Interval::point(slicer::parse_int(n.token())?)))
                }
                NodeKind::Operator => match n.token() {
                    "++" | "--" => {}
                    "(" => toks.push(Tok::Open),
                    ")" => toks.push(Tok::Close),
                    op @ ("+" | "-" | "*" | "/" | "%") => toks.push(Tok::Op(op.chars().next()?)),
                    _ => return None,
                },
                NodeKind::Name if n.children.is_empty() => {
                    let (iv, line) = self.var_range(n.token())?;
                    lines.extend(line);
                    toks.push(Tok::Val(iv));
                }
                NodeKind::Opaque(t) if t == "sizeof" => {
                    let target = n.descendants().find(|d| d.is(&NodeKind::Name)).map(ast::name_string)?;
                    toks.push(Tok::Val(Interval::point(self.buffer_size(&target)?)));
                }
                NodeKind::Call => {
                    let name = n.child(&NodeKind::Name).map(ast::name_string)?;
                    let (obj, method) = name.rsplit_once('.').or_else(|| name.rsplit_once("->"))?;
                    if !matches!(method, "size" | "length") {
                        return None;
                    }
                    toks.push(Tok::Val(Interval::point(self.buffer_size(obj)?)));
                }
                NodeKind::Expr => toks.push(Tok::Val(self.eval(&n.children, lines)?)),
                NodeKind::Opaque(t) if t == "cast" => {}
                _ => return None,
            }
        }
        let mut p = Parser { toks: &toks, pos: 0 };
        let v = p.expr()?;
        (p.pos == toks.len()).then_some(v)
    }

    fn indexed_access(&self, path: &str, index: &AstNode) -> Verdict {
        let vars: BTreeSet<&str> = slicer::plain_refs(index).into_iter().collect();
        if let Some(line) = self.syntactic_guard(path, &vars) {
            return Verdict::Guarded {
                guard_line: line,
                basis: GuardBasis::SizeCheck,
            };
        }
        let mut lines = Vec::new();
        if let (Some(size), Some(iv)) = (self.buffer_size(path), self.eval(&index.children, &mut lines)) {
            if iv.lo >= 0 && iv.hi < size {
                return Verdict::Guarded {
                    guard_line: lines.into_iter().max().unwrap_or(self.site.line),
                    basis: GuardBasis::Values { max_index: iv.hi, size },
                };
            }
        }
        Verdict::Vulnerable(BoundIssueKind::IndexedAccessUnchecked)
    }

    fn memory_call(&self, callee: &str, call: &AstNode) -> Verdict {
        let args = slicer::call_args(call);
        let (dst_pos, src_pos) = if callee == "bcopy" { (1, 0) } else { (0, 1) };
        let root = |i: usize| {
            args.get(i)
                .and_then(|a| a.child(&NodeKind::Expr))
                .and_then(|e| e.children.iter().find(|c| c.is(&NodeKind::Name)))
                .map(ast::name_string)
        };
        let Some(dst) = root(dst_pos) else {
            return Verdict::Inconclusive(format!("destination of `{callee}` is not a variable"));
        };
        let len = args.get(2);
        if let Some(len) = len {
            if len.descendants().any(|d| is_size_expr(d, &dst)) {
                return Verdict::Guarded {
                    guard_line: call.line,
                    basis: GuardBasis::SizedArgument,
                };
            }
        }
        let mut vars: BTreeSet<&str> = BTreeSet::new();
        if let Some(len) = len {
            vars.extend(slicer::plain_refs(len));
        } else if let Some(src) = args.get(src_pos) {
            vars.extend(slicer::plain_refs(src));
        }
        let dst_root = dst.split(['.', '-']).next().unwrap_or(&dst).to_string();
        vars.remove(dst_root.as_str());
        if let Some(line) = self.syntactic_guard(&dst, &vars) {
            return Verdict::Guarded {
                guard_line: line,
                basis: GuardBasis::SizeCheck,
            };
        }
        if let (Some(size), Some(len)) = (self.buffer_size(&dst), len.and_then(|l| l.child(&NodeKind::Expr))) {
            let mut lines = Vec::new();
            if let Some(iv) = self.eval(&len.children, &mut lines) {
                if iv.hi <= size {
                    return Verdict::Guarded {
                        guard_line: lines.into_iter().max().unwrap_or(call.line),
                        basis: GuardBasis::Values { max_index: iv.hi, size },
                    };
                }
            }
        }
        Verdict::Vulnerable(BoundIssueKind::MemFnNoSizeGuard)
    }

    fn buffer_assign(&self, dst: &str, src: &str) -> Verdict {
        let body = self.site.function_node;
        let before = |n: &&AstNode| n.line <= self.site.line;
        let any_size = body
            .descendants()
            .filter(before)
            .any(|d| is_size_expr(d, dst) || is_size_expr(d, src));
        if !any_size {
            return Verdict::Vulnerable(BoundIssueKind::BufferAssignNoSizeCheck);
        }
        let dst_alias = self.size_aliases(dst);
        let src_alias = self.size_aliases(src);
        let guard = self
            .conditions()
            .into_iter()
            .filter(|c| has_comparison(c))
            .filter(|c| self.mentions_size(c, dst, &dst_alias) && self.mentions_size(c, src, &src_alias))
            .map(|c| c.line)
            .max();
        match guard {
            Some(line) => Verdict::Guarded {
                guard_line: line,
                basis: GuardBasis::SizeCheck,
            },
            None => Verdict::Vulnerable(BoundIssueKind::BufferAssignUnguarded),
        }
    }
}

/// `sizeof(buf)`, `buf.size()`, `buf.length()`, `buf.length`,
/// `strlen(buf)` and similar, for a buffer written as `buffer`.
pub fn is_size_expr(node: &AstNode, buffer: &str) -> bool {
    let arg_is_buffer = |n: &AstNode| {
        n.descendants()
            .find(|d| d.is(&NodeKind::Name))
            .is_some_and(|d| ast::name_string(d) == buffer)
    };
    match &node.kind {
        NodeKind::Opaque(t) if t == "sizeof" => arg_is_buffer(node),
        NodeKind::Call => {
            let Some(name) = node.child(&NodeKind::Name) else {
                return false;
            };
            let name = ast::name_string(name);
            if let Some((obj, method)) = name.rsplit_once('.').or_else(|| name.rsplit_once("->")) {
                if obj == buffer && matches!(method, "size" | "length" | "capacity") {
                    return true;
                }
            }
            let fn_name = name.rsplit("::").next().unwrap_or(&name);
            matches!(
                fn_name,
                "strlen"
                    | "wcslen"
                    | "size"
                    | "sizeof"
                    | "ARRAY_SIZE"
                    | "_countof"
                    | "GetArrayLength"
                    | "GetDirectBufferCapacity"
            ) && slicer::call_args(node).iter().any(|a| arg_is_buffer(a))
        }
        NodeKind::Name => ast::name_string(node) == format!("{buffer}.length"),
        _ => false,
    }
}

fn has_comparison(cond: &AstNode) -> bool {
    cond.descendants()
        .any(|d| d.is(&NodeKind::Operator) && matches!(d.token(), "<" | "<=" | ">" | ">="))
}

fn split_conjuncts(nodes: &[AstNode]) -> Vec<&[AstNode]> {
    nodes
        .split(|n| n.is(&NodeKind::Operator) && n.token() == "&&")
        .filter(|s| !s.is_empty())
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Tok {
    Val(Interval),
    Op(char),
    Open,
    Close,
}

struct Parser<'t> {
    toks: &'t [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn expr(&mut self) -> Option<Interval> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' {
                Interval {
                    lo: acc.lo.checked_add(rhs.lo)?,
                    hi: acc.hi.checked_add(rhs.hi)?,
                }
            } else {
                Interval {
                    lo: acc.lo.checked_sub(rhs.hi)?,
                    hi: acc.hi.checked_sub(rhs.lo)?,
                }
            };
        }
        Some(acc)
    }

    fn term(&mut self) -> Option<Interval> {
        let mut acc = self.factor()?;
        while let Some(Tok::Op(op @ ('*' | '/' | '%'))) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = match op {
                '*' => {
                    let c = [
                        acc.lo.checked_mul(rhs.lo)?,
                        acc.lo.checked_mul(rhs.hi)?,
                        acc.hi.checked_mul(rhs.lo)?,
                        acc.hi.checked_mul(rhs.hi)?,
                    ];
                    Interval {
                        lo: *c.iter().min()?,
                        hi: *c.iter().max()?,
                    }
                }
                '/' if rhs.lo > 0 && acc.lo >= 0 => Interval {
                    lo: acc.lo / rhs.hi,
                    hi: acc.hi / rhs.lo,
                },
                '%' if rhs.lo > 0 && acc.lo >= 0 => Interval {
                    lo: 0,
                    hi: (rhs.hi - 1).min(acc.hi),
                },
                _ => return None,
            };
        }
        Some(acc)
    }

    fn factor(&mut self) -> Option<Interval> {
        match self.peek()? {
            Tok::Op('-') => {
                self.pos += 1;
                let v = self.factor()?;
                Some(Interval {
                    lo: v.hi.checked_neg()?,
                    hi: v.lo.checked_neg()?,
                })
            }
            Tok::Open => {
                self.pos += 1;
                let v = self.expr()?;
                match self.peek()? {
                    Tok::Close => {
                        self.pos += 1;
                        Some(v)
                    }
                    _ => None,
                }
            }
            Tok::Val(v) => {
                self.pos += 1;
                Some(v)
            }
            _ => None,
        }
    }
}
