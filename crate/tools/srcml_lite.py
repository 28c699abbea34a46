#!/usr/bin/env python3
"""Emit srcML-style XML for the small Java/C/C++ subset used by the fixture corpus.

This is a fixture generator, not a replacement for srcML. It understands
classes, structs, fields, functions, declarations, if/for/while/return and
flat expressions with calls, member access, indexing, casts and sizeof. The
output mirrors the srcML 1.0 element vocabulary and carries per-element
positions (`pos:start`/`pos:end`, or `pos:line`/`pos:column` with --legacy-pos).

Usage:
    srcml_lite.py [--legacy-pos] --root DIR -o archive.xml FILE...
"""

import argparse
import os
import re
import sys

SRC_NS = "http://www.srcML.org/srcML/src"
CPP_NS = "http://www.srcML.org/srcML/cpp"
POS_NS = "http://www.srcML.org/srcML/position"

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="}
PUNCT = [
    "<<=", ">>=", "->", "::", "++", "--", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~", "?", ":",
    ".", ",", ";", "(", ")", "[", "]", "{", "}", "@",
]
TYPE_KEYWORDS = {
    "int", "char", "void", "unsigned", "signed", "long", "short", "float",
    "double", "bool", "boolean", "byte", "size_t", "auto", "const", "static",
    "struct", "final", "var",
}
SPECIFIERS = {
    "public", "private", "protected", "static", "native", "final", "const",
    "abstract", "synchronized", "extern", "inline", "virtual",
}
CONTROL = {"if", "for", "while", "return", "else", "do"}


class Tok:
    __slots__ = ("kind", "text", "start", "end", "line", "col", "eline", "ecol")

    def __init__(self, kind, text, start, end, line, col, eline, ecol):
        self.kind = kind
        self.text = text
        self.start = start
        self.end = end
        self.line = line
        self.col = col
        self.eline = eline
        self.ecol = ecol

    def __repr__(self):
        return f"Tok({self.kind},{self.text!r},{self.line}:{self.col})"


def tokenize(src):
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)

    def advance(a, b, line, col):
        for ch in src[a:b]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        return line, col

    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            line, col = advance(i, i + 1, line, col)
            i += 1
            continue
        start, sl, sc = i, line, col
        if src.startswith("//", i):
            j = src.find("\n", i)
            j = n if j < 0 else j
            kind = "comment_line"
        elif src.startswith("/*", i):
            j = src.find("*/", i) + 2
            kind = "comment_block"
        elif ch == "#" and (i == 0 or src[i - 1] == "\n"):
            j = src.find("\n", i)
            j = n if j < 0 else j
            kind = "directive"
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            kind = "ident"
        elif ch.isdigit():
            j = i
            while j < n and (src[j].isalnum() or src[j] in "._"):
                j += 1
            kind = "number"
        elif ch in "\"'":
            j = i + 1
            while src[j] != ch:
                j += 2 if src[j] == "\\" else 1
            j += 1
            kind = "string" if ch == '"' else "char"
        else:
            for p in PUNCT:
                if src.startswith(p, i):
                    j = i + len(p)
                    break
            else:
                raise SyntaxError(f"unexpected character {ch!r} at {line}:{col}")
            kind = "punct"
        line, col = advance(i, j, line, col)
        # end position is the last character of the token
        el, ec = advance_last(src, start, j, sl, sc)
        toks.append(Tok(kind, src[start:j], start, j, sl, sc, el, ec))
        i = j
    return toks


def advance_last(src, a, b, line, col):
    for ch in src[a:b - 1]:
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1
    return line, col


class Node:
    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag, attrs=None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children = []

    def add(self, child):
        self.children.append(child)
        return child

    def first_tok(self):
        for c in self.children:
            t = c if isinstance(c, Tok) else c.first_tok()
            if t is not None:
                return t
        return None

    def last_tok(self):
        for c in reversed(self.children):
            t = c if isinstance(c, Tok) else c.last_tok()
            if t is not None:
                return t
        return None


class Parser:
    def __init__(self, toks, lang):
        self.toks = toks
        self.i = 0
        self.lang = lang
        self.java = lang == "Java"

    # -- token helpers -------------------------------------------------
    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text, k=0):
        t = self.peek(k)
        return t is not None and t.text == text and t.kind in ("punct", "ident")

    def take(self, parent=None):
        t = self.toks[self.i]
        self.i += 1
        if parent is not None:
            parent.add(t)
        return t

    def expect(self, text, parent):
        t = self.peek()
        if t is None or t.text != text:
            raise SyntaxError(f"expected {text!r} got {t}")
        return self.take(parent)

    def leaf(self, tag, parent, attrs=None):
        n = Node(tag, attrs)
        self.take(n)
        parent.add(n)
        return n

    # -- top level -----------------------------------------------------
    def unit(self):
        root = Node("unit")
        while self.peek() is not None:
            self.member(root, top=True)
        return root

    def comment(self, parent):
        t = self.peek()
        kind = "line" if t.kind == "comment_line" else "block"
        self.leaf("comment", parent, {"type": kind})

    def member(self, parent, top=False, class_name=None):
        t = self.peek()
        if t.kind.startswith("comment"):
            return self.comment(parent)
        if t.kind == "directive":
            n = Node("cpp:include" if "include" in t.text else "cpp:directive")
            self.take(n)
            parent.add(n)
            return
        if self.at("package"):
            n = parent.add(Node("package"))
            self.take(n)
            self.qualified_name(n)
            self.expect(";", n)
            return
        if self.at("import"):
            n = parent.add(Node("import"))
            self.take(n)
            self.qualified_name(n, allow_star=True)
            self.expect(";", n)
            return
        # class / struct definitions (possibly after specifiers)
        k = 0
        while self.peek(k) is not None and self.peek(k).text in SPECIFIERS:
            k += 1
        if self.at("class", k) or self.at("struct", k) or self.at("interface", k):
            if self.at("{", k + 2) or (self.java and not self.at(";", k + 2)):
                return self.class_def(parent)
        return self.decl_or_function(parent, in_class=class_name)

    def qualified_name(self, parent, allow_star=False):
        outer = Node("name")
        self.leaf("name", outer)
        while self.at(".") or self.at("::"):
            self.leaf("operator", outer)
            if allow_star and self.at("*"):
                self.leaf("name", outer)
            else:
                self.leaf("name", outer)
        if len(outer.children) == 1:
            parent.add(outer.children[0])
        else:
            parent.add(outer)

    def class_def(self, parent):
        kw = None
        k = 0
        while self.peek(k).text in SPECIFIERS:
            k += 1
        kw = self.peek(k).text
        n = parent.add(Node("struct" if kw == "struct" else "class"))
        while self.peek().text in SPECIFIERS:
            self.leaf("specifier", n)
        self.take(n)  # class / struct keyword
        name = self.peek().text
        self.leaf("name", n)
        while not self.at("{"):
            # extends / implements clauses kept as plain names
            if self.peek().kind == "ident" and self.peek().text in ("extends", "implements"):
                sup = n.add(Node("super_list"))
                self.take(sup)
                self.qualified_name(sup)
                continue
            self.take(n)
        block = n.add(Node("block"))
        self.expect("{", block)
        if self.java:
            while not self.at("}"):
                self.member(block, class_name=name)
        else:
            default = "public" if kw == "struct" else "private"
            section = Node(default, {"type": "default"})
            block.add(section)
            while not self.at("}"):
                if self.peek().text in ("public", "private", "protected") and self.at(":", 1):
                    section = block.add(Node(self.peek().text))
                    self.take(section)
                    self.take(section)
                    continue
                self.member(section, class_name=name)
            block.children = [
                c for c in block.children if isinstance(c, Tok) or c.children
            ]
        self.expect("}", block)
        if self.at(";"):
            self.take(n)

    def looks_like_function(self):
        # type tokens then name then '(' at member level
        j = self.i
        depth = 0
        while j < len(self.toks):
            t = self.toks[j]
            if t.text == "<":
                depth += 1
            elif t.text == ">":
                depth -= 1
            elif depth == 0 and t.text in ("=", ";", "[", "{"):
                return False
            elif depth == 0 and t.text == "(":
                return j > self.i
            j += 1
        return False

    def decl_or_function(self, parent, in_class=None):
        if self.at("@"):
            annotations = []
            while self.at("@"):
                a = Node("annotation")
                self.take(a)
                self.leaf("name", a)
                annotations.append(a)
        else:
            annotations = []
        if self.looks_like_function():
            fn = Node("function")
            for a in annotations:
                fn.add(a)
            typ = Node("type")
            # constructor: name directly followed by '('
            if not self.at("(", 1) or self.peek().text in SPECIFIERS:
                self.type_into(typ, function=True)
                fn.add(typ)
            self.function_name(fn)
            plist = fn.add(Node("parameter_list"))
            self.expect("(", plist)
            while not self.at(")"):
                p = plist.add(Node("parameter"))
                d = p.add(Node("decl"))
                dt = d.add(Node("type"))
                self.type_into(dt)
                self.leaf("name", d)
                if self.at(","):
                    self.take(plist)
            self.expect(")", plist)
            if self.at(";"):
                fn.tag = "function_decl"
                self.take(fn)
            else:
                self.block(fn)
            parent.add(fn)
            return
        stmt = Node("decl_stmt")
        for a in annotations:
            stmt.add(a)
        self.declaration(stmt)
        self.expect(";", stmt)
        parent.add(stmt)

    def function_name(self, fn):
        outer = Node("name")
        self.leaf("name", outer)
        while self.at("::"):
            self.leaf("operator", outer)
            self.leaf("name", outer)
        fn.add(outer if len(outer.children) > 1 else outer.children[0])

    def type_into(self, typ, function=False):
        """Consume a type: specifiers, (qualified/generic) names, modifiers."""
        names = 0
        while True:
            t = self.peek()
            if t.text in SPECIFIERS:
                self.leaf("specifier", typ)
                continue
            if t.kind == "ident" and names == 0 or (
                t.kind == "ident" and not self.type_ends_here()
            ):
                self.type_name(typ)
                names += 1
                continue
            if t.text in ("*", "&"):
                self.leaf("modifier", typ)
                continue
            break

    def type_ends_here(self):
        # the next identifier is the declared name when followed by a declarator end
        nxt = self.peek(1)
        return nxt is not None and nxt.text in ("=", ";", "[", "(", ",", ")", "{")

    def type_name(self, parent):
        outer = Node("name")
        self.leaf("name", outer)
        while self.at("::") or (self.at(".") and self.java):
            self.leaf("operator", outer)
            self.leaf("name", outer)
        if self.at("<"):
            al = outer.add(Node("argument_list", {"type": "generic"}))
            self.take(al)
            while not self.at(">"):
                arg = al.add(Node("argument"))
                e = arg.add(Node("expr"))
                while not (self.at(",") or self.at(">")):
                    self.type_name(e)
                if self.at(","):
                    self.take(al)
            self.take(al)
        while self.at("[") and self.at("]", 1):
            idx = outer.add(Node("index"))
            self.take(idx)
            self.take(idx)
        parent.add(outer if len(outer.children) > 1 else outer.children[0])

    # -- declarations ---------------------------------------------------
    def declaration(self, stmt, in_control=False):
        d = stmt.add(Node("decl"))
        typ = d.add(Node("type"))
        self.type_into(typ)
        while True:
            self.declarator(d)
            if self.at(","):
                self.take(stmt)
                d = stmt.add(Node("decl"))
                continue
            break

    def declarator(self, d):
        name = Node("name")
        self.leaf("name", name)
        while self.at("["):
            idx = name.add(Node("index"))
            self.take(idx)
            if not self.at("]"):
                self.expr(idx)
            self.expect("]", idx)
        d.add(name if len(name.children) > 1 else name.children[0])
        if self.at("="):
            init = d.add(Node("init"))
            self.take(init)
            if self.at("{"):
                # aggregate initializer: <block>{<expr/>, ...}</block>
                lst = init.add(Node("block"))
                self.take(lst)
                while not self.at("}"):
                    self.expr(lst)
                    if self.at(","):
                        self.take(lst)
                self.expect("}", lst)
            else:
                self.expr(init)
        elif self.at("("):
            self.argument_list(d)

    # -- statements -----------------------------------------------------
    def block(self, parent):
        b = parent.add(Node("block"))
        self.expect("{", b)
        content = b.add(Node("block_content"))
        while not self.at("}"):
            self.statement(content)
        self.expect("}", b)
        if not content.children:
            b.children.remove(content)
        return b

    def pseudo_block(self, parent):
        if self.at("{"):
            return self.block(parent)
        b = parent.add(Node("block", {"type": "pseudo"}))
        content = b.add(Node("block_content"))
        self.statement(content)
        return b

    def is_declaration(self):
        t = self.peek()
        if t.kind != "ident" or t.text in CONTROL:
            return False
        if t.text in TYPE_KEYWORDS or t.text in SPECIFIERS:
            return True
        j = self.i
        # qualified / generic type name
        j += 1
        while j < len(self.toks) and self.toks[j].text in ("::", "."):
            j += 2
        if j < len(self.toks) and self.toks[j].text == "<":
            depth = 0
            while j < len(self.toks):
                if self.toks[j].text == "<":
                    depth += 1
                elif self.toks[j].text == ">":
                    depth -= 1
                    if depth == 0:
                        j += 1
                        break
                j += 1
        while j < len(self.toks) and self.toks[j].text == "[" and self.toks[j + 1].text == "]":
            j += 2
        while j < len(self.toks) and self.toks[j].text in ("*", "&"):
            j += 1
        if j < len(self.toks) and self.toks[j].kind == "ident":
            nxt = self.toks[j + 1].text if j + 1 < len(self.toks) else ""
            return nxt in ("=", ";", "[", "(", ",")
        return False

    def statement(self, parent):
        t = self.peek()
        if t.kind.startswith("comment"):
            return self.comment(parent)
        if self.at("{"):
            return self.block(parent)
        if self.at(";"):
            return self.leaf("empty_stmt", parent)
        if self.at("if"):
            return self.if_stmt(parent)
        if self.at("for"):
            n = parent.add(Node("for"))
            self.take(n)
            ctl = n.add(Node("control"))
            self.expect("(", ctl)
            init = ctl.add(Node("init"))
            if self.is_declaration():
                self.declaration(init, in_control=True)
            elif not self.at(";"):
                self.expr(init)
            self.expect(";", init)
            cond = ctl.add(Node("condition"))
            if not self.at(";"):
                self.expr(cond)
            self.expect(";", cond)
            incr = ctl.add(Node("incr"))
            if not self.at(")"):
                self.expr(incr)
            if not incr.children:
                ctl.children.remove(incr)
            self.expect(")", ctl)
            self.pseudo_block(n)
            return
        if self.at("while"):
            n = parent.add(Node("while"))
            self.take(n)
            cond = n.add(Node("condition"))
            self.expect("(", cond)
            self.expr(cond)
            self.expect(")", cond)
            self.pseudo_block(n)
            return
        if self.at("return"):
            n = parent.add(Node("return"))
            self.take(n)
            if not self.at(";"):
                self.expr(n)
            self.expect(";", n)
            return
        if self.is_declaration():
            stmt = parent.add(Node("decl_stmt"))
            self.declaration(stmt)
            self.expect(";", stmt)
            return
        stmt = parent.add(Node("expr_stmt"))
        self.expr(stmt)
        self.expect(";", stmt)

    def if_stmt(self, parent):
        outer = parent.add(Node("if_stmt"))
        n = outer.add(Node("if"))
        self.take(n)
        cond = n.add(Node("condition"))
        self.expect("(", cond)
        self.expr(cond)
        self.expect(")", cond)
        self.pseudo_block(n)
        while self.at("else"):
            if self.at("if", 1):
                n = outer.add(Node("if", {"type": "elseif"}))
                self.take(n)
                self.take(n)
                cond = n.add(Node("condition"))
                self.expect("(", cond)
                self.expr(cond)
                self.expect(")", cond)
                self.pseudo_block(n)
            else:
                e = outer.add(Node("else"))
                self.take(e)
                self.pseudo_block(e)
                break

    # -- expressions (flat, as srcML emits them) -------------------------
    def expr(self, parent, stop=()):
        e = parent.add(Node("expr"))
        depth = 0
        while True:
            t = self.peek()
            if t is None:
                break
            if t.text in (";", ",", "]", "}") and depth == 0:
                break
            if t.text == ")" and depth == 0:
                break
            if t.text in stop and depth == 0:
                break
            if t.text == "(":
                if self.is_cast():
                    c = e.add(Node("cast"))
                    self.take(c)
                    typ = c.add(Node("type"))
                    self.type_into(typ)
                    self.expect(")", c)
                    continue
                depth += 1
                self.leaf("operator", e)
                continue
            if t.text == ")":
                depth -= 1
                self.leaf("operator", e)
                continue
            if t.kind == "number":
                self.leaf("literal", e, {"type": "number"})
            elif t.kind in ("string", "char"):
                self.leaf("literal", e, {"type": t.kind})
            elif t.kind == "ident" and t.text in ("true", "false"):
                self.leaf("literal", e, {"type": "boolean"})
            elif t.kind == "ident" and t.text in ("null", "nullptr", "NULL"):
                self.leaf("literal", e, {"type": "null"})
            elif t.kind == "ident" and t.text == "sizeof":
                s = e.add(Node("sizeof"))
                self.take(s)
                self.argument_list(s)
            elif t.kind == "ident" and t.text == "new":
                self.leaf("operator", e)
            elif t.kind == "ident":
                self.name_or_call(e)
            elif t.kind == "punct":
                self.leaf("operator", e)
            else:
                raise SyntaxError(f"unexpected token {t}")
        return e

    def is_cast(self):
        # '(' type ')' followed by an operand
        j = self.i + 1
        if j >= len(self.toks) or self.toks[j].kind != "ident":
            return False
        if self.toks[j].text not in TYPE_KEYWORDS and not self.toks[j].text.endswith("_t"):
            return False
        while j < len(self.toks) and self.toks[j].text != ")":
            if self.toks[j].kind not in ("ident",) and self.toks[j].text not in ("*", "&", "::"):
                return False
            j += 1
        nxt = self.toks[j + 1] if j + 1 < len(self.toks) else None
        return nxt is not None and (nxt.kind in ("ident", "number") or nxt.text == "(")

    def name_or_call(self, parent):
        outer = Node("name")
        self.leaf("name", outer)
        while True:
            if self.at("[") :
                idx = outer.add(Node("index"))
                self.take(idx)
                self.expr(idx)
                self.expect("]", idx)
                continue
            if (self.at(".") or self.at("->") or self.at("::")) and self.peek(1).kind == "ident":
                self.leaf("operator", outer)
                self.leaf("name", outer)
                continue
            break
        name = outer if len(outer.children) > 1 else outer.children[0]
        if self.at("("):
            call = parent.add(Node("call"))
            call.add(name)
            self.argument_list(call)
            # chained member access on the call result
            if self.at(".") or self.at("->"):
                self.leaf("operator", parent)
                self.name_or_call(parent)
        else:
            parent.add(name)

    def argument_list(self, parent):
        al = parent.add(Node("argument_list"))
        self.expect("(", al)
        while not self.at(")"):
            arg = al.add(Node("argument"))
            self.expr(arg)
            if self.at(","):
                self.take(al)
        self.expect(")", al)


def esc(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class Emitter:
    def __init__(self, src, legacy):
        self.src = src
        self.pos = 0
        self.out = []
        self.legacy = legacy

    def gap_to(self, offset):
        if offset > self.pos:
            self.out.append(esc(self.src[self.pos:offset]))
            self.pos = offset

    def emit(self, node):
        first = node.first_tok()
        last = node.last_tok()
        if first is not None:
            self.gap_to(first.start)
        attrs = "".join(f' {k}="{v}"' for k, v in node.attrs.items())
        if first is not None:
            if self.legacy:
                attrs += f' pos:line="{first.line}" pos:column="{first.col}"'
            else:
                attrs += f' pos:start="{first.line}:{first.col}" pos:end="{last.eline}:{last.ecol}"'
        self.out.append(f"<{node.tag}{attrs}>")
        for c in node.children:
            if isinstance(c, Tok):
                self.gap_to(c.start)
                self.out.append(esc(c.text))
                self.pos = c.end
            else:
                self.emit(c)
        self.out.append(f"</{node.tag}>")


def language_of(path):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".java":
        return "Java"
    if ext == ".c":
        return "C"
    return "C++"


def convert(path, rel, legacy):
    with open(path, encoding="utf-8") as f:
        src = f.read()
    lang = language_of(path)
    toks = tokenize(src)
    tree = Parser(toks, lang).unit()
    em = Emitter(src, legacy)
    for c in tree.children:
        em.emit(c)
    em.gap_to(len(src))
    body = "".join(em.out)
    return f'<unit revision="1.0.0" language="{lang}" filename="{rel}" pos:tabs="8">{body}</unit>'


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--legacy-pos", action="store_true")
    ap.add_argument("--root", required=True)
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("files", nargs="*")
    args = ap.parse_args()
    units = []
    for f in sorted(args.files):
        rel = os.path.relpath(f, args.root).replace(os.sep, "/")
        units.append(convert(f, rel, args.legacy_pos))
    head = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<unit xmlns="{SRC_NS}" xmlns:cpp="{CPP_NS}" xmlns:pos="{POS_NS}" revision="1.0.0">\n\n'
    )
    with open(args.output, "w", encoding="utf-8") as out:
        out.write(head)
        out.write("\n\n".join(units))
        out.write("\n\n</unit>\n")


if __name__ == "__main__":
    sys.exit(main())
