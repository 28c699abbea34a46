//! JNI short-name mangling and the user-supplied override map.
//!
//! Follows the JNI specification: `Java_`, the package with `.` turned into
//! `_`, the class, `_`, then the method. Inside a segment `_` becomes `_1`,
//! `;` becomes `_2`, `[` becomes `_3`, and any other character outside
//! `[A-Za-z0-9]` becomes `_0xxxx` (UTF-16 code unit, lowercase hex). A nested
//! class `Outer$Inner` therefore mangles to `Outer_00024Inner`.
//!
//! Long names with a `__signature` suffix, used for overloaded natives, are
//! not generated.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub fn escape_segment(segment: &str, out: &mut String) {
    let mut buf = [0u16; 2];
    for c in segment.chars() {
        match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' => out.push(c),
            '_' => out.push_str("_1"),
            ';' => out.push_str("_2"),
            '[' => out.push_str("_3"),
            _ => {
                for unit in c.encode_utf16(&mut buf) {
                    out.push_str(&format!("_0{unit:04x}"));
                }
            }
        }
    }
}

/// Mangled C symbol for a native method. `package` is dotted (or empty),
/// `class` is the binary name without package (`Outer$Inner`).
pub fn link_ffi(package: &str, class: &str, method: &str) -> String {
    let mut out = String::from("Java_");
    for seg in package.split('.').filter(|s| !s.is_empty()) {
        escape_segment(seg, &mut out);
        out.push('_');
    }
    escape_segment(class, &mut out);
    out.push('_');
    escape_segment(method, &mut out);
    out
}

/// `(package, class, method)` decoded from a short JNI name. A trailing
/// `__signature` part is ignored. Returns `None` for names that do not
/// follow the scheme.
pub fn demangle(symbol: &str) -> Option<(String, String, String)> {
    let rest = symbol.strip_prefix("Java_")?;
    let mut segments: Vec<String> = vec![String::new()];
    let mut units: Vec<u16> = Vec::new();
    let bytes = rest.as_bytes();
    let mut i = 0;
    let flush = |units: &mut Vec<u16>, seg: &mut String| -> Option<()> {
        if !units.is_empty() {
            seg.push_str(&String::from_utf16(units).ok()?);
            units.clear();
        }
        Some(())
    };
    while i < bytes.len() {
        let b = bytes[i];
        if b != b'_' {
            if !b.is_ascii_alphanumeric() {
                return None;
            }
            flush(&mut units, segments.last_mut()?)?;
            segments.last_mut()?.push(b as char);
            i += 1;
            continue;
        }
        match bytes.get(i + 1) {
            Some(b'1') => {
                flush(&mut units, segments.last_mut()?)?;
                segments.last_mut()?.push('_');
                i += 2;
            }
            Some(b'2') => {
                flush(&mut units, segments.last_mut()?)?;
                segments.last_mut()?.push(';');
                i += 2;
            }
            Some(b'3') => {
                flush(&mut units, segments.last_mut()?)?;
                segments.last_mut()?.push('[');
                i += 2;
            }
            Some(b'0') => {
                let hex = rest.get(i + 2..i + 6)?;
                units.push(u16::from_str_radix(hex, 16).ok()?);
                i += 6;
            }
            Some(b'_') if !matches!(bytes.get(i + 2), Some(b'0' | b'1')) => {
                // overload signature suffix; descriptors never start with
                // `_0` or `_1`, so those are a separator then an escape
                break;
            }
            _ => {
                flush(&mut units, segments.last_mut()?)?;
                segments.push(String::new());
                i += 1;
            }
        }
    }
    flush(&mut units, segments.last_mut()?)?;
    if segments.len() < 2 || segments.iter().any(String::is_empty) {
        return None;
    }
    let method = segments.pop()?;
    let class = segments.pop()?;
    Some((segments.join("."), class, method))
}

/// Explicit bindings from `qualified.Class.method` to a C function name,
/// for natives registered at run time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JniMap {
    entries: BTreeMap<String, String>,
}

impl JniMap {
    pub fn parse(text: &str, origin: &str) -> Result<JniMap> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| Error::ListFormat {
                path: origin.to_string(),
                line: i + 1,
                message: message.to_string(),
            };
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| err("expected `qualified.Class.method = c_function`"))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if !lhs.contains('.') || lhs.split('.').any(|s| !is_identifier(s)) {
                return Err(err("left side must be a dotted `Class.method` name"));
            }
            if !is_identifier(rhs) {
                return Err(err("right side must be a C identifier"));
            }
            entries.insert(lhs.to_string(), rhs.to_string());
        }
        Ok(JniMap { entries })
    }

    pub fn get(&self, qualified_method: &str) -> Option<&str> {
        self.entries.get(qualified_method).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn motivating_example_name() {
        assert_eq!(link_ffi("", "YuvOperator", "jniRotate"), "Java_YuvOperator_jniRotate");
    }

    #[test]
    fn package_dots_become_underscores() {
        assert_eq!(link_ffi("com.example", "Foo", "bar"), "Java_com_example_Foo_bar");
    }

    #[test]
    fn underscores_and_nested_classes_are_escaped() {
        assert_eq!(link_ffi("", "A", "do_it"), "Java_A_do_1it");
        assert_eq!(link_ffi("p", "Outer$Inner", "m"), "Java_p_Outer_00024Inner_m");
        assert_eq!(
            demangle("Java_p_Outer_00024Inner_m"),
            Some(("p".into(), "Outer$Inner".into(), "m".into()))
        );
    }

    #[test]
    fn non_ascii_uses_utf16_units() {
        let name = link_ffi("", "K", "caf\u{e9}");
        assert_eq!(name, "Java_K_caf_000e9");
        assert_eq!(demangle(&name).unwrap().2, "caf\u{e9}");
    }

    #[test]
    fn overload_suffix_is_ignored() {
        assert_eq!(
            demangle("Java_a_B_m__ILjava_lang_String_2"),
            Some(("a".into(), "B".into(), "m".into()))
        );
    }

    #[test]
    fn malformed_symbols_do_not_demangle() {
        assert_eq!(demangle("memcpy"), None);
        assert_eq!(demangle("Java_onlyone"), None);
        assert_eq!(demangle("Java_A_b_0zz"), None);
        assert_eq!(demangle("Java_A__"), None);
    }

    #[test]
    fn map_file_parses_and_rejects_garbage() {
        let map = JniMap::parse("# dynamic\ncom.x.Foo.bar = native_bar\n\n", "m.txt").unwrap();
        assert_eq!(map.get("com.x.Foo.bar"), Some("native_bar"));
        let err = JniMap::parse("ok.A.b = c\nnot a mapping\n", "m.txt").unwrap_err();
        assert!(matches!(err, Error::ListFormat { line: 2, .. }));
    }
}
