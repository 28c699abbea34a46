//! Reference implementations that share no code with the library.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use jniflow::ast::{self, Language, NodeKind};
use jniflow::dataflow::{DataFlowGraph, EdgeReason};
use jniflow::slicer::NodeKey;
use jniflow::source_sink::{self, SinkCategory, SinkLists};
use rand::Rng;

/// Mangling as the JNI specification states it: take the fully qualified
/// class name with `/` separators, append `/` and the method, then escape
/// each UTF-16 unit and turn `/` into `_`.
pub fn jni_spec_name(package: &str, class: &str, method: &str) -> String {
    let mut qualified = package.replace('.', "/");
    if !qualified.is_empty() {
        qualified.push('/');
    }
    qualified.push_str(class);
    qualified.push('/');
    qualified.push_str(method);
    let mut out = String::from("Java_");
    for unit in qualified.encode_utf16() {
        match unit {
            0x2f => out.push('_'),
            0x5f => out.push_str("_1"),
            0x3b => out.push_str("_2"),
            0x5b => out.push_str("_3"),
            u if u < 0x80 && (u as u8).is_ascii_alphanumeric() => out.push(u as u8 as char),
            u => out.push_str(&format!("_0{u:04x}")),
        }
    }
    out
}

/// A random identifier drawn from letters, digits, `_`, `$` and two
/// non-ASCII letters.
pub fn random_ident(rng: &mut impl Rng) -> String {
    const FIRST: &[char] = &['a', 'Z', 'q', '_', '$', '\u{e9}', '\u{6f22}', 'x', 'M'];
    const REST: &[char] = &['a', 'Z', 'q', '_', '$', '\u{e9}', '\u{6f22}', '0', '7', '1', 'b'];
    let len = rng.gen_range(0..8);
    let mut s = String::new();
    s.push(FIRST[rng.gen_range(0..FIRST.len())]);
    for _ in 0..len {
        s.push(REST[rng.gen_range(0..REST.len())]);
    }
    s
}

/// Random `(package, class, method)` with up to three package segments and
/// an optional nested class.
pub fn random_triple(rng: &mut impl Rng) -> (String, String, String) {
    let segs: Vec<String> = (0..rng.gen_range(0..4)).map(|_| random_ident(rng)).collect();
    let mut class = random_ident(rng);
    if rng.gen_bool(0.3) {
        class = format!("{class}${}", random_ident(rng));
    }
    (segs.join("."), class, random_ident(rng))
}

pub struct LayeredGraph {
    pub graph: DataFlowGraph,
    pub java: Vec<NodeKey>,
    pub native: Vec<NodeKey>,
}

/// Java nodes and native nodes with random intra-layer edges and
/// Java-to-native FFI edges. At most 50 nodes and 200 edges.
pub fn random_layered_graph(rng: &mut impl Rng) -> LayeredGraph {
    let n_java = rng.gen_range(1..=25);
    let n_native = rng.gen_range(1..=25);
    let java: Vec<NodeKey> = (0..n_java)
        .map(|i| NodeKey {
            file: "App.java".into(),
            function: format!("m{}", i % 4),
            var: format!("v{i}"),
            line: i as u32 + 1,
        })
        .collect();
    let native: Vec<NodeKey> = (0..n_native)
        .map(|i| NodeKey {
            file: "lib.c".into(),
            function: format!("f{}", i % 4),
            var: format!("w{i}"),
            line: i as u32 + 1,
        })
        .collect();
    let mut graph = DataFlowGraph::new();
    for k in &java {
        graph.add_node(k.clone(), Language::Java);
    }
    for k in &native {
        graph.add_node(k.clone(), Language::C);
    }
    let all: Vec<&NodeKey> = java.iter().chain(&native).collect();
    let local = [EdgeReason::ArgPass, EdgeReason::Assign, EdgeReason::DVar];
    let target_edges = rng.gen_range(0..=200);
    for _ in 0..target_edges {
        let a = rng.gen_range(0..all.len());
        let b = rng.gen_range(0..all.len());
        let (a_java, b_java) = (a < n_java, b < n_java);
        let reason = match (a_java, b_java) {
            (false, true) => continue,
            (true, false) => EdgeReason::FfiLink,
            _ => local[rng.gen_range(0..local.len())],
        };
        graph.add_edge(all[a].clone(), all[b].clone(), reason);
    }
    LayeredGraph { graph, java, native }
}

/// Adjacency rebuilt from the raw edge list.
pub fn adjacency(graph: &DataFlowGraph) -> BTreeMap<NodeKey, BTreeSet<NodeKey>> {
    let mut adj: BTreeMap<NodeKey, BTreeSet<NodeKey>> = BTreeMap::new();
    for e in graph.edges() {
        adj.entry(e.from.clone()).or_default().insert(e.to.clone());
    }
    adj
}

/// Outcome of enumerating simple paths in (length, node sequence) order.
pub struct Enumeration {
    pub paths: Vec<Vec<NodeKey>>,
    /// The step budget ran out before `want` paths were found or every
    /// length was tried.
    pub exhausted_budget: bool,
}

/// First `want` simple paths from `src` to `sink` by length, ties broken by
/// comparing node sequences. Iterative deepening, pruned with the distance
/// to `sink` in the reversed graph.
pub fn simple_paths(
    adj: &BTreeMap<NodeKey, BTreeSet<NodeKey>>,
    src: &NodeKey,
    sink: &NodeKey,
    want: usize,
    budget: usize,
) -> Enumeration {
    let mut radj: BTreeMap<&NodeKey, Vec<&NodeKey>> = BTreeMap::new();
    let mut nodes: BTreeSet<&NodeKey> = BTreeSet::from([src, sink]);
    for (a, bs) in adj {
        nodes.insert(a);
        for b in bs {
            nodes.insert(b);
            radj.entry(b).or_default().push(a);
        }
    }
    let mut dist: BTreeMap<&NodeKey, usize> = BTreeMap::from([(sink, 0)]);
    let mut queue = VecDeque::from([sink]);
    while let Some(n) = queue.pop_front() {
        let d = dist[n];
        for &p in radj.get(n).into_iter().flatten() {
            dist.entry(p).or_insert_with(|| {
                queue.push_back(p);
                d + 1
            });
        }
    }
    let mut out = Enumeration {
        paths: Vec::new(),
        exhausted_budget: false,
    };
    let Some(&start) = dist.get(src) else {
        return out;
    };
    let mut steps = 0usize;
    for depth in start..nodes.len() {
        let mut stack = vec![src.clone()];
        if !dfs(adj, &dist, sink, depth, &mut stack, want, &mut out, &mut steps, budget) {
            out.exhausted_budget = true;
            return out;
        }
        if out.paths.len() >= want {
            break;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    adj: &BTreeMap<NodeKey, BTreeSet<NodeKey>>,
    dist: &BTreeMap<&NodeKey, usize>,
    sink: &NodeKey,
    depth: usize,
    stack: &mut Vec<NodeKey>,
    want: usize,
    out: &mut Enumeration,
    steps: &mut usize,
    budget: usize,
) -> bool {
    *steps += 1;
    if *steps > budget {
        return false;
    }
    let used = stack.len() - 1;
    let last = stack.last().unwrap().clone();
    if used == depth {
        if &last == sink {
            out.paths.push(stack.clone());
        }
        return true;
    }
    if &last == sink {
        return true;
    }
    for next in adj.get(&last).into_iter().flatten() {
        if out.paths.len() >= want {
            return true;
        }
        let Some(&d) = dist.get(next) else { continue };
        if d > depth - used - 1 || stack.contains(next) {
            continue;
        }
        stack.push(next.clone());
        let ok = dfs(adj, dist, sink, depth, stack, want, out, steps, budget);
        stack.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Check path search on one random graph against the enumerator.
pub fn check_random_graph(rng: &mut impl Rng, k: usize) -> Result<usize, String> {
    let lg = random_layered_graph(rng);
    let adj = adjacency(&lg.graph);
    let pick = |rng: &mut dyn rand::RngCore, from: &[NodeKey]| -> Vec<NodeKey> {
        (0..3).map(|_| from[rng.gen_range(0..from.len())].clone()).collect()
    };
    let sources = pick(rng, &lg.java);
    let sinks = pick(rng, &lg.native);
    let found = source_sink::find_paths(&lg.graph, &sources, &sinks);
    let mut checked = 0;
    let mut pairs: BTreeSet<(&NodeKey, &NodeKey)> = BTreeSet::new();
    for s in &sources {
        for t in &sinks {
            pairs.insert((s, t));
        }
    }
    for (s, t) in pairs {
        let oracle = simple_paths(&adj, s, t, k, 2_000_000);
        let shortest = found.iter().find(|p| p.source() == s && p.sink() == t);
        match (oracle.paths.first(), shortest) {
            (None, None) => {}
            (Some(o), Some(p)) => {
                if o.len() != p.nodes.len() {
                    return Err(format!("{s} -> {t}: shortest {} vs {}", o.len() - 1, p.len()));
                }
                for w in p.nodes.windows(2) {
                    if !adj.get(&w[0]).is_some_and(|n| n.contains(&w[1])) {
                        return Err(format!("{s} -> {t}: no edge {} -> {}", w[0], w[1]));
                    }
                }
            }
            (o, p) => {
                return Err(format!(
                    "{s} -> {t}: oracle {:?} vs find_paths {:?}",
                    o.is_some(),
                    p.is_some()
                ))
            }
        }
        if oracle.exhausted_budget {
            continue;
        }
        let ks: Vec<Vec<NodeKey>> = source_sink::k_paths(&lg.graph, s, t, SinkCategory::BufferAccess, k, usize::MAX)
            .into_iter()
            .map(|p| p.nodes)
            .collect();
        if ks != oracle.paths {
            return Err(format!("{s} -> {t}: k_paths {ks:?} vs oracle {:?}", oracle.paths));
        }
        checked += 1;
    }
    Ok(checked)
}

/// One call statement `callee(buf, n)` in a C unit.
pub fn call_statement_unit(callee: &str) -> Vec<u8> {
    let body = format!(
        r#"<expr_stmt pos:start="1:1"><expr><call><name>{callee}</name><argument_list>(<argument><expr><name>buf</name></expr></argument>, <argument><expr><name>n</name></expr></argument>)</argument_list></call></expr>;</expr_stmt>"#
    );
    super::archive(&[("C", "t.c", &body)])
}

/// Category assigned to `buf` in `callee(buf, n);`.
pub fn classify_call(callee: &str, lists: &SinkLists) -> Option<SinkCategory> {
    let units = ast::parse_srcml_archive(&call_statement_unit(callee)).unwrap();
    let stmt = units[0].nodes().find(|n| n.is(&NodeKind::ExprStmt)).unwrap();
    source_sink::classify_sink("buf", Language::C, stmt, lists)
}

/// Representative sink functions for each call category.
pub const SINK_EXAMPLES: &[(SinkCategory, &[&str])] = &[
    (
        SinkCategory::Input,
        &[
            "scanf", "fscanf", "sscanf", "vscanf", "vfscanf", "vsscanf", "fread", "getc", "fgetc", "getchar", "gets",
            "fgets",
        ],
    ),
    (
        SinkCategory::Memory,
        &[
            "memcpy", "memmove", "strcpy", "strncpy", "strcat", "strncat", "wcscpy", "wcscat",
        ],
    ),
    (
        SinkCategory::Output,
        &[
            "printf", "fprintf", "sprintf", "snprintf", "vprintf", "vsprintf", "putc", "fputc", "putchar", "puts",
            "fputs", "fwrite",
        ],
    ),
    (SinkCategory::Utility, &["realpath", "getwd", "getopt", "getpass"]),
];

/// Common library calls that are not sinks.
pub const DECOYS: &[&str] = &[
    "strlen", "malloc", "calloc", "free", "atoi", "strcmp", "memcmp", "abs", "sqrt", "time", "rand", "fopen", "fclose",
    "qsort", "exit", "toupper", "isdigit", "strchr", "strtol", "memset",
];
