//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::oracles::{self, DECOYS, SINK_EXAMPLES};
use jniflow::ast::Language;
use jniflow::buffer::Verdict;
use jniflow::dataflow::{self, demangle, link_ffi, JniMap};
use jniflow::diagnostics::Diagnostics;
use jniflow::report::{self, Report};
use jniflow::slicer;
use jniflow::source_sink::{self, SinkCategory, SinkLists};
use jniflow::symbols::collect_symbols;
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(name: &str) -> Result<Report, String> {
    report::run(&common::config(name)).map_err(|e| format!("{name}: {e}"))
}

fn vulnerable(r: &Report) -> usize {
    r.warnings
        .iter()
        .filter(|w| matches!(w.verdict, Verdict::Vulnerable(_)))
        .count()
}

fn motivating_example() -> Outcome {
    let start = Instant::now();
    let r = run("motivating")?;
    let elapsed = start.elapsed();
    ensure(r.warnings.len() == 1 && vulnerable(&r) == 1, || {
        format!("{} warnings, {} vulnerable", r.warnings.len(), vulnerable(&r))
    })?;
    let w = &r.warnings[0];
    let (src, sink) = (w.source(), w.sink_location());
    let src_ok = src.file.ends_with(".java") && src.function == "rotate" && src.var == "yuv" && src.line == 5;
    let sink_lang = r.graph.language(w.path.sink());
    let sink_ok = sink_lang == Some(Language::CPlusPlus)
        && w.category == SinkCategory::BufferAccess
        && sink.var == "yuvCopy"
        && sink.line == 12;
    ensure(src_ok && sink_ok, || {
        format!("source {src}, sink {sink} ({sink_lang:?}, {})", w.category)
    })?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{src} -> {sink} in {elapsed:.2?}"))
}

fn guarded_variants() -> Outcome {
    let mut counts = Vec::new();
    for name in ["guarded_index", "motivating_memcpy_guarded", "memcpy_sizeof_guarded"] {
        let n = vulnerable(&run(name)?);
        ensure(n == 0, || format!("{name}: {n} vulnerable"))?;
        counts.push(format!("{name}=0"));
    }
    // the unguarded twin must still fire, or the zero above means nothing
    let twin = vulnerable(&run("motivating_memcpy_unguarded")?);
    ensure(twin == 1, || format!("unguarded twin: {twin} vulnerable"))?;
    Ok(format!("{} (unguarded twin=1)", counts.join(", ")))
}

fn profile_counts() -> Outcome {
    let units = common::units("motivating");
    let java: Vec<_> = units.iter().filter(|u| u.language == Language::Java).cloned().collect();
    let map = slicer::build_all(&java, &collect_symbols(&java));
    ensure(map.len() == 4, || {
        format!("motivating Java side gave {} profiles", map.len())
    })?;
    let mut total = 0;
    let names = common::fixture_names();
    for name in &names {
        let units = common::units(name);
        let map = slicer::build_all(&units, &collect_symbols(&units));
        let got: std::collections::BTreeSet<_> = map
            .values()
            .map(|p| (p.file_name.clone(), p.function_name.clone(), p.var_name.clone()))
            .collect();
        let want = common::profile_oracle::expected_profile_keys(&units);
        ensure(got == want, || {
            let missing: Vec<_> = want.difference(&got).collect();
            let extra: Vec<_> = got.difference(&want).collect();
            format!("{name}: missing {missing:?}, extra {extra:?}")
        })?;
        total += got.len();
    }
    Ok(format!(
        "Java side = 4; {total} profiles over {} fixtures match the AST walk",
        names.len()
    ))
}

fn jni_mangling() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut underscores = 0;
    for _ in 0..1000 {
        let (p, c, m) = oracles::random_triple(&mut rng);
        let name = link_ffi(&p, &c, &m);
        let spec = oracles::jni_spec_name(&p, &c, &m);
        ensure(name == spec, || format!("({p}, {c}, {m}): {name} vs {spec}"))?;
        let back = demangle(&name);
        ensure(back.as_ref() == Some(&(p.clone(), c.clone(), m.clone())), || {
            format!("{name} demangled to {back:?}")
        })?;
        if [&p, &c, &m].iter().any(|s| s.contains('_')) {
            underscores += 1;
        }
    }
    let example = link_ffi("", "YuvOperator", "jniRotate");
    ensure(example == "Java_YuvOperator_jniRotate", || example.clone())?;
    Ok(format!(
        "1000 triples round-trip ({underscores} with underscores); {example}"
    ))
}

fn path_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let mut pairs = 0;
    for i in 0..100 {
        pairs += oracles::check_random_graph(&mut rng, 3).map_err(|e| format!("graph {i}: {e}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("100 graphs, {pairs} source/sink pairs agree in {elapsed:.2?}"))
}

fn sink_classification() -> Outcome {
    let lists = SinkLists::default();
    let mut n = 0;
    for (cat, names) in SINK_EXAMPLES {
        for name in *names {
            let got = oracles::classify_call(name, &lists);
            ensure(got == Some(*cat), || format!("{name}: {got:?}, want {cat}"))?;
            n += 1;
        }
    }
    for name in DECOYS {
        let got = oracles::classify_call(name, &lists);
        ensure(got.is_none(), || format!("decoy {name}: {got:?}"))?;
    }
    Ok(format!("{n} listed functions, {} decoys", DECOYS.len()))
}

fn source_marks(name: &str) -> Result<usize, String> {
    let units = common::units(name);
    let symbols = collect_symbols(&units);
    let map = slicer::build_all(&units, &symbols);
    let graph = dataflow::analyse_slices(&map, &JniMap::default(), &mut Diagnostics::new());
    let specs = source_sink::load_source_list(&common::fixtures_dir().join(name).join("sources.txt"))
        .map_err(|e| e.to_string())?;
    Ok(source_sink::match_sources(&graph, &map, &symbols, &specs).len())
}

fn source_filters() -> Outcome {
    let local = source_marks("source_local_call")?;
    let arity = source_marks("source_arity_mismatch")?;
    let matched = source_marks("source_call_match")?;
    ensure((local, arity, matched) == (0, 0, 1), || {
        format!("local {local}, arity {arity}, match {matched}")
    })?;
    Ok("local call 0, arity mismatch 0, matching call 1".into())
}

fn corpus_outputs() -> Result<(String, String), String> {
    let (mut json, mut sarif) = (String::new(), String::new());
    for name in common::fixture_names() {
        let r = run(&name)?;
        json.push_str(&report::emit_json(&r));
        sarif.push_str(&report::emit_sarif(&r));
    }
    Ok((json, sarif))
}

fn determinism() -> Outcome {
    let a = corpus_outputs()?;
    let b = corpus_outputs()?;
    ensure(a == b, || "outputs differ between runs".into())?;
    Ok(format!(
        "{} bytes of JSON and {} of SARIF identical",
        a.0.len(),
        a.1.len()
    ))
}

fn corpus_regression() -> Outcome {
    let names = common::fixture_names();
    ensure(names.len() >= 12, || format!("only {} fixtures", names.len()))?;
    let mut kinds = std::collections::BTreeSet::new();
    for name in &names {
        let r = run(name)?;
        let got: Vec<String> = r.warnings.iter().map(common::golden_line).collect();
        let want = common::golden(name);
        ensure(got == want, || format!("{name}: got {got:?}, want {want:?}"))?;
        kinds.extend(r.warnings.iter().filter_map(|w| w.kind()));
    }
    ensure(kinds.len() == 4, || format!("only {kinds:?} covered"))?;
    Ok(format!(
        "{} fixtures, zero diffs, all 4 issue kinds covered",
        names.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("motivating example", motivating_example),
        ("guarded variants", guarded_variants),
        ("slice profile counts", profile_counts),
        ("JNI mangling", jni_mangling),
        ("path-finding oracle", path_oracle),
        ("sink classification", sink_classification),
        ("source filters", source_filters),
        ("determinism", determinism),
        ("corpus regression", corpus_regression),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
