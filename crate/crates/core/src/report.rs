//! End-to-end driver and output formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::Command;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::ast::{self, AstUnit};
use crate::buffer::{self, AnalysisContext, BoundIssueKind, Verdict, DEFAULT_VALUE_CHAIN_CAP};
use crate::dataflow::{self, DataFlowGraph, JniMap};
use crate::diagnostics::{Diagnostic, Diagnostics};
use crate::error::{Error, Result};
use crate::slicer::{self, NodeKey};
use crate::source_sink::{self, Path, SinkCategory, SinkLists, SinkSite, SourceFnSpec};
use crate::symbols;

pub const TOOL_NAME: &str = "jniflow";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON schema for [`OutputFormat::Json`] documents.
pub const JSON_SCHEMA: &str = include_str!("../data/report.schema.json");

/// Archive name looked up inside a project directory before running srcml.
pub const PROJECT_ARCHIVE: &str = "project.xml";

/// Partial paths explored per (source, sink) pair when more than one path
/// is requested.
const K_PATHS_EXPANSION_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Sarif,
    Dot,
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub project_dir: Option<PathBuf>,
    pub srcml_archive: Option<PathBuf>,
    pub source_list: PathBuf,
    /// Falls back to the built-in lists when absent.
    pub sinks_dir: Option<PathBuf>,
    pub jni_map: Option<PathBuf>,
    pub format: OutputFormat,
    pub max_paths_per_pair: usize,
    pub value_chain_cap: usize,
}

impl AnalysisConfig {
    pub fn new(source_list: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            project_dir: None,
            srcml_archive: None,
            source_list: source_list.into(),
            sinks_dir: None,
            jni_map: None,
            format: OutputFormat::Text,
            max_paths_per_pair: 1,
            value_chain_cap: DEFAULT_VALUE_CHAIN_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.project_dir.is_none() && self.srcml_archive.is_none() {
            return Err(Error::Config(
                "either a project directory or a srcML archive is required".into(),
            ));
        }
        if self.max_paths_per_pair == 0 {
            return Err(Error::Config("max paths per pair must be at least 1".into()));
        }
        if self.value_chain_cap == 0 {
            return Err(Error::Config("value chain cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Note,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub id: String,
    pub category: SinkCategory,
    pub verdict: Verdict,
    pub path: Path,
    /// Line of the sink statement; the path's last node carries the sink
    /// variable's definition line instead.
    pub sink_line: u32,
    pub message: String,
}

impl Warning {
    pub fn kind(&self) -> Option<BoundIssueKind> {
        match self.verdict {
            Verdict::Vulnerable(k) => Some(k),
            _ => None,
        }
    }

    pub fn severity(&self) -> Severity {
        match self.verdict {
            Verdict::Vulnerable(_) => Severity::Warning,
            _ => Severity::Note,
        }
    }

    pub fn source(&self) -> &NodeKey {
        self.path.source()
    }

    /// The sink node with its line moved to the sink statement.
    pub fn sink_location(&self) -> NodeKey {
        NodeKey {
            line: self.sink_line,
            ..self.path.sink().clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub warnings: Vec<Warning>,
    pub diagnostics: Vec<Diagnostic>,
    pub graph: DataFlowGraph,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.warnings.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Units from the configured archive, or from the project directory (its
/// `project.xml`, else the output of `srcml --position`).
pub fn ingest(config: &AnalysisConfig, diags: &mut Diagnostics) -> Result<Vec<AstUnit>> {
    let xml = match (&config.srcml_archive, &config.project_dir) {
        (Some(archive), project) => {
            if project.is_some() {
                diags.note(
                    "archive-preferred",
                    "both a project and an archive were given; using the archive",
                );
            }
            std::fs::read(archive).map_err(|e| Error::io(archive, e))?
        }
        (None, Some(dir)) => {
            if !dir.is_dir() {
                return Err(Error::Config(format!(
                    "project directory `{}` does not exist",
                    dir.display()
                )));
            }
            let cached = dir.join(PROJECT_ARCHIVE);
            if cached.is_file() {
                std::fs::read(&cached).map_err(|e| Error::io(&cached, e))?
            } else {
                run_srcml(dir)?
            }
        }
        (None, None) => unreachable!("validated"),
    };
    let archive = ast::read_archive(&xml)?;
    for (file, language) in &archive.skipped {
        diags.note("skipped-unit", format!("{file}: language `{language}` is not analysed"));
    }
    Ok(archive.units)
}

fn run_srcml(dir: &FsPath) -> Result<Vec<u8>> {
    let out = Command::new("srcml")
        .arg("--position")
        .arg(dir)
        .output()
        .map_err(|e| Error::Converter(format!("cannot run `srcml` ({e}); pass a pre-built archive instead")))?;
    if !out.status.success() {
        return Err(Error::Converter(
            String::from_utf8_lossy(&out.stderr).trim().to_string(),
        ));
    }
    Ok(out.stdout)
}

fn read_text(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn run(config: &AnalysisConfig) -> Result<Report> {
    config.validate()?;
    let specs = source_sink::load_source_list(&config.source_list)?;
    let lists = match &config.sinks_dir {
        Some(dir) => SinkLists::load_dir(dir)?,
        None => SinkLists::default(),
    };
    let jni_map = match &config.jni_map {
        Some(p) => JniMap::parse(&read_text(p)?, &p.display().to_string())?,
        None => JniMap::default(),
    };
    let mut diags = Diagnostics::new();
    let units = ingest(config, &mut diags)?;
    Ok(analyze_units(&units, &specs, &lists, &jni_map, config, diags))
}

/// The pipeline after ingestion.
pub fn analyze_units(
    units: &[AstUnit],
    specs: &[SourceFnSpec],
    lists: &SinkLists,
    jni_map: &JniMap,
    config: &AnalysisConfig,
    mut diags: Diagnostics,
) -> Report {
    let symbols = symbols::collect_symbols(units);
    diags.extend(symbols.diagnostics().clone());
    let map = slicer::build_all(units, &symbols);
    let mut graph = dataflow::analyse_slices(&map, jni_map, &mut diags);

    let sites = source_sink::find_sink_sites(units, &map, lists);
    for site in &sites {
        for (k, _) in &site.participants {
            if graph.contains(k) {
                graph.mark_sink(k, site.category);
            }
        }
    }
    let sources = source_sink::match_sources(&graph, &map, &symbols, specs);
    for s in &sources {
        graph.mark_source(s);
    }

    let ctx = AnalysisContext {
        map: &map,
        units,
        value_chain_cap: config.value_chain_cap,
    };
    let verdicts: Vec<Verdict> = sites.iter().map(|s| buffer::analyze_site(s, &ctx)).collect();

    let mut warnings = Vec::new();
    for src in &sources {
        let tree = source_sink::bfs_tree(&graph, src);
        for (site, verdict) in sites.iter().zip(&verdicts) {
            if verdict.is_guarded() {
                continue;
            }
            // one warning per (source, site), reported at its highest-ranked
            // reachable participant
            let Some((sink, _)) = site
                .participants
                .iter()
                .filter(|(k, _)| tree.contains_key(k))
                .min_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)))
            else {
                continue;
            };
            let paths = if config.max_paths_per_pair > 1 {
                source_sink::k_paths(
                    &graph,
                    src,
                    sink,
                    site.category,
                    config.max_paths_per_pair,
                    K_PATHS_EXPANSION_CAP,
                )
            } else {
                source_sink::path_from_tree(&tree, sink, site.category)
                    .filter(Path::crosses_ffi)
                    .into_iter()
                    .collect()
            };
            for (i, path) in paths.into_iter().enumerate() {
                let n = (config.max_paths_per_pair > 1).then_some(i);
                warnings.push(make_warning(site, verdict.clone(), path, n));
            }
        }
    }
    warnings.sort_by(|a, b| {
        (a.source(), &a.path.sink().file, a.sink_line, &a.id).cmp(&(
            b.source(),
            &b.path.sink().file,
            b.sink_line,
            &b.id,
        ))
    });
    warnings.dedup_by(|a, b| a.id == b.id);
    Report {
        warnings,
        diagnostics: diags.into_sorted(),
        graph,
    }
}

fn make_warning(site: &SinkSite<'_>, verdict: Verdict, path: Path, index: Option<usize>) -> Warning {
    let kind = match &verdict {
        Verdict::Vulnerable(k) => k.name(),
        _ => "Inconclusive",
    };
    let mut h = Sha256::new();
    h.update(format!("{}\n{}\n{}\n{}", path.source(), path.sink(), kind, site.line));
    if let Some(i) = index {
        h.update(format!("\n{i}"));
    }
    let id: String = h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect();
    let src = path.source();
    let sink = path.sink();
    let message = match &verdict {
        Verdict::Vulnerable(k) => format!(
            "data from `{}` in {} reaches `{}` at {}:{} without a bound check ({})",
            src.var,
            src.function,
            sink.var,
            site.file,
            site.line,
            describe(*k)
        ),
        Verdict::Inconclusive(reason) => format!(
            "data from `{}` in {} reaches {} sink `{}` at {}:{}; bound not decided: {reason}",
            src.var, src.function, site.category, sink.var, site.file, site.line
        ),
        Verdict::Guarded { .. } => unreachable!("guarded paths are filtered"),
    };
    Warning {
        id,
        category: site.category,
        verdict,
        path,
        sink_line: site.line,
        message,
    }
}

fn describe(kind: BoundIssueKind) -> &'static str {
    match kind {
        BoundIssueKind::IndexedAccessUnchecked => "index not compared with the buffer size",
        BoundIssueKind::BufferAssignNoSizeCheck => "buffer assigned with no size check on either side",
        BoundIssueKind::BufferAssignUnguarded => "buffer sizes taken but the assignment is not guarded",
        BoundIssueKind::MemFnNoSizeGuard => "memory function called without a size guard on the destination",
    }
}

pub fn emit(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => emit_text(report),
        OutputFormat::Json => emit_json(report),
        OutputFormat::Sarif => emit_sarif(report),
        OutputFormat::Dot => emit_dot(report),
    }
}

fn location(k: &NodeKey) -> serde_json::Value {
    json!({"file": k.file, "function": k.function, "var": k.var, "line": k.line})
}

pub fn emit_json(report: &Report) -> String {
    let warnings: Vec<_> = report
        .warnings
        .iter()
        .map(|w| {
            json!({
                "id": w.id,
                "category": w.category.name(),
                "kind": w.kind().map(BoundIssueKind::name),
                "severity": w.severity(),
                "message": w.message,
                "source": location(w.source()),
                "sink": location(&w.sink_location()),
                "path": w.path.nodes.iter().map(location).collect::<Vec<_>>(),
                "edges": w.path.reasons.iter().map(|r| r.label()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "version": VERSION,
        "toolName": TOOL_NAME,
        "warnings": warnings,
        "diagnostics": report.diagnostics,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn sarif_location(k: &NodeKey, message: Option<String>) -> serde_json::Value {
    let mut loc = json!({
        "physicalLocation": {
            "artifactLocation": {"uri": k.file},
            "region": {"startLine": k.line},
        },
        "logicalLocations": [{"name": k.var, "fullyQualifiedName": format!("{}:{}", k.function, k.var)}],
    });
    if let Some(m) = message {
        loc["message"] = json!({"text": m});
    }
    loc
}

pub fn emit_sarif(report: &Report) -> String {
    let mut rules: BTreeMap<&str, &str> = BTreeMap::new();
    let results: Vec<_> =
        report
            .warnings
            .iter()
            .map(|w| {
                let rule = w.kind().map(BoundIssueKind::name).unwrap_or("Inconclusive");
                rules.insert(
                    rule,
                    w.kind()
                        .map(describe)
                        .unwrap_or("tainted data reaches a sink whose bound could not be decided"),
                );
                let steps: Vec<_> = w
                .path
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let via = i.checked_sub(1).map(|j| format!("{} via {}", n.var, w.path.reasons[j].label()));
                    json!({"location": sarif_location(n, Some(via.unwrap_or_else(|| format!("{} (source)", n.var))))})
                })
                .collect();
                json!({
                    "ruleId": rule,
                    "level": match w.severity() { Severity::Warning => "warning", Severity::Note => "note" },
                    "message": {"text": w.message},
                    "locations": [sarif_location(&w.sink_location(), None)],
                    "relatedLocations": [{
                        "id": 0,
                        "physicalLocation": sarif_location(w.source(), None)["physicalLocation"].clone(),
                        "message": {"text": format!("source `{}`", w.source().var)},
                    }],
                    "codeFlows": [{"threadFlows": [{"locations": steps}]}],
                    "partialFingerprints": {"jniflowId/v1": w.id},
                    "properties": {"category": w.category.name()},
                })
            })
            .collect();
    let rules: Vec<_> = rules
        .into_iter()
        .map(|(id, text)| json!({"id": id, "shortDescription": {"text": text}}))
        .collect();
    let notifications: Vec<_> = report
        .diagnostics
        .iter()
        .map(|d| {
            let mut n = json!({"descriptor": {"id": d.code}, "message": {"text": d.message}, "level": "note"});
            if let (Some(f), Some(l)) = (&d.file, d.line) {
                n["locations"] =
                    json!([{"physicalLocation": {"artifactLocation": {"uri": f}, "region": {"startLine": l}}}]);
            }
            n
        })
        .collect();
    let doc = json!({
        "$schema": "https://json.schemastore.org/sarif-2.1.0.json",
        "version": "2.1.0",
        "runs": [{
            "tool": {"driver": {"name": TOOL_NAME, "version": VERSION, "rules": rules}},
            "invocations": [{"executionSuccessful": true, "toolExecutionNotifications": notifications}],
            "results": results,
        }],
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    for w in &report.warnings {
        let label = w.kind().map(BoundIssueKind::name).unwrap_or("Inconclusive");
        let sev = match w.severity() {
            Severity::Warning => "warning",
            Severity::Note => "note",
        };
        let _ = writeln!(out, "{sev}[{label}] {} ({})", w.message, w.category);
        let _ = writeln!(out, "  id: {}", w.id);
        let _ = writeln!(out, "  source: {}", w.source());
        let _ = writeln!(out, "  sink:   {}", w.sink_location());
        let _ = writeln!(out, "  path:");
        for (i, n) in w.path.nodes.iter().enumerate() {
            match i.checked_sub(1) {
                None => {
                    let _ = writeln!(out, "    {n}");
                }
                Some(j) => {
                    let _ = writeln!(out, "    -> {n}  [{}]", w.path.reasons[j].label());
                }
            }
        }
        out.push('\n');
    }
    let vulnerable = report.warnings.iter().filter(|w| w.kind().is_some()).count();
    let _ = writeln!(
        out,
        "{} warning(s): {vulnerable} vulnerable, {} inconclusive",
        report.warnings.len(),
        report.warnings.len() - vulnerable
    );
    for d in &report.diagnostics {
        match (&d.file, d.line) {
            (Some(f), Some(l)) => {
                let _ = writeln!(out, "note[{}] {f}:{l}: {}", d.code, d.message);
            }
            _ => {
                let _ = writeln!(out, "note[{}] {}", d.code, d.message);
            }
        }
    }
    out
}

pub fn emit_dot(report: &Report) -> String {
    report.graph.to_dot()
}
