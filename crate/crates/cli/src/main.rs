use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jniflow::report::{self, AnalysisConfig, OutputFormat};

#[derive(Parser)]
#[command(
    name = "jniflow",
    version,
    about = "Find unchecked buffer accesses reached from Java through JNI"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze a project and report source-to-sink paths.
    Analyze(AnalyzeArgs),
    /// Print the JSON schema of `--format json` output.
    Schema,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Project directory; uses its project.xml, else runs `srcml --position`.
    #[arg(long, required_unless_present = "srcml")]
    project: Option<PathBuf>,
    /// Pre-built srcML archive (takes precedence over --project).
    #[arg(long)]
    srcml: Option<PathBuf>,
    /// Source function list, one `qualified.Name.method/params` per line.
    #[arg(long)]
    sources: PathBuf,
    /// Directory of sink lists (input.txt, memory.txt, output.txt, utility.txt).
    #[arg(long)]
    sinks_dir: Option<PathBuf>,
    /// Explicit `qualified.Class.method = c_function` bindings.
    #[arg(long)]
    jni_map: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    max_paths_per_pair: u32,
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    value_chain_cap: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Sarif,
    Dot,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Sarif => OutputFormat::Sarif,
            Format::Dot => OutputFormat::Dot,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Cmd::Schema => {
            print!("{}", report::JSON_SCHEMA);
            ExitCode::SUCCESS
        }
        Cmd::Analyze(args) => analyze(args),
    }
}

fn analyze(args: AnalyzeArgs) -> ExitCode {
    if args.project.is_some() && args.srcml.is_some() {
        eprintln!("note: both --project and --srcml given; using the archive");
    }
    let config = AnalysisConfig {
        project_dir: args.project,
        srcml_archive: args.srcml,
        source_list: args.sources,
        sinks_dir: args.sinks_dir,
        jni_map: args.jni_map,
        format: args.format.into(),
        max_paths_per_pair: args.max_paths_per_pair as usize,
        value_chain_cap: args.value_chain_cap as usize,
    };
    let report = match report::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report::emit(&report, config.format);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write `{}`: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
