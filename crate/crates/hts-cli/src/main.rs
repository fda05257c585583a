//! `hts` — check, analyze, and render hazard-target system models.
//!
//! Exit codes: 0 success, 1 model errors (error diagnostics or failed
//! lookups), 2 usage errors (bad arguments, unreadable files), 3
//! internal limits (path enumeration cap).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hts_core::diag::{Diagnostic, Severity};
use hts_core::dsl::{format_canonical, parse};
use hts_core::flowgraph::{build_flow_graph, classify_state, trace_event, FlowError, FlowGraph};
use hts_core::model::{Model, Tier};
use hts_core::report::{
    emit_dot_control, emit_dot_flow, emit_json, emit_report_markdown, AnalysisResults,
    EmitOptions, RankDir,
};
use hts_core::validate::validate;

const EXIT_OK: u8 = 0;
const EXIT_MODEL_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "hts", version, about = "Hazard-target system modeling and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArg {
    /// Model file (.hts)
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model, printing diagnostics
    Check {
        #[command(flatten)]
        input: InputArg,
        /// Emit diagnostics as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Emit the event-flow graph
    Graph {
        #[command(flatten)]
        input: InputArg,
        /// Output format
        #[arg(long, value_parser = ["dot", "json"], default_value = "dot")]
        format: String,
        /// Comma-separated tiers to include (macro,meso,micro,risk)
        #[arg(long, value_delimiter = ',')]
        tiers: Vec<String>,
        /// Layout direction for DOT output
        #[arg(long, value_parser = ["tb", "lr"], default_value = "tb")]
        rankdir: String,
        /// Write to a file instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the control-structure diagram
    Control {
        #[command(flatten)]
        input: InputArg,
        /// Write to a file instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate simple cause paths between two nodes
    Paths {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Maximum number of paths before giving up
        #[arg(long, default_value_t = hts_core::flowgraph::DEFAULT_PATH_CAP)]
        cap: usize,
    },
    /// List the causes of a node
    Causes {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        node: String,
        /// List all transitive contributors instead of direct causes
        #[arg(long)]
        transitive: bool,
        /// List root causes (contributors without causes of their own)
        #[arg(long)]
        roots: bool,
    },
    /// Map a macro-level event to its meso/micro correspondents
    Map {
        #[command(flatten)]
        input: InputArg,
        #[arg(long = "macro")]
        macro_event: String,
    },
    /// Classify the risk state for a set of violated constraints
    Classify {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated violated constraint ids
        #[arg(long, value_delimiter = ',')]
        violated: Vec<String>,
    },
    /// Propagate activation from seed nodes through the gates
    Propagate {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated seed node ids
        #[arg(long, value_delimiter = ',')]
        seed: Vec<String>,
    },
    /// Trace an adverse event to its constraint, loops, and controllers
    Trace {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        event: String,
    },
    /// Write the markdown accident report
    Report {
        #[command(flatten)]
        input: InputArg,
        /// Write to a file instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the canonical form of a model
    Fmt {
        #[command(flatten)]
        input: InputArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli.command))
}

fn read_source(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|err| {
        eprintln!("error: cannot read {}: {err}", path.display());
        EXIT_USAGE
    })
}

fn render_diagnostic(path: &Path, d: &Diagnostic) -> String {
    format!(
        "{} {} {}:{}:{} {}",
        d.code,
        d.severity,
        path.display(),
        d.span.line,
        d.span.column,
        d.message
    )
}

/// `check` prints findings on stdout: they are its requested output.
fn print_diagnostics(path: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        println!("{}", render_diagnostic(path, d));
    }
}

/// Analysis subcommands report findings as failures, on stderr.
fn eprint_diagnostics(path: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{}", render_diagnostic(path, d));
    }
}

/// Parse a file; on error diagnostics, report them and fail with exit 1.
fn load_model(path: &Path) -> Result<Model, u8> {
    let source = read_source(path)?;
    let (model, diagnostics) = parse(&source);
    match model {
        Some(model) => Ok(model),
        None => {
            eprint_diagnostics(path, &diagnostics);
            Err(EXIT_MODEL_ERROR)
        }
    }
}

/// Parse and validate; any error diagnostic fails with exit 1.
fn load_validated(path: &Path) -> Result<Model, u8> {
    let model = load_model(path)?;
    let report = validate(&model);
    if !report.is_validated() {
        eprint_diagnostics(path, &report.diagnostics);
        return Err(EXIT_MODEL_ERROR);
    }
    Ok(model)
}

fn load_graph(path: &Path) -> Result<(Model, FlowGraph), u8> {
    let model = load_validated(path)?;
    let graph = build_flow_graph(&model).map_err(|err| {
        eprintln!("{err}");
        EXIT_MODEL_ERROR
    })?;
    Ok((model, graph))
}

fn flow_error_exit(err: &FlowError) -> u8 {
    match err {
        FlowError::PathLimit(_) => EXIT_LIMIT,
        _ => EXIT_MODEL_ERROR,
    }
}

fn write_output(target: &Option<PathBuf>, content: &str) -> Result<(), u8> {
    match target {
        Some(path) => fs::write(path, content).map_err(|err| {
            eprintln!("error: cannot write {}: {err}", path.display());
            EXIT_USAGE
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_tiers(words: &[String]) -> Result<Vec<Tier>, u8> {
    let mut tiers = Vec::new();
    for w in words {
        match w.as_str() {
            "macro" => tiers.push(Tier::Macro),
            "meso" => tiers.push(Tier::Meso),
            "micro" => tiers.push(Tier::Micro),
            "risk" => tiers.push(Tier::Risk),
            other => {
                eprintln!("error: unknown tier `{other}` (expected macro, meso, micro, risk)");
                return Err(EXIT_USAGE);
            }
        }
    }
    Ok(tiers)
}

fn run(command: Command) -> u8 {
    match dispatch(command) {
        Ok(code) => code,
        Err(code) => code,
    }
}

fn dispatch(command: Command) -> Result<u8, u8> {
    match command {
        Command::Check { input, json } => {
            let source = read_source(&input.file)?;
            let (model, mut diagnostics) = parse(&source);
            if let Some(model) = &model {
                diagnostics.extend(validate(model).diagnostics);
            }
            let errors = diagnostics.iter().filter(|d| d.severity == Severity::Error).count();
            let warnings = diagnostics.len() - errors;
            if json {
                let body = serde_json_diagnostics(&diagnostics);
                println!("{body}");
            } else {
                print_diagnostics(&input.file, &diagnostics);
                println!("{errors} errors, {warnings} warnings");
            }
            Ok(if errors == 0 { EXIT_OK } else { EXIT_MODEL_ERROR })
        }
        Command::Graph { input, format, tiers, rankdir, output } => {
            let (model, graph) = load_graph(&input.file)?;
            let content = match format.as_str() {
                "json" => emit_json(&model, &[], &AnalysisResults::default()),
                _ => {
                    let mut options = EmitOptions::default().with_rankdir(match rankdir.as_str() {
                        "lr" => RankDir::LeftToRight,
                        _ => RankDir::TopToBottom,
                    });
                    let tiers = parse_tiers(&tiers)?;
                    if !tiers.is_empty() {
                        options = options.with_tiers(tiers);
                    }
                    emit_dot_flow(&graph, &options)
                }
            };
            write_output(&output, &content)?;
            Ok(EXIT_OK)
        }
        Command::Control { input, output } => {
            let (model, _) = load_graph(&input.file)?;
            write_output(&output, &emit_dot_control(&model))?;
            Ok(EXIT_OK)
        }
        Command::Paths { input, from, to, cap } => {
            let (_, graph) = load_graph(&input.file)?;
            let paths = graph.enumerate_paths_capped(&from, &to, cap).map_err(|err| {
                eprintln!("{err}");
                flow_error_exit(&err)
            })?;
            for path in paths {
                let ids: Vec<&str> = path.iter().map(|i| i.as_str()).collect();
                println!("{}", ids.join(" -> "));
            }
            Ok(EXIT_OK)
        }
        Command::Causes { input, node, transitive, roots } => {
            let (_, graph) = load_graph(&input.file)?;
            let result = if roots {
                graph.root_causes(&node)
            } else if transitive {
                graph.contributors(&node)
            } else {
                graph.direct_causes(&node)
            };
            let causes = result.map_err(|err| {
                eprintln!("{err}");
                flow_error_exit(&err)
            })?;
            for id in causes {
                println!("{id}");
            }
            Ok(EXIT_OK)
        }
        Command::Map { input, macro_event } => {
            let (_, graph) = load_graph(&input.file)?;
            let map = graph.cross_level_map(&macro_event).map_err(|err| {
                eprintln!("{err}");
                flow_error_exit(&err)
            })?;
            let join = |set: &BTreeSet<hts_core::Ident>| {
                set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
            };
            println!("meso: {}", join(&map.meso));
            println!("micro: {}", join(&map.micro));
            Ok(EXIT_OK)
        }
        Command::Classify { input, violated } => {
            let model = load_validated(&input.file)?;
            let ids: Vec<&str> = violated.iter().map(|s| s.as_str()).collect();
            let state = classify_state(&model, ids).map_err(|err| {
                eprintln!("{err}");
                flow_error_exit(&err)
            })?;
            for (hazard, severity) in &state.per_hazard {
                println!("{hazard}: {severity}");
            }
            println!("overall: {}", state.overall);
            Ok(EXIT_OK)
        }
        Command::Propagate { input, seed } => {
            let (_, graph) = load_graph(&input.file)?;
            let ids: Vec<&str> = seed.iter().map(|s| s.as_str()).collect();
            let active = graph.propagate(ids).map_err(|err| {
                eprintln!("{err}");
                flow_error_exit(&err)
            })?;
            for id in active {
                println!("{id}");
            }
            Ok(EXIT_OK)
        }
        Command::Trace { input, event } => {
            let model = load_validated(&input.file)?;
            let trace = trace_event(&model, &event).map_err(|err| {
                eprintln!("{err}");
                flow_error_exit(&err)
            })?;
            println!(
                "constraint: {} [{} {}] {}",
                trace.constraint.id,
                trace.constraint.kind.name(),
                trace.constraint.tier,
                trace.constraint.text
            );
            for lt in &trace.loops {
                let l = lt.control_loop;
                match lt.controller {
                    Some(c) => println!(
                        "loop: {} controller {} [{} {}] {}",
                        l.id,
                        c.id,
                        c.tier,
                        c.domain.name(),
                        c.label
                    ),
                    None => println!("loop: {} controller {}", l.id, l.controller),
                }
            }
            Ok(EXIT_OK)
        }
        Command::Report { input, output } => {
            let (model, graph) = load_graph(&input.file)?;
            write_output(&output, &emit_report_markdown(&model, &graph))?;
            Ok(EXIT_OK)
        }
        Command::Fmt { input } => {
            let model = load_model(&input.file)?;
            print!("{}", format_canonical(&model));
            Ok(EXIT_OK)
        }
    }
}

/// Minimal JSON rendering of diagnostics for `check --json`; shares the
/// object shape of the report module's export.
fn serde_json_diagnostics(diagnostics: &[Diagnostic]) -> String {
    // hts-core already depends on serde_json; reuse it through the
    // report module's types instead of a second dependency here.
    hts_core::report::diagnostics_json(diagnostics)
}
