//! `scitype`: list registered kinds, run conformance checks, execute
//! declarative workflows.
//!
//! Exit codes: 0 success, 1 check failures or data errors, 2 usage and
//! spec errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scitype_core::conformance::{self, defects, ConformanceReport};
use scitype_core::workflow::{self, WorkflowSpec};
use scitype_core::{Error, Registry, TagFilter};

#[derive(Parser)]
#[command(name = "scitype", version, about = "Scientific-type contracts for ML estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One row per registered kind.
    List {
        /// Keep kinds whose tag equals the value, e.g. `scitype=forecaster`.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run the conformance suite on one kind or on all of them.
    Check {
        /// Kind to check. The planted defect kinds are addressable by name.
        kind: Option<String>,
        #[arg(long, conflicts_with = "kind")]
        all: bool,
        /// With `--all`, also check the planted defect kinds.
        #[arg(long, requires = "all")]
        include_defects: bool,
        /// Write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Execute a TOML workflow and write its JSON evaluation report.
    Run {
        workflow: PathBuf,
        /// Overrides the workflow's `[output]` path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List { filter } => list(filter.as_deref()),
        Command::Check {
            kind,
            all,
            include_defects,
            output,
        } => check(kind.as_deref(), all, include_defects, output),
        Command::Run { workflow, output } => run(workflow, output),
    };
    ExitCode::from(code)
}

fn list(filter: Option<&str>) -> u8 {
    let filter = match filter.map(TagFilter::parse).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let registry = Registry::reference();
    let rows: Vec<[String; 5]> = registry
        .list(filter.as_ref())
        .into_iter()
        .map(|k| {
            let tag = |name: &str| k.tags().get(name).map_or_else(|| "-".to_string(), |v| v.to_string());
            [
                k.kind_name().to_string(),
                k.scitype().to_string(),
                tag("deterministic"),
                tag("composite"),
                tag("handles_missing"),
            ]
        })
        .collect();
    let header = ["kind", "scitype", "deterministic", "composite", "handles_missing"].map(String::from);
    let mut widths = header.clone().map(|h| h.len());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    for row in std::iter::once(&header).chain(&rows) {
        let line: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        println!("{}", line.join("  ").trim_end());
    }
    0
}

fn check(kind: Option<&str>, all: bool, include_defects: bool, output: Option<PathBuf>) -> u8 {
    let reports: Vec<ConformanceReport> = match (kind, all) {
        (Some(kind), false) => match conformance::check_estimator(&defects::defect_registry(), kind) {
            Ok(report) => vec![report],
            Err(e @ Error::Unregistered(_)) => {
                eprintln!("error: {e}");
                return 2;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        (None, true) => {
            let registry = if include_defects {
                defects::defect_registry()
            } else {
                Registry::reference()
            };
            conformance::check_all(&registry)
        }
        _ => {
            eprintln!("error: pass a kind name or --all");
            return 2;
        }
    };
    for report in &reports {
        print!("{}", report.to_text());
    }
    if let Some(path) = output {
        let json = if all {
            conformance::reports_to_json(&reports)
        } else {
            reports[0].to_json()
        };
        let written = json.map_err(|e| e.to_string()).and_then(|text| {
            std::fs::write(&path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
        });
        if let Err(e) = written {
            eprintln!("error: {e}");
            return 1;
        }
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.kind_name.as_str()).collect();
    if failed.is_empty() {
        0
    } else {
        eprintln!("conformance failures in: {}", failed.join(", "));
        1
    }
}

fn run(path: PathBuf, output: Option<PathBuf>) -> u8 {
    let outcome = WorkflowSpec::load(&path).and_then(|spec| {
        let report = workflow::run(&Registry::reference(), &spec)?;
        match output.or_else(|| spec.output.as_ref().map(|o| o.path.clone())) {
            Some(out) => report.write(out),
            None => report.to_json().map(|json| println!("{json}")),
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}
