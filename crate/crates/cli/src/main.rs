use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gcs_cli::render::{self, Style};
use gcs_cli::{InputError, Scenario, Suite, EXIT_INVALID};
use gcs_core::builtins::CATALOG;

/// Exact verification of generalized complex structures on a coordinate chart.
#[derive(Parser)]
#[command(name = "gcsv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a builtin by name.
    Run {
        scenario: String,
        /// Suites to run (overrides the scenario); repeatable.
        #[arg(long = "suite", value_parser = parse_suite, num_args = 1..)]
        suites: Vec<Suite>,
        /// Multiplier degree of the test batteries.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-suite wall-clock time.
        #[arg(long)]
        timing: bool,
    },
    /// List the builtin examples.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check that a scenario parses and validates, and print its canonical form.
    Validate { scenario: String },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Suite::CONCRETE.iter().map(|s| s.name()).collect();
        format!("unknown suite '{}' (expected one of: all, {})", s, names.join(", "))
    })
}

fn invalid(e: InputError) -> ExitCode {
    eprintln!("error: {}", e);
    ExitCode::from(EXIT_INVALID as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { format } => {
            list(format);
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => {
            let s = match Scenario::locate(&scenario) {
                Ok(s) => s,
                Err(e) => return invalid(e),
            };
            match s.resolve() {
                Ok(_) => {
                    println!("{}", s.canonical().to_json());
                    ExitCode::SUCCESS
                }
                Err(e) => invalid(e),
            }
        }
        Command::Run {
            scenario,
            suites,
            degree,
            format,
            out,
            timing,
        } => {
            let mut s = match Scenario::locate(&scenario) {
                Ok(s) => s,
                Err(e) => return invalid(e),
            };
            if !suites.is_empty() {
                s.suites = suites;
            }
            if let Some(d) = degree {
                s.max_degree = d;
            }
            let resolved = match s.resolve() {
                Ok(r) => r,
                Err(e) => return invalid(e),
            };
            let report = gcs_cli::run(&resolved);
            let style = Style {
                color: out.is_none()
                    && format == Format::Text
                    && Style::color_from_env(std::io::stdout().is_terminal()),
                timing,
            };
            let body = match format {
                Format::Text => render::text(&report, style),
                Format::Json => render::json(&report, style),
            };
            let written = match &out {
                Some(p) => std::fs::write(p, &body).map_err(|e| format!("{}: {}", p.display(), e)),
                None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {}", e);
                return ExitCode::from(EXIT_INVALID as u8);
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}

fn list(format: Format) {
    match format {
        Format::Text => {
            for b in CATALOG.iter() {
                let tag = if b.negative_control { " (negative control)" } else { "" };
                println!("{:<24} {}{}", b.name, b.description, tag);
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = CATALOG
                .iter()
                .map(|b| {
                    serde_json::json!({
                        "name": b.name,
                        "description": b.description,
                        "negative_control": b.negative_control,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&items).expect("catalog serializes"));
        }
    }
}
