//! `tm`: validate, inspect, simulate and export `.tm` models.
//!
//! Exit codes: 0 success, 1 the document or run has errors, 2 usage or I/O
//! problems.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tm_core::export::{export_chronology, export_dynamic, export_static, DotKind};
use tm_core::metamodel::{ActionKind, ThingTag};
use tm_core::sim::{SimError, DEFAULT_BUDGET};
use tm_core::{coverage, derive_chronology, parse, Diagnostic, ModelDocument, Simulator};

#[derive(Parser)]
#[command(name = "tm", version, about = "Thinging-machine model tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a model, printing diagnostics with source spans.
    Validate { file: PathBuf },
    /// List events, action coverage and the event chronology.
    Events { file: PathBuf },
    /// Run a scenario and print its trace and a summary.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        scenario: String,
        /// Maximum number of event firings.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Write the trace here instead of standard output.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Write a DOT document.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Output path; `-` is standard output. Defaults to `<model>.<kind>.dot`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print element counts.
    Stats { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Static,
    Dynamic,
    Chronology,
}

/// Failure of a command, mapped onto the exit-code contract.
enum Failure {
    Document,
    Io(String),
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Events { file } => events(&file),
        Command::Simulate {
            file,
            scenario,
            budget,
            trace,
        } => simulate(&file, &scenario, budget, trace.as_deref()),
        Command::Export { file, kind, out } => export(&file, kind, out.as_deref()),
        Command::Stats { file } => stats(&file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Document) => ExitCode::from(1),
        Err(Failure::Io(message)) => {
            eprintln!("tm: {message}");
            ExitCode::from(2)
        }
    }
}

fn print_all(diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{d}");
    }
}

fn load(path: &Path) -> Result<ModelDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    match parse(&text, &path.display().to_string()) {
        Ok(doc) => {
            print_all(&doc.warnings);
            Ok(doc)
        }
        Err(diagnostics) => {
            print_all(&diagnostics);
            Err(Failure::Document)
        }
    }
}

fn write_output(path: &Path, text: &str) -> Outcome {
    if path == Path::new("-") {
        io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string()))
    } else {
        fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
    }
}

fn validate(path: &Path) -> Outcome {
    let doc = load(path)?;
    println!(
        "{}: ok ({} thimacs, {} actions, {} events, {} scenarios, {} warnings)",
        path.display(),
        doc.model.thimacs.len(),
        doc.model.actions.len(),
        doc.events.len(),
        doc.scenarios.len(),
        doc.warnings.len()
    );
    Ok(())
}

fn events(path: &Path) -> Outcome {
    let doc = load(path)?;
    let chronology = derive_chronology(&doc.model, &doc.events).map_err(|d| {
        print_all(&[d]);
        Failure::Document
    })?;
    let mut events: Vec<_> = doc.events.iter().collect();
    events.sort_by(|a, b| a.id.cmp(&b.id));
    println!("events: {}", events.len());
    for e in events {
        print!("  {} region={} members={}", e.id, e.region.id, e.region.action_ids.len());
        match &e.description {
            Some(desc) => println!("  {desc:?}"),
            None => println!(),
        }
    }
    let cov = coverage(&doc.model, &doc.events);
    println!(
        "coverage: {}/{} actions ({:.1}%)",
        cov.covered.len(),
        cov.covered.len() + cov.uncovered.len(),
        cov.covered_percent()
    );
    for a in &cov.uncovered {
        println!("  uncovered {a}");
    }
    println!("chronology:");
    for e in &chronology.nodes {
        let forward: Vec<&str> = chronology
            .forward_edges
            .iter()
            .filter(|(from, _)| from == e)
            .map(|(_, to)| to.as_str())
            .collect();
        let repeat: Vec<&str> = chronology
            .repeat_edges
            .iter()
            .filter(|(from, _)| from == e)
            .map(|(_, to)| to.as_str())
            .collect();
        println!("  {e} -> [{}] repeat -> [{}]", forward.join(", "), repeat.join(", "));
    }
    Ok(())
}

fn simulate(path: &Path, scenario: &str, budget: usize, trace_out: Option<&Path>) -> Outcome {
    let doc = load(path)?;
    let report = |e: SimError| {
        print_all(&[e.to_diagnostic()]);
        Failure::Document
    };
    let mut sim = Simulator::new(&doc, scenario).map_err(report)?.with_budget(budget);
    let run = sim.run().map(|_| ()).map_err(report);

    let trace = sim.trace_text();
    match trace_out {
        Some(out) => write_output(out, &trace)?,
        None => print!("{trace}"),
    }
    let state = sim.state();
    print_all(&state.warnings);
    let fired: std::collections::BTreeSet<&str> = state.trace.iter().map(|o| o.event_id.as_str()).collect();
    let mut negative = Vec::new();
    for e in &doc.events {
        if sim.is_negative(&e.region.id).map_err(report)? {
            negative.push(e.id.as_str());
        }
    }
    negative.sort_unstable();
    println!("# scenario {scenario}");
    println!("# occurrences {}", state.trace.len());
    println!("# registered regions {}", state.registry.len());
    println!("# footprints {}", state.footprints.len());
    let fired: Vec<&str> = fired.into_iter().collect();
    println!("# fired {}", fired.len());
    for e in fired {
        println!("#   {e}");
    }
    println!("# negative {}", negative.len());
    for e in negative {
        println!("#   {e}");
    }
    run
}

fn export(path: &Path, kind: Kind, out: Option<&Path>) -> Outcome {
    let doc = load(path)?;
    let dot = match kind {
        Kind::Static => export_static(&doc.model),
        Kind::Dynamic => export_dynamic(&doc.model, &doc.events).map_err(|d| {
            print_all(&d);
            Failure::Document
        })?,
        Kind::Chronology => {
            let chronology = derive_chronology(&doc.model, &doc.events).map_err(|d| {
                print_all(&[d]);
                Failure::Document
            })?;
            export_chronology(&chronology)
        }
    };
    let default_name = default_out(&doc, dot.kind);
    let target = out.unwrap_or(&default_name);
    write_output(target, &dot.text)?;
    if target != Path::new("-") {
        println!("wrote {}", target.display());
    }
    Ok(())
}

fn default_out(doc: &ModelDocument, kind: DotKind) -> PathBuf {
    PathBuf::from(format!("{}.{}.dot", doc.model.name(), kind))
}

fn stats(path: &Path) -> Outcome {
    let doc = load(path)?;
    let model = &doc.model;
    let tagged = |tag| model.thimacs.iter().filter(|t| t.kind_note == Some(tag)).count();
    println!("thimacs {}", model.thimacs.len());
    println!("  material {}", tagged(ThingTag::Material));
    println!("  immaterial {}", tagged(ThingTag::Immaterial));
    println!("actions {}", model.actions.len());
    for kind in ActionKind::ALL {
        println!("  {} {}", kind, model.actions.iter().filter(|a| a.kind == kind).count());
    }
    println!("storage {}", model.actions.iter().filter(|a| a.storage).count());
    println!("flows {}", model.flows.len());
    println!("triggers {}", model.triggers.len());
    println!("events {}", doc.events.len());
    println!("scenarios {}", doc.scenarios.len());
    Ok(())
}
