//! Command-line front end: `index`, `query` and `export`.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 input parse error,
//! 3 user error (bad query, selector or config), 4 corrupt index.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::export::{context_csv, lattice_dot, lattice_json};
use crate::index::{IndexBundle, IndexConfig};
use crate::query::{parse_query_with, run_query, Neighborhood, QueryOptions};

#[derive(Debug, Parser)]
#[command(name = "fqx", version, about = "Fuzzy concept-lattice index and flexible queries over XML")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index bundle from an XML document.
    Index {
        xml: PathBuf,
        /// TOML or JSON settings file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rank objects against `attr[:degree]` terms.
    Query {
        bundle: PathBuf,
        #[arg(required = true)]
        terms: Vec<String>,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long)]
        json: bool,
        /// Also collect candidates from sub-concepts of the query concept.
        #[arg(long)]
        widen: bool,
        /// Lattice to query: `nested`, a seq number, `origin:N` or a node path.
        #[arg(long, default_value = "nested")]
        select: String,
    },
    /// Write a context or lattice of a bundle to a file.
    Export {
        bundle: PathBuf,
        #[arg(long, value_enum)]
        what: ExportKind,
        /// `nested`, a seq number, `seq:N`, `origin:N` or a node path.
        #[arg(long)]
        select: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    ContextCsv,
    LatticeDot,
    LatticeJson,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::EmptyInput => 2,
        Error::EmptyQuery
        | Error::UnknownAttribute { .. }
        | Error::QueryRange { .. }
        | Error::BadSelector(_)
        | Error::Config(_)
        | Error::DegreeOutOfRange { .. } => 3,
        Error::CorruptIndex(_) | Error::UnsupportedVersion { .. } => 4,
        _ => 1,
    }
}

/// Runs one command, writing its report to `out`.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    match cli.command {
        Command::Index { xml, config, output } => {
            let config = match config {
                Some(p) => IndexConfig::from_path(p)?,
                None => IndexConfig::default(),
            };
            let settings = config.resolve()?;
            let bundle = IndexBundle::build_from_path(&xml, &settings).map_err(|e| match e {
                Error::Parse { line, column, message } => Error::Parse {
                    line,
                    column,
                    message: format!("{}: {message}", xml.display()),
                },
                other => other,
            })?;
            bundle.save(&output)?;
            writeln!(
                out,
                "indexed {}: {} nodes, {} terms, {} contexts",
                xml.display(),
                bundle.nodes,
                bundle.lexicon.len(),
                bundle.entries.len()
            )?;
            for e in &bundle.entries {
                let (r, c) = e.context().shape();
                writeln!(out, "  seq {:>3}  {:<24} {r}x{c}  {} concepts", e.seq, e.path, e.lattice.len())?;
            }
            let (r, c) = bundle.nested.combined.shape();
            writeln!(out, "  nested    {} members {:<14} {r}x{c}  {} concepts", bundle.nested.members.len(), "", bundle.nested.lattice.len())?;
            writeln!(out, "wrote {}", output.display())?;
        }
        Command::Query { bundle, terms, limit, json, widen, select } => {
            let bundle = IndexBundle::load(&bundle)?;
            let selection = bundle.select(&select)?;
            // Arguments are tried whole (term text may contain spaces), then
            // split on whitespace.
            let ctx = selection.context();
            let q = match parse_query_with(&terms, ctx, Some(&bundle.lexicon)) {
                Err(e @ Error::UnknownAttribute { .. }) => {
                    let items: Vec<&str> = terms.iter().flat_map(|t| t.split_whitespace()).collect();
                    parse_query_with(&items, ctx, Some(&bundle.lexicon)).map_err(|_| e)?
                }
                other => other?,
            };
            let options = QueryOptions {
                limit,
                neighborhood: if widen {
                    Neighborhood::WithSubConcepts
                } else {
                    Neighborhood::SuperConcepts
                },
            };
            let result = run_query(selection.lattice(), &q, options)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&result.to_json(&q))?)?;
            } else {
                write!(out, "{}", result.to_table())?;
            }
        }
        Command::Export { bundle, what, select, output } => {
            let bundle = IndexBundle::load(&bundle)?;
            let selection = bundle.select(&select)?;
            let text = match what {
                ExportKind::ContextCsv => context_csv(selection.context()),
                ExportKind::LatticeDot => lattice_dot(selection.lattice(), selection.members()),
                ExportKind::LatticeJson => lattice_json(selection.lattice(), selection.members())?,
            };
            std::fs::write(&output, text)?;
            writeln!(out, "wrote {}", output.display())?;
        }
    }
    Ok(())
}

/// Parses `args`, runs, and returns the process exit code. Errors go to
/// standard error.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return 3;
        }
        Err(e) => {
            let _ = e.print();
            return 0;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fqx: {e}");
            exit_code(&e)
        }
    }
}
