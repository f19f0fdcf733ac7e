//! The `ontoarch` command line.
//!
//! Reports go to standard output in the format chosen with `--format`;
//! one-line summaries and input errors go to standard error. Exit codes
//! are listed on [`Exit`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::conformance::{validate, ValidationOptions};
use crate::instance::InstanceModel;
use crate::model::wellformed::UNRESOLVED_IMPORT;
use crate::model::{check_ontology_wellformedness, Workspace};
use crate::refinement::{verify_refinement, MatrixReport, Mode, RefinementMap};
use crate::report::Report;
use crate::syntax::{self, serialize_report, Format, Renderable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Everything checked passes.
    Pass = 0,
    /// The report holds violations.
    Violations = 1,
    /// An input could not be read, parsed or resolved.
    InputError = 2,
    /// The command line itself is wrong.
    Usage = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ontoarch", version, about = "Check layered ontologies, instance models and refinement matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for reports.
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: FormatArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that ontologies are well formed. All files form one workspace.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Validate an instance model (.inst) against the ontologies given with it.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Treat the model as a fragment: skip minimum cardinalities and
        /// generalization-set completeness.
        #[arg(long)]
        partial: bool,
    },
    /// Verify a relationship refinement map; fails on any failing row or
    /// unmapped lower relationship.
    Refine {
        lower: PathBuf,
        upper: PathBuf,
        map: PathBuf,
        /// Require lower cardinalities to lie inside the upper ones.
        #[arg(long)]
        strict: bool,
    },
    /// Print the verification matrix. Verdicts are content, not exit status.
    Matrix {
        lower: PathBuf,
        upper: PathBuf,
        map: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn note(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn report(&mut self, r: &dyn Renderable, format: Format) {
        let text = serialize_report(r, format);
        let _ = self.out.write_all(text.as_bytes());
        if !text.ends_with('\n') {
            let _ = writeln!(self.out);
        }
    }
}

/// An input problem, already described on standard error.
struct InputError;

/// Runs the command line given by `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    Exit::Pass
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    Exit::Usage
                }
            };
        }
    };
    let mut io = Io { out, err };
    let format = Format::from(cli.format);
    let result = match cli.command {
        Command::Check { files } => cmd_check(&files, format, &mut io),
        Command::Validate { files, partial } => cmd_validate(&files, partial, format, &mut io),
        Command::Refine {
            lower,
            upper,
            map,
            strict,
        } => cmd_refine(&lower, &upper, &map, strict, format, &mut io).map(|r| {
            if r.status().as_str() == "pass" {
                Exit::Pass
            } else {
                Exit::Violations
            }
        }),
        Command::Matrix {
            lower,
            upper,
            map,
            strict,
        } => cmd_refine(&lower, &upper, &map, strict, format, &mut io).map(|_| Exit::Pass),
    };
    result.unwrap_or(Exit::InputError)
}

fn read(path: &Path, io: &mut Io<'_>) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| {
        io.note(format_args!("error: cannot read {}: {e}", path.display()));
        InputError
    })
}

fn parse<T>(
    path: &Path,
    io: &mut Io<'_>,
    parser: fn(&str) -> Result<syntax::Parsed<T>, syntax::ParseFailure>,
) -> Result<T, InputError> {
    let text = read(path, io)?;
    let name = path.display().to_string();
    match parser(&text) {
        Ok(p) => {
            for w in p.warnings {
                let mut w = w;
                w.span.file = Some(name.clone());
                io.note(w);
            }
            Ok(p.value)
        }
        Err(f) => {
            io.note(f.in_file(&name));
            Err(InputError)
        }
    }
}

fn load_workspace(paths: &[&Path], io: &mut Io<'_>) -> Result<Workspace, InputError> {
    let mut ws = Workspace::default();
    let mut failed = false;
    for path in paths {
        let Ok(ontologies) = parse(path, io, syntax::parse_ontologies) else {
            failed = true;
            continue;
        };
        for mut o in ontologies {
            o.spans.set_file(&path.display().to_string());
            if let Err(e) = ws.insert(o) {
                io.note(format_args!("error: {}: {e}", path.display()));
                failed = true;
            }
        }
    }
    if failed {
        Err(InputError)
    } else {
        Ok(ws)
    }
}

fn summarize(report: &Report) -> String {
    format!("{} ({} diagnostics)", report.status().as_str(), report.diagnostics.len())
}

fn cmd_check(files: &[PathBuf], format: Format, io: &mut Io<'_>) -> Result<Exit, InputError> {
    let paths: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    let ws = load_workspace(&paths, io)?;
    let mut all = Vec::new();
    for o in ws.iter() {
        all.extend(check_ontology_wellformedness(o, &ws));
    }
    let report = Report::new(all);
    for d in &report.diagnostics {
        if let Some(span) = &d.span {
            io.note(format_args!("{span}: {}: {}", d.code, d.message));
        }
    }
    io.report(&report, format);
    io.note(format_args!("check: {} ontologies, {}", ws.len(), summarize(&report)));
    if report.diagnostics.iter().any(|d| d.code == UNRESOLVED_IMPORT) {
        io.note("error: unresolved import; load the imported ontologies alongside");
        return Ok(Exit::InputError);
    }
    Ok(if report.is_pass() { Exit::Pass } else { Exit::Violations })
}

fn cmd_validate(files: &[PathBuf], partial: bool, format: Format, io: &mut Io<'_>) -> Result<Exit, InputError> {
    let (models, ontologies): (Vec<&Path>, Vec<&Path>) = files
        .iter()
        .map(PathBuf::as_path)
        .partition(|p| p.extension().is_some_and(|e| e == "inst"));
    let [model_path] = models.as_slice() else {
        io.note(format_args!(
            "error: validate takes exactly one .inst file, got {}",
            models.len()
        ));
        return Err(InputError);
    };
    let ws = load_workspace(&ontologies, io)?;
    let model: InstanceModel = parse(model_path, io, syntax::parse_instance_model)?;

    let Some(onto) = ws.get(&model.conforms_to) else {
        io.note(format_args!(
            "error: {} conforms to `{}`, which none of the given ontology files defines",
            model_path.display(),
            model.conforms_to
        ));
        return Err(InputError);
    };
    let problems = check_ontology_wellformedness(onto, &ws);
    if !problems.is_empty() {
        for d in &problems {
            io.note(format_args!("error: {}: {}: {}", onto.name, d.code, d.message));
        }
        io.note(format_args!("error: `{}` is not well formed; run `check` first", onto.name));
        return Err(InputError);
    }

    let options = if partial {
        ValidationOptions::partial()
    } else {
        ValidationOptions::complete()
    };
    let report = validate(&model, &ws, options).map_err(|e| {
        io.note(format_args!("error: {}: {e}", model_path.display()));
        InputError
    })?;
    io.report(&report, format);
    io.note(format_args!("validate {}: {}", model.name, summarize(&report)));
    Ok(if report.is_pass() { Exit::Pass } else { Exit::Violations })
}

fn cmd_refine(
    lower: &Path,
    upper: &Path,
    map: &Path,
    strict: bool,
    format: Format,
    io: &mut Io<'_>,
) -> Result<MatrixReport, InputError> {
    let ws = load_workspace(&[lower, upper], io)?;
    let map: RefinementMap = parse(map, io, syntax::parse_refinement_map)?;
    let mode = if strict { Mode::Strict } else { Mode::Default };
    let report = verify_refinement(&map, &ws, mode).map_err(|e| {
        io.note(format_args!("error: {e}"));
        InputError
    })?;
    io.report(&report, format);
    let failing = report.failing_rows().count();
    io.note(format_args!(
        "refine {} onto {}: {} of {} rows pass, {} unmapped: {}",
        map.lower,
        map.upper,
        report.rows.len() - failing,
        report.rows.len(),
        report.unmapped_lower.len(),
        report.status().as_str()
    ));
    Ok(report)
}
