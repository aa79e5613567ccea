//! The `bibnet` command line: ingest, count, aggregate, project, audit and
//! export.
//!
//! Exit codes are `0` on success, `1` on any input or usage error and `2`
//! when `--strict` is given and the conservation audit fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregation::aggregate_incidence;
use crate::counting::build_incidence;
use crate::export::{export_edgelist, export_graphml, export_pajek, format_weight, self_loop_mass};
use crate::ingest::{parse_aggregation_map, parse_records_csv_at, parse_records_jsonl_at};
use crate::model::{CountingScheme, IncidenceMatrix, Level, PaperRecord};
use crate::projection::{audit_projection, project};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONSERVED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "bibnet",
    version,
    about = "Bibliometric network matrices with conservation audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the network matrix and write it as a graph file.
    Build(BuildArgs),
    /// Print the conservation report for a corpus.
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
struct Pipeline {
    /// Paper records, `.csv` or `.jsonl`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    counting: Counting,
    /// Level of the entities named in the input.
    #[arg(long, default_value = "author", value_parser = parse_level)]
    level: Level,
    /// Aggregation map `entity_id,group_id`; repeat to chain maps.
    #[arg(long)]
    aggregate: Vec<PathBuf>,
    #[arg(long, value_parser = parse_level)]
    from: Vec<Level>,
    #[arg(long, value_parser = parse_level)]
    to: Vec<Level>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Exit with status 2 when conservation fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    pipeline: Pipeline,
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
    /// Output file, or `-` for standard output.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "on")]
    self_loops: Toggle,
    /// Print the conservation report.
    #[arg(long)]
    audit: bool,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    pipeline: Pipeline,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Counting {
    Full,
    Fractional,
    FractionalCustom,
}

impl From<Counting> for CountingScheme {
    fn from(c: Counting) -> Self {
        match c {
            Counting::Full => CountingScheme::Full,
            Counting::Fractional => CountingScheme::FractionalEqual,
            Counting::FractionalCustom => CountingScheme::FractionalCustom,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Edgelist,
    Pajek,
    Graphml,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Toggle {
    On,
    Off,
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse()
        .map_err(|e: crate::model::ModelError| e.to_string())
}

/// An error already formatted for the user.
struct Failure(String);

impl<E: std::fmt::Display> From<(&Path, E)> for Failure {
    fn from((path, err): (&Path, E)) -> Self {
        Failure(format!("{}: {err}", path.display()))
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn load_records(path: &Path, level: Level) -> Result<Vec<PaperRecord>, Failure> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let bytes = read_file(path)?;
    match ext.as_deref() {
        Some("csv") => parse_records_csv_at(bytes.as_slice(), level).map_err(|e| (path, e).into()),
        Some("jsonl") | Some("ndjson") => {
            parse_records_jsonl_at(bytes.as_slice(), level).map_err(|e| (path, e).into())
        }
        _ => Err(Failure(format!(
            "{}: unknown input format, expected a .csv or .jsonl extension",
            path.display()
        ))),
    }
}

fn build_matrix(p: &Pipeline) -> Result<IncidenceMatrix, Failure> {
    if p.aggregate.len() != p.from.len() || p.aggregate.len() != p.to.len() {
        return Err(Failure(
            "every --aggregate needs exactly one --from and one --to".into(),
        ));
    }
    if !(p.tolerance.is_finite() && p.tolerance > 0.0) {
        return Err(Failure(format!(
            "--tolerance must be positive, got {}",
            p.tolerance
        )));
    }
    let records = load_records(&p.input, p.level)?;
    let mut a = build_incidence(&records, p.counting.into()).map_err(|e| (p.input.as_path(), e))?;
    for ((path, &from), &to) in p.aggregate.iter().zip(&p.from).zip(&p.to) {
        let map = parse_aggregation_map(read_file(path)?.as_slice(), from, to)
            .map_err(|e| (path.as_path(), e))?;
        a = aggregate_incidence(&a, &map).map_err(|e| (path.as_path(), e))?;
    }
    Ok(a)
}

fn write_output(path: &Path, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    if path == Path::new("-") {
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure(format!("cannot write output: {e}")))
    } else {
        fs::write(path, text).map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
    }
}

fn run_build(
    args: &BuildArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let a = build_matrix(&args.pipeline)?;
    let b = project(&a);
    let loops = args.self_loops == Toggle::On;
    if !loops {
        let _ = writeln!(
            stderr,
            "warning: self-loops dropped, discarding diagonal mass {}",
            format_weight(self_loop_mass(&b))
        );
    }
    let text = match args.format {
        Format::Edgelist => export_edgelist(&b, loops),
        Format::Pajek => export_pajek(&b, loops),
        Format::Graphml => export_graphml(&b, loops),
    };
    write_output(&args.output, &text, stdout)?;

    if args.audit || args.pipeline.strict {
        let report = audit_projection(&a, &b, args.pipeline.tolerance)
            .map_err(|e| Failure(e.to_string()))?;
        if args.audit {
            let _ = stdout.write_all(report.render().as_bytes());
        }
        if args.pipeline.strict && !report.conserved {
            return Ok(EXIT_NOT_CONSERVED);
        }
    }
    Ok(EXIT_OK)
}

fn run_audit(args: &AuditArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let a = build_matrix(&args.pipeline)?;
    let b = project(&a);
    let report =
        audit_projection(&a, &b, args.pipeline.tolerance).map_err(|e| Failure(e.to_string()))?;
    let _ = stdout.write_all(report.render().as_bytes());
    if args.pipeline.strict && !report.conserved {
        Ok(EXIT_NOT_CONSERVED)
    } else {
        Ok(EXIT_OK)
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Build(args) => run_build(args, stdout, stderr),
        Command::Audit(args) => run_audit(args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}
