//! The `rdfstar-pg` command line.
//!
//! Exit codes: 0 success, 1 the input is well formed but fails the requested
//! property or transformation precondition, 2 unreadable or malformed input,
//! bad configuration, or usage errors.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::mappings::{LiteralMode, MappingBundle, MappingConfig};
use crate::pg_io::{parse_pg_json, serialize_pg_json};
use crate::rdf_model::{canonicalize, RdfStarGraph};
use crate::transforms::{
    check_pg_convertible, check_strongly_pg_convertible, from_rdf_like_pg, pg_to_rdf_star, rdf_like_normal_form,
    to_rdf_like_pg, to_simple_pg, ConvertibilityReport, TransformError,
};
use crate::turtlestar_io::{parse_turtle_star, serialize_turtle_star, unfold_to_rdf, PrefixTable};
use crate::vocab;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rdfstar-pg",
    version,
    about = "Convert between RDF-star graphs and property graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a Turtle-star document for PG-convertibility or minimality.
    Check {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_enum, default_value_t = Level::Convertible)]
        level: Level,
        #[command(flatten)]
        mapping: MappingArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Turn a Turtle-star document into a PG-JSON property graph.
    Rdf2pg {
        #[command(flatten)]
        io: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_enum, default_value_t = Mode::RdfLike)]
        mode: Mode,
        #[command(flatten)]
        mapping: MappingArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Turn a PG-JSON property graph into a Turtle-star document.
    Pg2rdf {
        #[command(flatten)]
        io: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        mapping: MappingArgs,
    },
    /// Replace embedded triples by reification, giving plain RDF.
    Unfold {
        #[command(flatten)]
        io: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Minimize, convert to an RDF-like property graph and back, and compare.
    Roundtrip {
        #[command(flatten)]
        io: InputArgs,
        #[command(flatten)]
        mapping: MappingArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file, or `-` for standard input.
    input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    from: Option<Format>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    to: Option<Format>,
}

#[derive(Debug, Args)]
struct MappingArgs {
    /// JSON file with mapping settings; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "IRI")]
    property_key_prefix: Option<String>,
    #[arg(long, value_name = "IRI")]
    edge_label_prefix: Option<String>,
    /// `bnode` or `iri:<prefix>`.
    #[arg(long, value_name = "STRATEGY")]
    vertex_ids: Option<String>,
    #[arg(long, value_enum)]
    literal_mode: Option<LiteralModeArg>,
}

/// clap-facing copy of [`LiteralMode`].
#[derive(Debug, Clone, Copy, ValueEnum)]
enum LiteralModeArg {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Convertible,
    Strong,
    Minimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    RdfLike,
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Turtle,
    PgJson,
}

impl Format {
    fn infer(path: &Path) -> Option<Format> {
        let name = path.file_name()?.to_str()?;
        if name.ends_with(".ttl") || name.ends_with(".ttls") {
            Some(Format::Turtle)
        } else if name.ends_with(".json") {
            Some(Format::PgJson)
        } else {
            None
        }
    }

    fn name(self) -> &'static str {
        match self {
            Format::Turtle => "turtle",
            Format::PgJson => "pg-json",
        }
    }
}

/// An early exit carrying its code; messages were already written.
struct Exit(i32);

type Outcome = Result<(), Exit>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> Exit {
        let _ = writeln!(self.stderr, "error: {message}");
        Exit(code)
    }

    fn read_input(&mut self, args: &InputArgs, expected: Format) -> Result<String, Exit> {
        let format = args.from.or_else(|| Format::infer(&args.input)).unwrap_or(expected);
        if format != expected {
            return Err(self.fail(
                EXIT_INPUT,
                format!("this command reads {}, not {}", expected.name(), format.name()),
            ));
        }
        let mut text = String::new();
        let read = if args.input.as_os_str() == "-" {
            self.stdin.read_to_string(&mut text).map(|_| ())
        } else {
            fs::read_to_string(&args.input).map(|t| text = t)
        };
        match read {
            Ok(()) => Ok(text),
            Err(e) => Err(self.fail(EXIT_INPUT, format!("cannot read {}: {e}", args.input.display()))),
        }
    }

    fn read_turtle(&mut self, args: &InputArgs) -> Result<(RdfStarGraph, PrefixTable), Exit> {
        let text = self.read_input(args, Format::Turtle)?;
        parse_turtle_star(&text).map_err(|d| self.fail(EXIT_INPUT, format!("{}:{d}", args.input.display())))
    }

    fn write_output(&mut self, args: &OutputArgs, expected: Format, data: &str) -> Outcome {
        let format = args
            .to
            .or_else(|| args.output.as_deref().and_then(Format::infer))
            .unwrap_or(expected);
        if format != expected {
            return Err(self.fail(
                EXIT_INPUT,
                format!("this command writes {}, not {}", expected.name(), format.name()),
            ));
        }
        let written = match &args.output {
            Some(path) => fs::write(path, data),
            None => self.stdout.write_all(data.as_bytes()),
        };
        written.map_err(|e| self.fail(EXIT_INPUT, format!("cannot write output: {e}")))
    }

    fn load_mappings(&mut self, args: &MappingArgs) -> Result<MappingBundle, Exit> {
        let mut config = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| self.fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<MappingConfig>(&text)
                    .map_err(|e| self.fail(EXIT_INPUT, format!("invalid configuration {}: {e}", path.display())))?
            }
            None => MappingConfig::default(),
        };
        if let Some(p) = &args.property_key_prefix {
            config.property_key_prefix = p.clone();
        }
        if let Some(p) = &args.edge_label_prefix {
            config.edge_label_prefix = p.clone();
        }
        if let Some(s) = &args.vertex_ids {
            config.vertex_id_strategy = s.clone();
        }
        if let Some(m) = args.literal_mode {
            config.literal_mode = match m {
                LiteralModeArg::Strict => LiteralMode::Strict,
                LiteralModeArg::Lenient => LiteralMode::Lenient,
            };
        }
        config
            .build()
            .map_err(|e| self.fail(EXIT_INPUT, format!("invalid mapping configuration: {e}")))
    }
}

/// One line of a check report.
struct Finding {
    triple: String,
    condition: &'static str,
    reason: String,
}

fn findings(report: &ConvertibilityReport) -> Vec<Finding> {
    report
        .violations
        .iter()
        .map(|v| Finding {
            triple: v.triple.to_string(),
            condition: v.condition.id(),
            reason: v.reason.clone(),
        })
        .collect()
}

fn render_report(format: ReportFormat, what: &str, found: &[Finding]) -> String {
    let holds = found.is_empty();
    match format {
        ReportFormat::Json => {
            let violations: Vec<_> = found
                .iter()
                .map(|f| json!({"triple": f.triple, "condition": f.condition, "reason": f.reason}))
                .collect();
            format!("{}\n", json!({"check": what, "holds": holds, "violations": violations}))
        }
        ReportFormat::Text if holds => format!("{what}: yes\n"),
        ReportFormat::Text => {
            let mut out = format!("{what}: no\n");
            for f in found {
                out.push_str(&format!("[{}] {} : {}\n", f.condition, f.triple, f.reason));
            }
            out
        }
    }
}

fn transform_failure(io: &mut Io, format: ReportFormat, err: TransformError) -> Exit {
    let report = match &err {
        TransformError::NotConvertible(r) => Some(("pg-convertible", r)),
        TransformError::NotStronglyConvertible(r) => Some(("strongly-pg-convertible", r)),
        _ => None,
    };
    match (format, report) {
        (ReportFormat::Json, Some((what, r))) => {
            let _ = io
                .stderr
                .write_all(render_report(format, what, &findings(r)).as_bytes());
            Exit(EXIT_FAILED)
        }
        _ => io.fail(EXIT_FAILED, err),
    }
}

fn check(io: &mut Io, input: &InputArgs, level: Level, mapping: &MappingArgs, format: ReportFormat) -> Outcome {
    let mode = io.load_mappings(mapping)?.values.mode;
    let (g, _) = io.read_turtle(input)?;
    let (what, found) = match level {
        Level::Convertible => ("pg-convertible", findings(&check_pg_convertible(&g, mode))),
        Level::Strong => (
            "strongly-pg-convertible",
            findings(&check_strongly_pg_convertible(&g, mode)),
        ),
        Level::Minimal => ("minimal", minimality_findings(&g)),
    };
    let _ = io.stdout.write_all(render_report(format, what, &found).as_bytes());
    if found.is_empty() {
        Ok(())
    } else {
        Err(Exit(EXIT_FAILED))
    }
}

fn minimality_findings(g: &RdfStarGraph) -> Vec<Finding> {
    g.find_redundant()
        .into_iter()
        .map(|t| Finding {
            triple: t.to_string(),
            condition: "minimal",
            reason: "asserted and also embedded in a metadata triple".to_owned(),
        })
        .collect()
}

fn rdf2pg(
    io: &mut Io,
    input: &InputArgs,
    out: &OutputArgs,
    mode: Mode,
    mapping: &MappingArgs,
    format: ReportFormat,
) -> Outcome {
    let literal_mode = io.load_mappings(mapping)?.values.mode;
    let (g, _) = io.read_turtle(input)?;
    let result = match mode {
        Mode::RdfLike => to_rdf_like_pg(&g, literal_mode).map(|r| r.graph),
        Mode::Simple => to_simple_pg(&g, literal_mode).map(|r| r.graph),
    };
    let pg = result.map_err(|e| transform_failure(io, format, e))?;
    io.write_output(out, Format::PgJson, &format!("{}\n", serialize_pg_json(&pg)))
}

fn pg2rdf(io: &mut Io, input: &InputArgs, out: &OutputArgs, mapping: &MappingArgs) -> Outcome {
    let maps = io.load_mappings(mapping)?;
    let text = io.read_input(input, Format::PgJson)?;
    let pg = parse_pg_json(&text).map_err(|e| io.fail(EXIT_INPUT, format!("{}: {e}", input.input.display())))?;
    let g = pg_to_rdf_star(&pg, &maps.vertex_ids, &maps.edge_labels, &maps.property_keys)
        .map_err(|e| io.fail(EXIT_FAILED, e))?;
    let mut prefixes = PrefixTable::new();
    prefixes.insert("p", maps.property_keys.prefix());
    prefixes.insert("r", maps.edge_labels.prefix());
    io.write_output(out, Format::Turtle, &serialize_turtle_star(&g, &prefixes))
}

fn unfold(io: &mut Io, input: &InputArgs, out: &OutputArgs) -> Outcome {
    let (g, mut prefixes) = io.read_turtle(input)?;
    let unfolded = unfold_to_rdf(&g);
    if unfolded != g && !prefixes.iter().any(|(_, ns)| ns == vocab::RDF_NS) {
        prefixes.insert("rdf", vocab::RDF_NS);
    }
    io.write_output(out, Format::Turtle, &serialize_turtle_star(&unfolded, &prefixes))
}

fn roundtrip(io: &mut Io, input: &InputArgs, mapping: &MappingArgs, format: ReportFormat) -> Outcome {
    let mode = io.load_mappings(mapping)?.values.mode;
    let (g, _) = io.read_turtle(input)?;
    let minimal = g.minimize();
    let pg = to_rdf_like_pg(&minimal, mode)
        .map_err(|e| transform_failure(io, format, e))?
        .graph;
    let back = from_rdf_like_pg(&pg).map_err(|e| io.fail(EXIT_FAILED, e))?;
    let expected = rdf_like_normal_form(&minimal, mode).map_err(|e| io.fail(EXIT_FAILED, e))?;
    let (want, got) = (canonicalize(&expected), canonicalize(&back));
    let first_difference = want
        .as_set()
        .symmetric_difference(got.as_set())
        .next()
        .map(|t| (t.clone(), want.contains(t)));
    let summary = match format {
        ReportFormat::Json => format!(
            "{}\n",
            json!({
                "isomorphic": first_difference.is_none(),
                "triples": minimal.len(),
                "removed_redundant": g.len() - minimal.len(),
                "vertices": pg.vertex_count(),
                "edges": pg.edge_count(),
            })
        ),
        ReportFormat::Text => format!(
            "triples: {} ({} redundant removed)\nvertices: {}\nedges: {}\nisomorphic: {}\n",
            minimal.len(),
            g.len() - minimal.len(),
            pg.vertex_count(),
            pg.edge_count(),
            if first_difference.is_none() { "yes" } else { "no" },
        ),
    };
    let _ = io.stdout.write_all(summary.as_bytes());
    match first_difference {
        None => Ok(()),
        Some((t, missing)) => {
            let side = if missing {
                "missing after round trip"
            } else {
                "unexpected after round trip"
            };
            Err(io.fail(EXIT_FAILED, format!("{side}: {t}")))
        }
    }
}

/// Runs the command line with explicit streams; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let mut io = Io { stdin, stdout, stderr };
    let outcome = match &cli.command {
        Command::Check {
            io: input,
            level,
            mapping,
            report,
        } => check(&mut io, input, *level, mapping, *report),
        Command::Rdf2pg {
            io: input,
            out,
            mode,
            mapping,
            report,
        } => rdf2pg(&mut io, input, out, *mode, mapping, *report),
        Command::Pg2rdf {
            io: input,
            out,
            mapping,
        } => pg2rdf(&mut io, input, out, mapping),
        Command::Unfold { io: input, out } => unfold(&mut io, input, out),
        Command::Roundtrip {
            io: input,
            mapping,
            report,
        } => roundtrip(&mut io, input, mapping, *report),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Exit(code)) => code,
    }
}
