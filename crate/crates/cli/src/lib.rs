//! Command-line front end for `huekeep`.
//!
//! Exit codes: 0 when the outcome is compliant (or a benchmark run
//! completed), 1 when it is not, 2 for usage and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use huekeep::error::{EvaluationError, ParseColorError, ReportError};
use huekeep::evaluation::report::{
    export_report, export_report_to_path, write_dataset_csv_to_path, ExportFormat,
};
use huekeep::evaluation::{
    evaluate_dataset, evaluate_pair, generate_dataset, summarize, DatasetInfo, EvaluationRecord,
    SummaryReport,
};
use huekeep::optimizer::ComplianceTarget;
use huekeep::{contrast_ratio, parse_hex, RgbColor};

pub const EXIT_COMPLIANT: u8 = 0;
pub const EXIT_NON_COMPLIANT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "huekeep",
    version,
    about = "Raise WCAG contrast while keeping hue"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tune a text color against a background.
    Tune(TuneArgs),
    /// Print the contrast of a pair and its AA/AAA status.
    Check(CheckArgs),
    /// Tune every pair in a CSV or JSON file.
    Batch(BatchArgs),
    /// Generate a dataset, tune every pair and summarize.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Aa,
    Aaa,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, value_parser = parse_color)]
    pub text: RgbColor,
    #[arg(long, value_parser = parse_color)]
    pub bg: RgbColor,
    /// Use the large-text thresholds (4.5:1 target, 3:1 minimum).
    #[arg(long)]
    pub large_text: bool,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Level that decides the exit status.
    #[arg(long, value_enum, default_value_t = Level::Aa)]
    pub level: Level,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// CSV with a `text,bg[,large]` header, or a JSON array of
    /// `{"text", "bg", "large"}` objects.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overrides the format implied by the output extension.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Base pairs; edge-case pairs are added on top.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-pair report file.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write the generated pairs as CSV.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Worker threads; 0 uses every core. Timing is only comparable at 1.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

fn parse_color(s: &str) -> Result<RgbColor, ParseColorError> {
    parse_hex(s)
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_COMPLIANT;
        }
    };
    let result = match cli.command {
        Command::Tune(args) => cmd_tune(&args, out),
        Command::Check(args) => cmd_check(&args, out),
        Command::Batch(args) => cmd_batch(&args, out, err),
        Command::Eval(args) => cmd_eval(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn exit_for(compliant: bool) -> u8 {
    if compliant {
        EXIT_COMPLIANT
    } else {
        EXIT_NON_COMPLIANT
    }
}

pub fn cmd_tune(args: &TuneArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let PairArgs {
        text,
        bg,
        large_text,
    } = args.pair;
    let record = evaluate_pair("tune", text, bg, large_text)?;
    let r = &record.result;
    match args.format {
        Format::Plain => {
            writeln!(out, "text: {text}")?;
            writeln!(out, "bg: {bg}")?;
            writeln!(out, "large_text: {large_text}")?;
            writeln!(out, "initial_contrast: {}", record.initial_contrast)?;
            writeln!(out, "tuned: {}", r.color)?;
            writeln!(out, "contrast: {}", r.contrast)?;
            writeln!(out, "delta_e: {}", r.delta_e)?;
            writeln!(out, "compliance: {}", r.compliance)?;
            writeln!(out, "phase: {}", r.phase)?;
        }
        Format::Json => {
            let v = json!({
                "text": text,
                "bg": bg,
                "large_text": large_text,
                "initial_contrast": record.initial_contrast,
                "tuned": r.color,
                "contrast": r.contrast,
                "delta_e": r.delta_e,
                "compliance": r.compliance,
                "phase": r.phase,
            });
            write_json(out, &v)?;
        }
        Format::Csv => export_report(
            None,
            std::slice::from_ref(&record),
            ExportFormat::Csv,
            &mut *out,
        )?,
    }
    Ok(exit_for(r.compliance.is_compliant()))
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let PairArgs {
        text,
        bg,
        large_text,
    } = args.pair;
    let target = ComplianceTarget::for_text_size(large_text);
    let rho = contrast_ratio(text, bg);
    let aa = rho.value() >= target.tau_min;
    let aaa = rho.value() >= target.tau_target;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    match args.format {
        Format::Plain => {
            writeln!(out, "contrast: {rho}")?;
            writeln!(out, "size: {}", if large_text { "large" } else { "normal" })?;
            writeln!(out, "aa: {} ({:.2})", verdict(aa), target.tau_min)?;
            writeln!(out, "aaa: {} ({:.2})", verdict(aaa), target.tau_target)?;
        }
        Format::Json => {
            let v = json!({
                "text": text,
                "bg": bg,
                "large_text": large_text,
                "contrast": rho,
                "aa": aa,
                "aaa": aaa,
            });
            write_json(out, &v)?;
        }
        Format::Csv => {
            return Err(CliError::Usage(
                "check supports --format plain or json".into(),
            ))
        }
    }
    Ok(exit_for(match args.level {
        Level::Aa => aa,
        Level::Aaa => aaa,
    }))
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(ReportError::from)?;
    writeln!(out)?;
    Ok(())
}

/// One parsed input row of a batch file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchRow {
    pub text: RgbColor,
    pub bg: RgbColor,
    pub large: bool,
}

/// A row that could not be parsed. `row` counts data rows from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

fn parse_flag(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "no" => Ok(false),
        "1" | "true" | "yes" => Ok(true),
        other => Err(format!("invalid large flag {other:?}")),
    }
}

fn parse_colors(text: &str, bg: &str) -> Result<(RgbColor, RgbColor), String> {
    let text = parse_hex(text.trim()).map_err(|e| e.to_string())?;
    let bg = parse_hex(bg.trim()).map_err(|e| e.to_string())?;
    Ok((text, bg))
}

/// Parses a `text,bg[,large]` CSV. Errors in the header are fatal; errors in
/// a data row are collected and the row is skipped.
pub fn parse_batch_csv(content: &str) -> Result<Vec<Result<BatchRow, RowError>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(text_col), Some(bg_col)) = (column("text"), column("bg")) else {
        return Err(format!(
            "header must name text and bg columns, found {:?}",
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    };
    let large_col = column("large");

    Ok(reader
        .records()
        .enumerate()
        .map(|(i, record)| {
            let row = i + 1;
            let fail = |message: String| RowError { row, message };
            let record = record.map_err(|e| fail(e.to_string()))?;
            let field = |col: usize, name: &str| {
                record
                    .get(col)
                    .ok_or_else(|| fail(format!("missing {name}")))
            };
            let (text, bg) =
                parse_colors(field(text_col, "text")?, field(bg_col, "bg")?).map_err(fail)?;
            let large = match large_col.and_then(|c| record.get(c)) {
                Some(s) => parse_flag(s).map_err(fail)?,
                None => false,
            };
            Ok(BatchRow { text, bg, large })
        })
        .collect())
}

/// Parses a JSON array of `{"text", "bg", "large"?}` objects.
pub fn parse_batch_json(content: &str) -> Result<Vec<Result<BatchRow, RowError>>, String> {
    let value: Value = serde_json::from_str(content).map_err(|e| e.to_string())?;
    let Value::Array(items) = value else {
        return Err("expected a JSON array of objects".into());
    };
    Ok(items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let row = i + 1;
            let fail = |message: String| RowError { row, message };
            let field = |name: &str| {
                item.get(name)
                    .and_then(Value::as_str)
                    .ok_or_else(|| fail(format!("missing string field {name:?}")))
            };
            let (text, bg) = parse_colors(field("text")?, field("bg")?).map_err(fail)?;
            let large = match item.get("large") {
                None | Some(Value::Null) => false,
                Some(Value::Bool(b)) => *b,
                Some(other) => return Err(fail(format!("invalid large flag {other}"))),
            };
            Ok(BatchRow { text, bg, large })
        })
        .collect())
}

fn is_json_input(path: &Path, content: &str) -> bool {
    match ExportFormat::from_path(path) {
        Some(ExportFormat::Json) => true,
        Some(ExportFormat::Csv) => false,
        None => content.trim_start().starts_with('['),
    }
}

fn export_format(format: Option<Format>, output: Option<&Path>) -> Result<ExportFormat, CliError> {
    match format {
        Some(Format::Csv) => Ok(ExportFormat::Csv),
        Some(Format::Json) => Ok(ExportFormat::Json),
        Some(Format::Plain) => Err(CliError::Usage("reports are written as csv or json".into())),
        None => Ok(output
            .and_then(ExportFormat::from_path)
            .unwrap_or(ExportFormat::Csv)),
    }
}

pub fn cmd_batch(
    args: &BatchArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, CliError> {
    let format = export_format(args.format, args.output.as_deref())?;
    let content = fs::read_to_string(&args.input).map_err(|source| CliError::Read {
        path: args.input.clone(),
        source,
    })?;
    let rows = if is_json_input(&args.input, &content) {
        parse_batch_json(&content)
    } else {
        parse_batch_csv(&content)
    }
    .map_err(|message| CliError::Input {
        path: args.input.clone(),
        message,
    })?;

    let mut all_parsed = true;
    let mut records: Vec<EvaluationRecord> = Vec::with_capacity(rows.len());
    for row in rows {
        match row {
            Ok(r) => records.push(evaluate_pair("batch", r.text, r.bg, r.large)?),
            Err(e) => {
                all_parsed = false;
                writeln!(err, "row {}: {}", e.row, e.message)?;
            }
        }
    }

    match &args.output {
        Some(path) => export_report_to_path(path, None, &records, format)?,
        None => export_report(None, &records, format, &mut *out)?,
    }
    let all_compliant = records.iter().all(|r| r.result.compliance.is_compliant());
    Ok(exit_for(all_parsed && all_compliant))
}

/// Runs the benchmark and returns the summary alongside the records.
pub fn run_eval(args: &EvalArgs) -> Result<(SummaryReport, Vec<EvaluationRecord>), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let format = export_format(args.format, args.output.as_deref())?;
    let pairs = generate_dataset(args.seed, args.n)?;
    let info = DatasetInfo::new(args.seed, args.n);
    if let Some(path) = &args.dataset {
        write_dataset_csv_to_path(path, &pairs, &info)?;
    }
    let records = evaluate_dataset(&pairs, args.jobs)?;
    let mut report = summarize(&records)?;
    report.dataset = Some(info);
    if let Some(path) = &args.output {
        export_report_to_path(path, Some(&report), &records, format)?;
    }
    Ok((report, records))
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let (report, _) = run_eval(args)?;
    write_headline(&report, out)?;
    Ok(EXIT_COMPLIANT)
}

pub fn write_headline(report: &SummaryReport, out: &mut dyn Write) -> io::Result<()> {
    if let Some(info) = &report.dataset {
        writeln!(
            out,
            "dataset: seed={} n={} generator={}",
            info.seed, info.n, info.generator
        )?;
    }
    writeln!(out, "pairs: {}", report.total)?;
    writeln!(out, "success_rate: {:.2}%", report.success_rate * 100.0)?;
    writeln!(
        out,
        "high_fidelity_rate: {:.2}%",
        report.high_fidelity_rate * 100.0
    )?;
    writeln!(out, "median_delta_e: {:.2}", report.median_delta_e)?;
    writeln!(out, "median_ms: {:.4}", report.median_elapsed * 1000.0)?;
    writeln!(out, "throughput: {:.1} pairs/s", report.throughput)?;
    for c in &report.categories {
        writeln!(
            out,
            "category: {} count={} success={:.2}% median_initial_contrast={:.2} median_delta_e={:.2}",
            c.category,
            c.count,
            c.success_rate * 100.0,
            c.median_initial_contrast,
            c.median_delta_e
        )?;
    }
    Ok(())
}
