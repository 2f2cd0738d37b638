//! CSV and JSON export of evaluation records.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DatasetInfo, EvaluationRecord, LabeledPair, SummaryReport};
use crate::colorspace::RgbColor;
use crate::error::ReportError;
use crate::optimizer::Compliance;

pub const CSV_HEADER: &str =
    "category,text,bg,initial_contrast,final_text,final_contrast,delta_e,compliance,elapsed_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    /// Guesses from a `.csv` or `.json` extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(ExportFormat::Csv),
            "json" => Some(ExportFormat::Json),
            _ => None,
        }
    }
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

/// One exported row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub category: String,
    pub text: RgbColor,
    pub bg: RgbColor,
    pub initial_contrast: f64,
    pub final_text: RgbColor,
    pub final_contrast: f64,
    pub delta_e: f64,
    pub compliance: Compliance,
    pub elapsed_ms: f64,
}

impl From<&EvaluationRecord> for RecordRow {
    fn from(r: &EvaluationRecord) -> Self {
        Self {
            category: r.category.clone(),
            text: r.text,
            bg: r.bg,
            initial_contrast: r.initial_contrast.value(),
            final_text: r.result.color,
            final_contrast: r.result.contrast.value(),
            delta_e: r.result.delta_e.value(),
            compliance: r.result.compliance,
            elapsed_ms: r.elapsed * 1000.0,
        }
    }
}

#[derive(Serialize)]
struct JsonExport<'a> {
    summary: Option<&'a SummaryReport>,
    records: Vec<RecordRow>,
}

fn dataset_comment(info: &DatasetInfo) -> String {
    format!(
        "# seed={} n={} generator={}\n",
        info.seed, info.n, info.generator
    )
}

/// Writes records as CSV or JSON.
///
/// CSV output starts with a `# seed=.. n=.. generator=..` comment line when
/// the report carries dataset provenance, then the header row. JSON output is
/// `{"summary": .., "records": [..]}`.
pub fn export_report<W: Write>(
    report: Option<&SummaryReport>,
    records: &[EvaluationRecord],
    format: ExportFormat,
    mut out: W,
) -> Result<(), ReportError> {
    match format {
        ExportFormat::Csv => {
            if let Some(info) = report.and_then(|r| r.dataset.as_ref()) {
                out.write_all(dataset_comment(info).as_bytes())?;
            }
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            writer.write_record(CSV_HEADER.split(','))?;
            for r in records {
                writer.serialize(RecordRow::from(r))?;
            }
            writer.flush()?;
        }
        ExportFormat::Json => {
            let export = JsonExport {
                summary: report,
                records: records.iter().map(RecordRow::from).collect(),
            };
            serde_json::to_writer_pretty(&mut out, &export)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
    }
    Ok(())
}

/// [`export_report`] into a file, with the path attached to I/O errors.
pub fn export_report_to_path(
    path: &Path,
    report: Option<&SummaryReport>,
    records: &[EvaluationRecord],
    format: ExportFormat,
) -> Result<(), ReportError> {
    let file = create(path)?;
    export_report(report, records, format, BufWriter::new(file)).map_err(|e| with_path(e, path))
}

fn create(path: &Path) -> Result<File, ReportError> {
    File::create(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn with_path(err: ReportError, path: &Path) -> ReportError {
    match err {
        ReportError::Stream(source) => ReportError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    }
}

/// Parses rows written by [`export_report`] in CSV form.
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RecordRow>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(ReportError::Row {
            row: 0,
            message: format!("unexpected header {header:?}"),
        });
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| ReportError::Row {
                row: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Writes generated pairs as `category,text,bg` with the provenance comment.
pub fn write_dataset_csv<W: Write>(
    pairs: &[LabeledPair],
    info: &DatasetInfo,
    mut out: W,
) -> Result<(), ReportError> {
    out.write_all(dataset_comment(info).as_bytes())?;
    let mut writer = csv::Writer::from_writer(out);
    for p in pairs {
        writer.serialize(p)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_dataset_csv_to_path(
    path: &Path,
    pairs: &[LabeledPair],
    info: &DatasetInfo,
) -> Result<(), ReportError> {
    let file = create(path)?;
    write_dataset_csv(pairs, info, BufWriter::new(file)).map_err(|e| with_path(e, path))
}
