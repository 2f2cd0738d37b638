use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseColorError {
    #[error("invalid color {input:?}: expected #RRGGBB or RRGGBB")]
    Length { input: String },
    #[error("invalid color {input:?}: non-hexadecimal digit")]
    Digit { input: String },
}

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("dataset size must be at least 1")]
    EmptyDataset,
    #[error("cannot summarize an empty record list")]
    NoRecords,
    #[error("optimizer reported {field} = {reported} for {text} on {bg}, recomputed {recomputed}")]
    MetricMismatch {
        field: &'static str,
        text: String,
        bg: String,
        reported: f64,
        recomputed: f64,
    },
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Stream(#[from] std::io::Error),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}
