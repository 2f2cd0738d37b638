//! Benchmark harness: generated pairs, timed optimizer runs, and summary
//! statistics.

pub mod dataset;
pub mod report;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colorspace::RgbColor;
use crate::error::EvaluationError;
use crate::metrics::{contrast_ratio, delta_e_2000, ContrastRatio};
use crate::optimizer::{generate_accessible_color, TuneResult};

pub use dataset::{
    generate_dataset, generate_with, Category, CategorySpec, DatasetConfig, EdgeFamily,
    LabeledPair, BASE_CATEGORIES, GENERATOR_VERSION,
};
pub use report::{export_report, read_records_csv, write_dataset_csv, ExportFormat};

/// A pair counts as a success at WCAG AA for normal text.
pub const SUCCESS_CONTRAST: f64 = 4.5;

/// Successes below this ΔE count as high fidelity.
pub const HIGH_FIDELITY_DELTA_E: f64 = 2.0;

const AGREEMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub category: String,
    pub text: RgbColor,
    pub bg: RgbColor,
    pub initial_contrast: ContrastRatio,
    pub result: TuneResult,
    /// Optimizer wall time in seconds.
    pub elapsed: f64,
}

impl EvaluationRecord {
    pub fn is_success(&self) -> bool {
        self.result.contrast.value() >= SUCCESS_CONTRAST
    }
}

/// Runs the optimizer on one pair, timing only the optimizer call, and
/// cross-checks the reported metrics against a fresh computation.
pub fn evaluate_pair(
    category: &str,
    text: RgbColor,
    bg: RgbColor,
    large_text: bool,
) -> Result<EvaluationRecord, EvaluationError> {
    let initial_contrast = contrast_ratio(text, bg);

    let start = Instant::now();
    let result = generate_accessible_color(text, bg, large_text);
    // A zero reading is a clock-resolution artifact; keep elapsed positive.
    let elapsed = start.elapsed().as_secs_f64().max(1e-9);

    let checks = [
        (
            "contrast",
            result.contrast.value(),
            contrast_ratio(result.color, bg).value(),
        ),
        (
            "delta_e",
            result.delta_e.value(),
            delta_e_2000(text, result.color).value(),
        ),
    ];
    for (field, reported, recomputed) in checks {
        if (reported - recomputed).abs() > AGREEMENT_TOLERANCE {
            return Err(EvaluationError::MetricMismatch {
                field,
                text: text.to_string(),
                bg: bg.to_string(),
                reported,
                recomputed,
            });
        }
    }

    Ok(EvaluationRecord {
        category: category.to_string(),
        text,
        bg,
        initial_contrast,
        result,
        elapsed,
    })
}

/// Evaluates every pair with `large_text = false`, in generation order.
///
/// `jobs == 1` runs on the calling thread; `jobs == 0` uses every core.
pub fn evaluate_dataset(
    pairs: &[LabeledPair],
    jobs: usize,
) -> Result<Vec<EvaluationRecord>, EvaluationError> {
    let run = |p: &LabeledPair| evaluate_pair(p.category.label(), p.text, p.bg, false);
    if jobs == 1 {
        return pairs.iter().map(run).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| pairs.par_iter().map(run).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub seed: u64,
    pub n: usize,
    pub generator: String,
}

impl DatasetInfo {
    pub fn new(seed: u64, n: usize) -> Self {
        Self {
            seed,
            n,
            generator: GENERATOR_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: String,
    pub count: usize,
    pub success_rate: f64,
    pub median_initial_contrast: f64,
    /// Over successes only; 0 when the category has none.
    pub median_delta_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dataset: Option<DatasetInfo>,
    pub total: usize,
    pub success_rate: f64,
    /// Fraction of successes with ΔE below [`HIGH_FIDELITY_DELTA_E`].
    pub high_fidelity_rate: f64,
    /// Over successes only.
    pub median_delta_e: f64,
    /// Seconds.
    pub median_elapsed: f64,
    /// Pairs per second of optimizer time.
    pub throughput: f64,
    pub categories: Vec<CategoryRow>,
}

impl SummaryReport {
    /// Copy with timing fields zeroed, for comparing runs.
    pub fn without_timing(&self) -> SummaryReport {
        SummaryReport {
            median_elapsed: 0.0,
            throughput: 0.0,
            ..self.clone()
        }
    }
}

/// Lower median: element `(n - 1) / 2` of the sorted values, 0 when empty.
pub fn lower_median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

pub fn summarize(records: &[EvaluationRecord]) -> Result<SummaryReport, EvaluationError> {
    if records.is_empty() {
        return Err(EvaluationError::NoRecords);
    }
    let total = records.len();
    let successes: Vec<&EvaluationRecord> = records.iter().filter(|r| r.is_success()).collect();
    let mut success_de: Vec<f64> = successes.iter().map(|r| r.result.delta_e.value()).collect();
    let high_fidelity = success_de
        .iter()
        .filter(|&&d| d < HIGH_FIDELITY_DELTA_E)
        .count();
    let mut elapsed: Vec<f64> = records.iter().map(|r| r.elapsed).collect();
    let total_time: f64 = elapsed.iter().sum();

    // Categories in order of first appearance.
    let mut labels: Vec<&str> = Vec::new();
    for r in records {
        if !labels.contains(&r.category.as_str()) {
            labels.push(&r.category);
        }
    }
    let categories = labels
        .into_iter()
        .map(|label| {
            let rows: Vec<&EvaluationRecord> =
                records.iter().filter(|r| r.category == label).collect();
            let ok: Vec<&&EvaluationRecord> = rows.iter().filter(|r| r.is_success()).collect();
            let mut initial: Vec<f64> = rows.iter().map(|r| r.initial_contrast.value()).collect();
            let mut de: Vec<f64> = ok.iter().map(|r| r.result.delta_e.value()).collect();
            CategoryRow {
                category: label.to_string(),
                count: rows.len(),
                success_rate: ok.len() as f64 / rows.len() as f64,
                median_initial_contrast: lower_median(&mut initial),
                median_delta_e: lower_median(&mut de),
            }
        })
        .collect();

    Ok(SummaryReport {
        dataset: None,
        total,
        success_rate: successes.len() as f64 / total as f64,
        high_fidelity_rate: if successes.is_empty() {
            0.0
        } else {
            high_fidelity as f64 / successes.len() as f64
        },
        median_delta_e: lower_median(&mut success_de),
        median_elapsed: lower_median(&mut elapsed),
        throughput: total as f64 / total_time,
        categories,
    })
}
