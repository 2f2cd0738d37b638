//! Hue-preserving WCAG contrast correction.
//!
//! Given a text color and a background, finds the perceptually closest color
//! (by CIEDE2000) with the same OKLCH hue that meets a WCAG contrast target.
//! Only lightness and chroma move.

pub mod colorspace;
pub mod error;
pub mod evaluation;
pub mod metrics;
pub mod optimizer;

pub use colorspace::{format_hex, parse_hex, LabColor, OklchColor, RgbColor};
pub use error::{EvaluationError, ParseColorError, ReportError};
pub use metrics::{contrast_ratio, delta_e_2000, ContrastRatio, PerceptualDistance};
pub use optimizer::{
    generate_accessible_color, generate_accessible_color_with, Compliance, ComplianceTarget, Phase,
    Shortfall, TuneResult,
};
