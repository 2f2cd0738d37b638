//! Hue-preserving contrast optimization.
//!
//! Three layers: a lightness bisection at fixed chroma and hue, a gradient
//! descent over lightness and chroma at fixed hue, and an orchestrator that
//! walks a schedule of increasing ΔE budgets and keeps the best candidate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::colorspace::{
    linear_to_lab, oklch_to_linear, quantize_linear, srgb_oetf, srgb_to_lab, srgb_to_oklch,
    LabColor, OklchColor, RgbColor,
};
use crate::metrics::{
    ciede2000, contrast_from_luminance, contrast_ratio, relative_luminance,
    relative_luminance_encoded, ContrastRatio, PerceptualDistance,
};

/// ΔE budgets tried in order.
pub const DELTA_E_SCHEDULE: [f64; 17] = [
    0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.1, 2.2, 2.3, 2.4, 2.5, 2.7, 3.0, 3.5, 4.0, 5.0,
];

/// After this budget tier, stop if the minimum threshold is already met.
pub const EARLY_STOP_BUDGET: f64 = 2.5;

/// Largest ΔE a non-compliant candidate may have and still replace the best.
pub const MAX_DELTA_E: f64 = 5.0;

pub const BISECTION_STEPS: usize = 20;

pub const GD_MAX_ITERATIONS: usize = 50;
pub const GD_LEARNING_RATE: f64 = 0.02;
pub const GD_DECAY: f64 = 0.95;
pub const GD_DECAY_EVERY: usize = 10;
pub const GD_TOLERANCE: f64 = 1e-6;
pub const GD_FD_STEP: f64 = 1e-4;
pub const GD_MAX_CHROMA: f64 = 0.5;
pub const OUT_OF_GAMUT_COST: f64 = 1e6;

// Step halvings tried before a descent step is rejected outright.
const GD_MAX_HALVINGS: u32 = 40;

/// Largest hue deviation, in degrees, allowed on a delivered 8-bit color.
pub const HUE_TOLERANCE: f64 = 0.5;

/// Contrast thresholds for one text size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplianceTarget {
    pub large_text: bool,
    pub tau_target: f64,
    pub tau_min: f64,
}

impl ComplianceTarget {
    /// AAA as the goal with AA as the floor: (7.0, 4.5) for normal text,
    /// (4.5, 3.0) for large text.
    pub fn for_text_size(large_text: bool) -> Self {
        if large_text {
            Self {
                large_text,
                tau_target: 4.5,
                tau_min: 3.0,
            }
        } else {
            Self {
                large_text,
                tau_target: 7.0,
                tau_min: 4.5,
            }
        }
    }

    pub fn classify(&self, contrast: ContrastRatio) -> Option<Compliance> {
        if contrast.value() >= self.tau_target {
            Some(Compliance::TargetMet)
        } else if contrast.value() >= self.tau_min {
            Some(Compliance::MinimumMet)
        } else {
            None
        }
    }
}

/// A tuned color with its metrics recomputed on the 8-bit value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub color: RgbColor,
    pub contrast: ContrastRatio,
    pub delta_e: PerceptualDistance,
}

impl Candidate {
    pub fn evaluate(color: RgbColor, text: RgbColor, bg: RgbColor) -> Self {
        Self {
            color,
            contrast: contrast_ratio(color, bg),
            delta_e: crate::metrics::delta_e_2000(text, color),
        }
    }

    fn meets(&self, tau: f64) -> bool {
        self.contrast.value() >= tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compliance {
    TargetMet,
    MinimumMet,
    Unchanged,
    Improved,
}

impl Compliance {
    pub fn as_str(self) -> &'static str {
        match self {
            Compliance::TargetMet => "target_met",
            Compliance::MinimumMet => "minimum_met",
            Compliance::Unchanged => "unchanged",
            Compliance::Improved => "improved",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "target_met" => Compliance::TargetMet,
            "minimum_met" => Compliance::MinimumMet,
            "unchanged" => Compliance::Unchanged,
            "improved" => Compliance::Improved,
            _ => return None,
        })
    }

    pub fn is_compliant(self) -> bool {
        matches!(self, Compliance::TargetMet | Compliance::MinimumMet)
    }
}

impl fmt::Display for Compliance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which phase produced the returned color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    None,
    BinarySearch,
    GradientDescent,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::None => "none",
            Phase::BinarySearch => "binary_search",
            Phase::GradientDescent => "gradient_descent",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneResult {
    pub color: RgbColor,
    pub contrast: ContrastRatio,
    pub delta_e: PerceptualDistance,
    pub compliance: Compliance,
    pub phase: Phase,
}

/// What to return when no candidate reaches the minimum threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shortfall {
    /// Return the input color untouched.
    #[default]
    RevertToInput,
    /// Return the highest-contrast candidate found, labeled `Improved`.
    KeepBestEffort,
}

/// Per-pair values shared by every probe.
#[derive(Debug, Clone, Copy)]
pub struct PairContext {
    pub text: RgbColor,
    pub bg: RgbColor,
    pub text_oklch: OklchColor,
    pub text_lab: LabColor,
    pub bg_luminance: f64,
}

impl PairContext {
    pub fn new(text: RgbColor, bg: RgbColor) -> Self {
        Self {
            text,
            bg,
            text_oklch: srgb_to_oklch(text),
            text_lab: srgb_to_lab(text),
            bg_luminance: relative_luminance(bg),
        }
    }

    /// Nearest 8-bit color to an in-gamut OKLCH point whose hue stays within
    /// [`HUE_TOLERANCE`] of the text hue.
    ///
    /// Plain rounding can swing the hue of a low-chroma color by a degree or
    /// more, so when it does the other floor/ceil neighbours are tried.
    /// Neutral text has no hue to keep and always takes the rounded value.
    /// `Err` carries the rounded color when no neighbour qualifies, `Ok(None)`
    /// means out of gamut.
    fn quantize(&self, point: OklchColor) -> Result<Option<RgbColor>, RgbColor> {
        let Some(linear) = oklch_to_linear(point) else {
            return Ok(None);
        };
        let rounded = quantize_linear(linear);
        if self.text_oklch.is_achromatic() || self.keeps_hue(rounded) {
            return Ok(Some(rounded));
        }
        let scaled = linear.map(|v| srgb_oetf(v) * 255.0);
        let mut best: Option<(f64, RgbColor)> = None;
        for corner in 0..8u8 {
            let pick = |i: usize| {
                let v = scaled[i];
                if corner >> i & 1 == 1 {
                    v.ceil()
                } else {
                    v.floor()
                }
            };
            let channels = [pick(0), pick(1), pick(2)];
            let color = RgbColor::new(channels[0] as u8, channels[1] as u8, channels[2] as u8);
            if !self.keeps_hue(color) {
                continue;
            }
            let dist: f64 = channels
                .iter()
                .zip(scaled)
                .map(|(c, v)| (c - v) * (c - v))
                .sum();
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, color));
            }
        }
        best.map(|(_, c)| Some(c)).ok_or(rounded)
    }

    fn keeps_hue(&self, color: RgbColor) -> bool {
        let lch = srgb_to_oklch(color);
        !lch.is_achromatic() && hue_difference(lch.h, self.text_oklch.h) <= HUE_TOLERANCE
    }

    fn candidate(&self, color: RgbColor) -> Candidate {
        let delta_e = if color == self.text {
            0.0
        } else {
            ciede2000(&self.text_lab, &srgb_to_lab(color))
        };
        Candidate {
            color,
            contrast: contrast_from_luminance(relative_luminance(color), self.bg_luminance),
            delta_e: PerceptualDistance(delta_e),
        }
    }
}

/// Bisects lightness at the text color's chroma and hue.
///
/// Searches upward on dark backgrounds (OKLCH L below 0.5) and downward
/// otherwise. Returns the lowest-ΔE probe meeting `tau_target`, or failing
/// that the highest-contrast probe, among in-gamut probes within `delta_max`.
pub fn binary_search_lightness(
    text: RgbColor,
    bg: RgbColor,
    delta_max: PerceptualDistance,
    tau_target: ContrastRatio,
) -> Option<Candidate> {
    binary_search_in(
        &PairContext::new(text, bg),
        delta_max.value(),
        tau_target.value(),
    )
}

fn binary_search_in(ctx: &PairContext, delta_max: f64, tau: f64) -> Option<Candidate> {
    let OklchColor { l, c, h } = ctx.text_oklch;
    let bg_l = srgb_to_oklch(ctx.bg).l;
    let search_up = bg_l < 0.5;
    let (mut low, mut high) = if search_up { (l, 1.0) } else { (0.0, l) };

    let mut compliant: Option<Candidate> = None;
    let mut fallback: Option<Candidate> = None;

    for _ in 0..BISECTION_STEPS {
        let mid = (low + high) / 2.0;
        // Out of gamut and over budget both lie beyond the probe, away from
        // the original lightness, so both pull the far bound in.
        // A probe whose 8-bit color cannot keep the hue still steers the
        // search but is never returned.
        let (color, usable) = match ctx.quantize(OklchColor::new(mid, c, h)) {
            Ok(Some(color)) => (color, true),
            Err(rounded) => (rounded, false),
            Ok(None) => {
                if search_up {
                    high = mid;
                } else {
                    low = mid;
                }
                continue;
            }
        };
        let probe = ctx.candidate(color);
        if probe.delta_e.value() > delta_max {
            if search_up {
                high = mid;
            } else {
                low = mid;
            }
            continue;
        }

        if probe.meets(tau) {
            if usable && compliant.is_none_or(|b| probe.delta_e < b.delta_e) {
                compliant = Some(probe);
            }
            if search_up {
                high = mid;
            } else {
                low = mid;
            }
        } else {
            if search_up {
                low = mid;
            } else {
                high = mid;
            }
            if usable && fallback.is_none_or(|b| probe.contrast > b.contrast) {
                fallback = Some(probe);
            }
        }
    }

    compliant.or(fallback)
}

/// The descent objective at fixed hue: hinge penalties on contrast shortfall
/// and budget overrun plus a pull toward the original color.
///
/// Evaluated on the continuous (unquantized) sRGB point so it is smooth
/// between kinks.
#[derive(Debug, Clone, Copy)]
pub struct DescentCost<'a> {
    pub ctx: &'a PairContext,
    pub hue: f64,
    pub tau: f64,
    pub delta_max: f64,
}

impl<'a> DescentCost<'a> {
    pub fn new(ctx: &'a PairContext, tau: f64, delta_max: f64) -> Self {
        Self {
            ctx,
            hue: ctx.text_oklch.h,
            tau,
            delta_max,
        }
    }

    /// Contrast and ΔE of the continuous point, or `None` out of gamut.
    pub fn metrics(&self, p: [f64; 2]) -> Option<(f64, f64)> {
        let [l, c] = clamp_point(p);
        let linear = oklch_to_linear(OklchColor::new(l, c, self.hue))?;
        let encoded = linear.map(srgb_oetf);
        let rho =
            contrast_from_luminance(relative_luminance_encoded(encoded), self.ctx.bg_luminance)
                .value();
        let de = ciede2000(&self.ctx.text_lab, &linear_to_lab(linear));
        Some((rho, de))
    }

    pub fn cost(&self, p: [f64; 2]) -> f64 {
        match self.metrics(p) {
            None => OUT_OF_GAMUT_COST,
            Some((rho, de)) => {
                1000.0 * (self.tau - rho).max(0.0)
                    + 10000.0 * (de - self.delta_max).max(0.0)
                    + 100.0 * de
            }
        }
    }

    /// Central differences with step `eps` in each coordinate.
    pub fn gradient_with_step(&self, p: [f64; 2], eps: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (i, gi) in g.iter_mut().enumerate() {
            let mut plus = p;
            let mut minus = p;
            plus[i] += eps;
            minus[i] -= eps;
            *gi = (self.cost(plus) - self.cost(minus)) / (2.0 * eps);
        }
        g
    }

    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        self.gradient_with_step(p, GD_FD_STEP)
    }
}

/// Absolute angular difference in degrees, in `[0, 180]`.
pub fn hue_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

fn clamp_point(p: [f64; 2]) -> [f64; 2] {
    [p[0].clamp(0.0, 1.0), p[1].clamp(0.0, GD_MAX_CHROMA)]
}

/// Descent objective at `p = [L, C]` for the given pair.
pub fn gd_cost(
    p: [f64; 2],
    hue: f64,
    text: RgbColor,
    bg: RgbColor,
    tau: ContrastRatio,
    delta_max: PerceptualDistance,
) -> f64 {
    let ctx = PairContext::new(text, bg);
    DescentCost {
        ctx: &ctx,
        hue,
        tau: tau.value(),
        delta_max: delta_max.value(),
    }
    .cost(p)
}

/// Central-difference gradient of [`gd_cost`] with step `1e-4`.
pub fn gd_gradient(
    p: [f64; 2],
    hue: f64,
    text: RgbColor,
    bg: RgbColor,
    tau: ContrastRatio,
    delta_max: PerceptualDistance,
) -> [f64; 2] {
    let ctx = PairContext::new(text, bg);
    DescentCost {
        ctx: &ctx,
        hue,
        tau: tau.value(),
        delta_max: delta_max.value(),
    }
    .gradient(p)
}

/// Gradient descent over lightness and chroma at the text color's hue.
///
/// Returns a candidate only if the final point is in gamut and its 8-bit
/// color keeps the hue and stays within `delta_max`.
pub fn gradient_descent_oklch(
    text: RgbColor,
    bg: RgbColor,
    delta_max: PerceptualDistance,
    tau_target: ContrastRatio,
) -> Option<Candidate> {
    gradient_descent_in(
        &PairContext::new(text, bg),
        delta_max.value(),
        tau_target.value(),
    )
}

fn gradient_descent_in(ctx: &PairContext, delta_max: f64, tau: f64) -> Option<Candidate> {
    let model = DescentCost::new(ctx, tau, delta_max);
    let ([l, c], _) = model.minimize();
    let color = ctx.quantize(OklchColor::new(l, c, model.hue)).ok()??;
    let candidate = ctx.candidate(color);
    (candidate.delta_e.value() <= delta_max).then_some(candidate)
}

impl DescentCost<'_> {
    /// Runs the descent from the text color's `(L, C)` and returns the final
    /// continuous point with its cost.
    pub fn minimize(&self) -> ([f64; 2], f64) {
        let model = self;
        let start = self.ctx.text_oklch;
        let mut p = [start.l, start.c];
        let mut cost = model.cost(p);
        // Fraction of the scheduled rate that last produced a decrease.
        let mut scale: f64 = 1.0;

        for t in 1..=GD_MAX_ITERATIONS {
            let g = model.gradient(p);
            let alpha = GD_LEARNING_RATE * GD_DECAY.powi((t / GD_DECAY_EVERY) as i32);

            // The raw step overshoots the unit box by orders of magnitude when a
            // hinge is active; halve until the cost does not increase.
            let mut next = p;
            let mut next_cost = cost;
            let mut s = (scale * 2.0).min(1.0);
            for _ in 0..=GD_MAX_HALVINGS {
                let trial = clamp_point([p[0] - alpha * s * g[0], p[1] - alpha * s * g[1]]);
                let trial_cost = model.cost(trial);
                if trial_cost <= cost {
                    next = trial;
                    next_cost = trial_cost;
                    scale = s;
                    break;
                }
                s *= 0.5;
            }

            let settled = (cost - next_cost).abs() < GD_TOLERANCE;
            p = next;
            cost = next_cost;
            if settled {
                break;
            }
        }
        (p, cost)
    }
}

/// Candidate replacement rule used across budget tiers.
///
/// In order: a compliant newcomer wins over a non-compliant best or a
/// compliant one with higher ΔE; a non-compliant best yields to strictly
/// higher contrast within [`MAX_DELTA_E`]; equal contrast with strictly lower
/// ΔE wins. A compliant best is never displaced by a higher-ΔE candidate.
pub fn select_better(best: Candidate, new: Candidate, tau_target: ContrastRatio) -> Candidate {
    if prefer_new(&best, &new, tau_target.value()) {
        new
    } else {
        best
    }
}

fn prefer_new(best: &Candidate, new: &Candidate, tau: f64) -> bool {
    let best_ok = best.meets(tau);
    if new.meets(tau) && (!best_ok || new.delta_e < best.delta_e) {
        return true;
    }
    if !best_ok && new.contrast > best.contrast && new.delta_e.value() <= MAX_DELTA_E {
        return true;
    }
    new.contrast == best.contrast && new.delta_e < best.delta_e
}

/// Tunes `text` against `bg`, reverting to the input if the minimum
/// threshold cannot be reached.
pub fn generate_accessible_color(text: RgbColor, bg: RgbColor, large_text: bool) -> TuneResult {
    generate_accessible_color_with(text, bg, large_text, Shortfall::RevertToInput)
}

pub fn generate_accessible_color_with(
    text: RgbColor,
    bg: RgbColor,
    large_text: bool,
    shortfall: Shortfall,
) -> TuneResult {
    let target = ComplianceTarget::for_text_size(large_text);
    let ctx = PairContext::new(text, bg);
    let initial = Candidate {
        color: text,
        contrast: contrast_from_luminance(relative_luminance(text), ctx.bg_luminance),
        delta_e: PerceptualDistance::ZERO,
    };
    let unchanged = |compliance| TuneResult {
        color: text,
        contrast: initial.contrast,
        delta_e: PerceptualDistance::ZERO,
        compliance,
        phase: Phase::None,
    };

    if initial.meets(target.tau_target) {
        return unchanged(Compliance::TargetMet);
    }

    let tau = ContrastRatio(target.tau_target);
    let mut best = initial;
    let mut best_phase = Phase::None;

    for &budget in DELTA_E_SCHEDULE.iter() {
        let found = [
            (
                binary_search_in(&ctx, budget, target.tau_target),
                Phase::BinarySearch,
            ),
            (
                gradient_descent_in(&ctx, budget, target.tau_target),
                Phase::GradientDescent,
            ),
        ];
        for (candidate, phase) in found {
            let Some(candidate) = candidate else { continue };
            if prefer_new(&best, &candidate, tau.value()) {
                best = candidate;
                best_phase = phase;
            }
        }
        if budget == EARLY_STOP_BUDGET && best.meets(target.tau_min) {
            break;
        }
    }

    match target.classify(best.contrast) {
        Some(compliance) => TuneResult {
            color: best.color,
            contrast: best.contrast,
            delta_e: best.delta_e,
            compliance,
            phase: best_phase,
        },
        None if best_phase == Phase::None || shortfall == Shortfall::RevertToInput => {
            unchanged(Compliance::Unchanged)
        }
        None => TuneResult {
            color: best.color,
            contrast: best.contrast,
            delta_e: best.delta_e,
            compliance: Compliance::Improved,
            phase: best_phase,
        },
    }
}
