//! Seeded benchmark pair generator.
//!
//! Every stream is ChaCha8 seeded with `ChaCha8Rng::seed_from_u64(seed)` and
//! then switched to a fixed stream id, so each category draws from its own
//! substream and the output is identical on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::colorspace::{oklch_to_srgb, OklchColor, RgbColor};
use crate::error::EvaluationError;
use crate::metrics::relative_luminance;

/// Bumped whenever a sampler changes what a given seed produces.
pub const GENERATOR_VERSION: &str = "chacha8-v1";

pub const DEFAULT_EDGE_FRACTION: f64 = 0.10;

const MIXER_STREAM: u64 = 0;
const EDGE_MIXER_STREAM: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeFamily {
    BrightYellowOnWhite,
    MidGrayOnGray,
    RedOnGreen,
    OrangeOnYellow,
    PureBlueOnBlack,
}

impl EdgeFamily {
    pub const ALL: [EdgeFamily; 5] = [
        EdgeFamily::BrightYellowOnWhite,
        EdgeFamily::MidGrayOnGray,
        EdgeFamily::RedOnGreen,
        EdgeFamily::OrangeOnYellow,
        EdgeFamily::PureBlueOnBlack,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    BrandPrimary,
    DarkUi,
    LightUi,
    AccentColors,
    Pastel,
    Edge(EdgeFamily),
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::BrandPrimary,
        Category::DarkUi,
        Category::LightUi,
        Category::AccentColors,
        Category::Pastel,
        Category::Edge(EdgeFamily::BrightYellowOnWhite),
        Category::Edge(EdgeFamily::MidGrayOnGray),
        Category::Edge(EdgeFamily::RedOnGreen),
        Category::Edge(EdgeFamily::OrangeOnYellow),
        Category::Edge(EdgeFamily::PureBlueOnBlack),
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::BrandPrimary => "brand_primary",
            Category::DarkUi => "dark_ui",
            Category::LightUi => "light_ui",
            Category::AccentColors => "accent_colors",
            Category::Pastel => "pastel",
            Category::Edge(EdgeFamily::BrightYellowOnWhite) => "edge_bright_yellow_on_white",
            Category::Edge(EdgeFamily::MidGrayOnGray) => "edge_mid_gray_on_gray",
            Category::Edge(EdgeFamily::RedOnGreen) => "edge_red_on_green",
            Category::Edge(EdgeFamily::OrangeOnYellow) => "edge_orange_on_yellow",
            Category::Edge(EdgeFamily::PureBlueOnBlack) => "edge_pure_blue_on_black",
        }
    }

    fn stream(self) -> u64 {
        // Position in ALL, offset past the mixer stream.
        Category::ALL.iter().position(|&c| c == self).unwrap() as u64 + 1
    }

    pub fn is_edge(self) -> bool {
        matches!(self, Category::Edge(_))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}

impl Serialize for Category {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A base category and its share of the base dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategorySpec {
    pub category: Category,
    pub weight: f64,
}

pub const BASE_CATEGORIES: [CategorySpec; 5] = [
    CategorySpec {
        category: Category::BrandPrimary,
        weight: 0.30,
    },
    CategorySpec {
        category: Category::DarkUi,
        weight: 0.25,
    },
    CategorySpec {
        category: Category::LightUi,
        weight: 0.25,
    },
    CategorySpec {
        category: Category::AccentColors,
        weight: 0.10,
    },
    CategorySpec {
        category: Category::Pastel,
        weight: 0.10,
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub category: Category,
    pub text: RgbColor,
    pub bg: RgbColor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetConfig {
    pub seed: u64,
    pub n: usize,
    /// Edge-case pairs generated in addition to the `n` base pairs, as a
    /// fraction of `n` (rounded up).
    pub edge_fraction: f64,
}

impl DatasetConfig {
    pub fn new(seed: u64, n: usize) -> Self {
        Self {
            seed,
            n,
            edge_fraction: DEFAULT_EDGE_FRACTION,
        }
    }

    pub fn edge_count(&self) -> usize {
        (self.n as f64 * self.edge_fraction).ceil() as usize
    }
}

/// `n` base pairs followed by `ceil(0.1 n)` edge-case pairs.
pub fn generate_dataset(seed: u64, n: usize) -> Result<Vec<LabeledPair>, EvaluationError> {
    generate_with(&DatasetConfig::new(seed, n))
}

pub fn generate_with(config: &DatasetConfig) -> Result<Vec<LabeledPair>, EvaluationError> {
    if config.n == 0 {
        return Err(EvaluationError::EmptyDataset);
    }
    let stream = |id: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(id);
        rng
    };
    let mut samplers: Vec<ChaCha8Rng> = Category::ALL.iter().map(|c| stream(c.stream())).collect();
    let mut draw = |category: Category| {
        let rng = &mut samplers[category.stream() as usize - 1];
        let (text, bg) = sample_pair(category, rng);
        LabeledPair { category, text, bg }
    };

    let mut mixer = stream(MIXER_STREAM);
    let mut pairs = Vec::with_capacity(config.n + config.edge_count());
    for _ in 0..config.n {
        let u: f64 = mixer.gen();
        let mut acc = 0.0;
        let mut picked = BASE_CATEGORIES[BASE_CATEGORIES.len() - 1].category;
        for entry in BASE_CATEGORIES {
            acc += entry.weight;
            if u < acc {
                picked = entry.category;
                break;
            }
        }
        pairs.push(draw(picked));
    }

    let mut edge_mixer = stream(EDGE_MIXER_STREAM);
    for _ in 0..config.edge_count() {
        let family = EdgeFamily::ALL[edge_mixer.gen_range(0..EdgeFamily::ALL.len())];
        pairs.push(draw(Category::Edge(family)));
    }
    Ok(pairs)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Draws an OKLCH color and maps it into gamut by reducing chroma at fixed
/// lightness and hue. Always consumes exactly three draws.
fn sample_oklch(rng: &mut ChaCha8Rng, l: (f64, f64), c: (f64, f64), h: (f64, f64)) -> RgbColor {
    let l = uniform(rng, l.0, l.1);
    let c = uniform(rng, c.0, c.1);
    let h = uniform(rng, h.0, h.1).rem_euclid(360.0);
    if let Some(rgb) = oklch_to_srgb(OklchColor::new(l, c, h)) {
        return rgb;
    }
    let (mut lo, mut hi) = (0.0, c);
    for _ in 0..40 {
        let mid = (lo + hi) / 2.0;
        if oklch_to_srgb(OklchColor::new(l, mid, h)).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    oklch_to_srgb(OklchColor::new(l, lo, h)).expect("zero chroma is in gamut")
}

const ANY_HUE: (f64, f64) = (0.0, 360.0);

fn sample_pair(category: Category, rng: &mut ChaCha8Rng) -> (RgbColor, RgbColor) {
    match category {
        Category::BrandPrimary => {
            let text = sample_oklch(rng, (0.35, 0.65), (0.08, 0.25), ANY_HUE);
            let bg = if rng.gen_bool(0.5) {
                sample_oklch(rng, (0.92, 1.0), (0.0, 0.02), ANY_HUE)
            } else {
                sample_oklch(rng, (0.0, 0.15), (0.0, 0.02), ANY_HUE)
            };
            (text, bg)
        }
        Category::DarkUi => {
            let text = sample_oklch(rng, (0.75, 0.98), (0.0, 0.08), ANY_HUE);
            let bg = sample_oklch(rng, (0.05, 0.25), (0.0, 0.04), ANY_HUE);
            (text, bg)
        }
        Category::LightUi => {
            let text = sample_oklch(rng, (0.05, 0.25), (0.0, 0.08), ANY_HUE);
            let bg = sample_oklch(rng, (0.75, 0.98), (0.0, 0.04), ANY_HUE);
            (text, bg)
        }
        Category::AccentColors => {
            let text = sample_oklch(rng, (0.45, 0.70), (0.15, 0.35), ANY_HUE);
            (text, RgbColor::WHITE)
        }
        Category::Pastel => {
            let text = sample_oklch(rng, (0.8, 0.95), (0.03, 0.1), ANY_HUE);
            let bg = sample_oklch(rng, (0.05, 0.25), (0.0, 0.04), ANY_HUE);
            (text, bg)
        }
        Category::Edge(family) => sample_edge(family, rng),
    }
}

fn sample_edge(family: EdgeFamily, rng: &mut ChaCha8Rng) -> (RgbColor, RgbColor) {
    match family {
        EdgeFamily::BrightYellowOnWhite => {
            let text = sample_oklch(rng, (0.88, 0.95), (0.12, 0.21), (100.0, 112.0));
            let bg = sample_oklch(rng, (0.985, 1.0), (0.0, 0.0), ANY_HUE);
            (text, bg)
        }
        EdgeFamily::MidGrayOnGray => {
            let text = RgbColor::gray(rng.gen_range(96..=160));
            let ratio = uniform(rng, 1.10, 1.40);
            let lighter = rng.gen_bool(0.5);
            (text, gray_at_contrast(text, ratio, lighter))
        }
        EdgeFamily::RedOnGreen => {
            let text = sample_oklch(rng, (0.55, 0.64), (0.18, 0.24), (24.0, 32.0));
            let bg = sample_oklch(rng, (0.62, 0.72), (0.15, 0.22), (135.0, 145.0));
            (text, bg)
        }
        EdgeFamily::OrangeOnYellow => {
            let text = sample_oklch(rng, (0.72, 0.78), (0.15, 0.19), (50.0, 62.0));
            let bg = sample_oklch(rng, (0.90, 0.97), (0.12, 0.20), (100.0, 110.0));
            (text, bg)
        }
        EdgeFamily::PureBlueOnBlack => {
            let text = sample_oklch(rng, (0.38, 0.47), (0.26, 0.32), (259.0, 266.0));
            let bg = sample_oklch(rng, (0.0, 0.18), (0.0, 0.0), ANY_HUE);
            (text, bg)
        }
    }
}

/// The gray whose contrast against `text` is closest to `ratio`, on the
/// requested side, excluding `text` itself.
fn gray_at_contrast(text: RgbColor, ratio: f64, lighter: bool) -> RgbColor {
    let y = relative_luminance(text);
    let target = if lighter {
        (y + 0.05) * ratio - 0.05
    } else {
        (y + 0.05) / ratio - 0.05
    };
    (0..=255u8)
        .map(RgbColor::gray)
        .filter(|&g| g != text)
        .min_by(|a, b| {
            let da = (relative_luminance(*a) - target).abs();
            let db = (relative_luminance(*b) - target).abs();
            da.total_cmp(&db)
        })
        .expect("non-empty gray ramp")
}
