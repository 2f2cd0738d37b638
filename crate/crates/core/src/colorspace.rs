//! sRGB, OKLAB/OKLCH and CIELAB conversions.
//!
//! The OKLCH chain is sRGB -> linear RGB -> LMS -> OKLAB -> OKLCH. The
//! linear-RGB to LMS step uses the fused OKLAB reference matrix, which already
//! folds in the sRGB -> XYZ(D65) transform. CIELAB goes through XYZ explicitly.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseColorError;

/// Chroma below this is treated as neutral and reported with hue 0.
pub const ACHROMATIC_THRESHOLD: f64 = 1e-6;

/// Slack allowed on linear channels before a point counts as out of gamut.
pub const GAMUT_EPSILON: f64 = 1e-6;

const LINEAR_TO_LMS: [[f64; 3]; 3] = [
    [0.4122214708, 0.5363325363, 0.0514459929],
    [0.2119034982, 0.6806995451, 0.1073969566],
    [0.0883024619, 0.2817188376, 0.6299787005],
];

const LMS_TO_OKLAB: [[f64; 3]; 3] = [
    [0.2104542553, 0.7936177850, -0.0040720468],
    [1.9779984951, -2.4285922050, 0.4505937099],
    [0.0259040371, 0.7827717662, -0.8086757660],
];

const OKLAB_TO_LMS: [[f64; 3]; 3] = [
    [1.0, 0.3963377774, 0.2158037573],
    [1.0, -0.1055613458, -0.0638541728],
    [1.0, -0.0894841775, -1.2914855480],
];

const LMS_TO_LINEAR: [[f64; 3]; 3] = [
    [4.0767416621, -3.3077115913, 0.2309699292],
    [-1.2684380046, 2.6097574011, -0.3413193965],
    [-0.0041960863, -0.7034186147, 1.7076147010],
];

const LINEAR_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

// D65 white as the image of linear (1, 1, 1), so #FFFFFF lands on L* = 100
// with a* = b* = 0 exactly.
const WHITE_XYZ: [f64; 3] = [
    LINEAR_TO_XYZ[0][0] + LINEAR_TO_XYZ[0][1] + LINEAR_TO_XYZ[0][2],
    LINEAR_TO_XYZ[1][0] + LINEAR_TO_XYZ[1][1] + LINEAR_TO_XYZ[1][2],
    LINEAR_TO_XYZ[2][0] + LINEAR_TO_XYZ[2][1] + LINEAR_TO_XYZ[2][2],
];

static DECODE_LUT: LazyLock<[f64; 256]> = LazyLock::new(|| {
    let mut lut = [0.0; 256];
    for (i, v) in lut.iter_mut().enumerate() {
        *v = srgb_eotf(i as f64 / 255.0);
    }
    lut
});

#[inline]
fn mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// An 8-bit-per-channel sRGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RgbColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl RgbColor {
    pub const BLACK: RgbColor = RgbColor::new(0, 0, 0);
    pub const WHITE: RgbColor = RgbColor::new(255, 255, 255);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub const fn gray(v: u8) -> Self {
        Self::new(v, v, v)
    }

    pub fn channels(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    /// Linear-light channels in `[0, 1]`.
    pub fn to_linear(self) -> [f64; 3] {
        let lut = &*DECODE_LUT;
        [
            lut[self.r as usize],
            lut[self.g as usize],
            lut[self.b as usize],
        ]
    }
}

impl fmt::Display for RgbColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

impl FromStr for RgbColor {
    type Err = ParseColorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_hex(s)
    }
}

impl Serialize for RgbColor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RgbColor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// OKLCH coordinates: lightness, chroma and hue in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OklchColor {
    pub l: f64,
    pub c: f64,
    pub h: f64,
}

impl OklchColor {
    pub const fn new(l: f64, c: f64, h: f64) -> Self {
        Self { l, c, h }
    }

    pub fn is_achromatic(&self) -> bool {
        self.c < ACHROMATIC_THRESHOLD
    }
}

/// CIELAB under D65, 2° observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }
}

/// Parses `#RRGGBB` or `RRGGBB`, case-insensitive.
pub fn parse_hex(text: &str) -> Result<RgbColor, ParseColorError> {
    let digits = text.strip_prefix('#').unwrap_or(text);
    if digits.len() != 6 {
        return Err(ParseColorError::Length {
            input: text.to_string(),
        });
    }
    if !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(ParseColorError::Digit {
            input: text.to_string(),
        });
    }
    let channel = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).expect("validated hex");
    Ok(RgbColor::new(channel(0), channel(2), channel(4)))
}

/// Uppercase `#RRGGBB`.
pub fn format_hex(c: RgbColor) -> String {
    c.to_string()
}

/// sRGB transfer function, encoded `[0, 1]` to linear.
pub fn srgb_eotf(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// Inverse of [`srgb_eotf`].
pub fn srgb_oetf(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Linear sRGB to OKLAB `(L, a, b)`.
pub fn linear_to_oklab(rgb: [f64; 3]) -> [f64; 3] {
    let lms = mul(&LINEAR_TO_LMS, rgb);
    mul(&LMS_TO_OKLAB, lms.map(f64::cbrt))
}

/// OKLAB `(L, a, b)` to linear sRGB. No gamut handling.
pub fn oklab_to_linear(lab: [f64; 3]) -> [f64; 3] {
    let lms = mul(&OKLAB_TO_LMS, lab).map(|v| v * v * v);
    mul(&LMS_TO_LINEAR, lms)
}

pub fn oklab_to_oklch(lab: [f64; 3]) -> OklchColor {
    let [l, a, b] = lab;
    let c = a.hypot(b);
    if c < ACHROMATIC_THRESHOLD {
        return OklchColor::new(l, c, 0.0);
    }
    let mut h = b.atan2(a).to_degrees();
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    OklchColor::new(l, c, h)
}

pub fn oklch_to_oklab(c: OklchColor) -> [f64; 3] {
    let (sin, cos) = c.h.to_radians().sin_cos();
    [c.l, c.c * cos, c.c * sin]
}

pub fn srgb_to_oklch(c: RgbColor) -> OklchColor {
    oklab_to_oklch(linear_to_oklab(c.to_linear()))
}

/// Linear channels of an OKLCH point, or `None` when any channel leaves
/// `[-GAMUT_EPSILON, 1 + GAMUT_EPSILON]`. Returned channels are clamped to `[0, 1]`.
pub fn oklch_to_linear(c: OklchColor) -> Option<[f64; 3]> {
    let rgb = oklab_to_linear(oklch_to_oklab(c));
    if rgb
        .iter()
        .any(|&v| !(-GAMUT_EPSILON..=1.0 + GAMUT_EPSILON).contains(&v))
    {
        return None;
    }
    Some(rgb.map(|v| v.clamp(0.0, 1.0)))
}

/// Converts to 8-bit sRGB, or `None` if the point is outside the sRGB gamut.
pub fn oklch_to_srgb(c: OklchColor) -> Option<RgbColor> {
    oklch_to_linear(c).map(quantize_linear)
}

/// Encodes clamped linear channels and rounds to the nearest code value.
pub fn quantize_linear(rgb: [f64; 3]) -> RgbColor {
    // f64::round rounds half away from zero.
    let [r, g, b] = rgb.map(|v| (srgb_oetf(v) * 255.0).round() as u8);
    RgbColor::new(r, g, b)
}

pub fn in_gamut(c: OklchColor) -> bool {
    oklch_to_linear(c).is_some()
}

/// Linear sRGB to CIE XYZ (D65).
pub fn linear_to_xyz(rgb: [f64; 3]) -> [f64; 3] {
    mul(&LINEAR_TO_XYZ, rgb)
}

pub fn xyz_to_lab(xyz: [f64; 3]) -> LabColor {
    const DELTA: f64 = 6.0 / 29.0;
    let f = |t: f64| {
        if t > DELTA * DELTA * DELTA {
            t.cbrt()
        } else {
            t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
        }
    };
    let fx = f(xyz[0] / WHITE_XYZ[0]);
    let fy = f(xyz[1] / WHITE_XYZ[1]);
    let fz = f(xyz[2] / WHITE_XYZ[2]);
    LabColor::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

pub fn linear_to_lab(rgb: [f64; 3]) -> LabColor {
    xyz_to_lab(linear_to_xyz(rgb))
}

pub fn srgb_to_lab(c: RgbColor) -> LabColor {
    linear_to_lab(c.to_linear())
}
