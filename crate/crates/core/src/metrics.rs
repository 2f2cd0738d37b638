//! WCAG 2.1 contrast and CIEDE2000 color difference.

use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::colorspace::{srgb_to_lab, LabColor, RgbColor};

/// WCAG contrast ratio, lighter over darker. Always in `[1, 21]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContrastRatio(pub f64);

impl ContrastRatio {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for ContrastRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

/// CIEDE2000 difference, non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PerceptualDistance(pub f64);

impl PerceptualDistance {
    pub const ZERO: PerceptualDistance = PerceptualDistance(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for PerceptualDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

const LUMA: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// WCAG channel decoding, 0.03928 threshold form.
pub fn wcag_linearize(v: f64) -> f64 {
    if v <= 0.03928 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

static WCAG_LUT: LazyLock<[f64; 256]> = LazyLock::new(|| {
    let mut lut = [0.0; 256];
    for (i, v) in lut.iter_mut().enumerate() {
        *v = wcag_linearize(i as f64 / 255.0);
    }
    lut
});

/// WCAG relative luminance of an 8-bit color.
pub fn relative_luminance(c: RgbColor) -> f64 {
    let lut = &*WCAG_LUT;
    LUMA[0] * lut[c.r as usize] + LUMA[1] * lut[c.g as usize] + LUMA[2] * lut[c.b as usize]
}

/// WCAG relative luminance of continuous encoded channels in `[0, 1]`.
pub fn relative_luminance_encoded(rgb: [f64; 3]) -> f64 {
    LUMA[0] * wcag_linearize(rgb[0])
        + LUMA[1] * wcag_linearize(rgb[1])
        + LUMA[2] * wcag_linearize(rgb[2])
}

pub fn contrast_from_luminance(a: f64, b: f64) -> ContrastRatio {
    let (lighter, darker) = if a >= b { (a, b) } else { (b, a) };
    ContrastRatio((lighter + 0.05) / (darker + 0.05))
}

pub fn contrast_ratio(a: RgbColor, b: RgbColor) -> ContrastRatio {
    contrast_from_luminance(relative_luminance(a), relative_luminance(b))
}

pub fn delta_e_2000(a: RgbColor, b: RgbColor) -> PerceptualDistance {
    if a == b {
        return PerceptualDistance::ZERO;
    }
    PerceptualDistance(ciede2000(&srgb_to_lab(a), &srgb_to_lab(b)))
}

/// CIEDE2000 with `k_L = k_C = k_H = 1`.
pub fn ciede2000(lab1: &LabColor, lab2: &LabColor) -> f64 {
    const POW25_7: f64 = 6_103_515_625.0;

    let c1 = lab1.a.hypot(lab1.b);
    let c2 = lab2.a.hypot(lab2.b);
    let c_bar7 = ((c1 + c2) / 2.0).powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());

    let a1p = (1.0 + g) * lab1.a;
    let a2p = (1.0 + g) * lab2.a;
    let c1p = a1p.hypot(lab1.b);
    let c2p = a2p.hypot(lab2.b);
    let h1p = hue_angle(lab1.b, a1p);
    let h2p = hue_angle(lab2.b, a2p);

    let dl = lab2.l - lab1.l;
    let dc = c2p - c1p;
    let chroma_product = c1p * c2p;
    let dh = if chroma_product == 0.0 {
        0.0
    } else {
        let d = h2p - h1p;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let d_big_h = 2.0 * chroma_product.sqrt() * (dh.to_radians() / 2.0).sin();

    let l_bar = (lab1.l + lab2.l) / 2.0;
    let c_bar_p = (c1p + c2p) / 2.0;
    let h_bar = if chroma_product == 0.0 {
        h1p + h2p
    } else if (h1p - h2p).abs() <= 180.0 {
        (h1p + h2p) / 2.0
    } else if h1p + h2p < 360.0 {
        (h1p + h2p + 360.0) / 2.0
    } else {
        (h1p + h2p - 360.0) / 2.0
    };

    let t = 1.0 - 0.17 * (h_bar - 30.0).to_radians().cos()
        + 0.24 * (2.0 * h_bar).to_radians().cos()
        + 0.32 * (3.0 * h_bar + 6.0).to_radians().cos()
        - 0.20 * (4.0 * h_bar - 63.0).to_radians().cos();
    let d_theta = 30.0 * (-((h_bar - 275.0) / 25.0).powi(2)).exp();
    let c_bar_p7 = c_bar_p.powi(7);
    let r_c = 2.0 * (c_bar_p7 / (c_bar_p7 + POW25_7)).sqrt();
    let l50 = (l_bar - 50.0).powi(2);
    let s_l = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let s_c = 1.0 + 0.045 * c_bar_p;
    let s_h = 1.0 + 0.015 * c_bar_p * t;
    let r_t = -(2.0 * d_theta).to_radians().sin() * r_c;

    let tl = dl / s_l;
    let tc = dc / s_c;
    let th = d_big_h / s_h;
    (tl * tl + tc * tc + th * th + r_t * tc * th)
        .max(0.0)
        .sqrt()
}

fn hue_angle(b: f64, a_prime: f64) -> f64 {
    if b == 0.0 && a_prime == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a_prime).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}
