//! Per-pixel color conversions: BT.601 luma, sRGB/D65 CIELAB and hexcone HSV.

use std::sync::OnceLock;

/// BT.601 luma weights used for every grayscale conversion.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

// Linear sRGB -> XYZ (D65).
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

/// Reference white: the XYZ image of sRGB (1, 1, 1), so white maps to L* = 100, a* = b* = 0.
pub const WHITE_D65: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

const LAB_EPSILON: f64 = 216.0 / 24389.0; // (6/29)^3

pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = LUMA_WEIGHTS[0] * r as f64 + LUMA_WEIGHTS[1] * g as f64 + LUMA_WEIGHTS[2] * b as f64;
    y.round().clamp(0.0, 255.0) as u8
}

/// sRGB transfer function inverse, for a normalized component in [0, 1].
pub fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_lut() -> &'static [f64; 256] {
    static LUT: OnceLock<[f64; 256]> = OnceLock::new();
    LUT.get_or_init(|| {
        let mut lut = [0.0; 256];
        for (i, v) in lut.iter_mut().enumerate() {
            *v = srgb_to_linear(i as f64 / 255.0);
        }
        lut
    })
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        t / (3.0 * (6.0f64 / 29.0).powi(2)) + 4.0 / 29.0
    }
}

/// Converts linear-light RGB in [0, 1] to CIELAB.
pub fn linear_rgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let mut xyz = [0.0; 3];
    for (row, out) in RGB_TO_XYZ.iter().zip(xyz.iter_mut()) {
        *out = row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2];
    }
    let fx = lab_f(xyz[0] / WHITE_D65[0]);
    let fy = lab_f(xyz[1] / WHITE_D65[1]);
    let fz = lab_f(xyz[2] / WHITE_D65[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn rgb8_to_lab(r: u8, g: u8, b: u8) -> [f64; 3] {
    let lut = linear_lut();
    linear_rgb_to_lab([lut[r as usize], lut[g as usize], lut[b as usize]])
}

/// L* of an achromatic sRGB value, without the full matrix product.
pub fn gray8_lightness(v: u8) -> f64 {
    // for a neutral color Y / Yn equals the linear value exactly
    116.0 * lab_f(linear_lut()[v as usize]) - 16.0
}

/// Hexcone HSV from RGB components in [0, 1]; hue is a fraction of the full circle in [0, 1).
/// Achromatic colors get hue 0.
pub fn rgb_to_hsv(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta <= 0.0 {
        0.0
    } else {
        let sector = if max == r {
            (g - b) / delta
        } else if max == g {
            (b - r) / delta + 2.0
        } else {
            (r - g) / delta + 4.0
        };
        let h = sector.rem_euclid(6.0) / 6.0;
        if h >= 1.0 {
            0.0
        } else {
            h
        }
    };
    [h, s, max]
}

pub fn hsv_to_rgb(hsv: [f64; 3]) -> [f64; 3] {
    let [h, s, v] = hsv;
    let h6 = h.rem_euclid(1.0) * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - f * s);
    let t = v * (1.0 - (1.0 - f) * s);
    match sector as u32 % 6 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}
