//! Box-counting fractal dimensions: 2d on the mean-thresholded boundary, 3d
//! (differential box counting) on the L* surface.

use crate::error::{Error, Result};
use crate::image::{self, ColorSpace, Plane, RasterImage};
use crate::numeric::fit_line;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_degenerate(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.bits.len()
    }

    pub fn inverted(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Pixels with at least one 4-neighbour of the opposite value: the pixels
    /// on either side of every black/white edge.
    pub fn boundary(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if x + 1 < w && self.bits[i] != self.bits[i + 1] {
                    out[i] = true;
                    out[i + 1] = true;
                }
                if y + 1 < h && self.bits[i] != self.bits[i + w] {
                    out[i] = true;
                    out[i + w] = true;
                }
            }
        }
        Self {
            width: w,
            height: h,
            bits: out,
        }
    }
}

/// Box sides (pixels) with their box counts and the fitted log-log slope.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxCountSeries {
    /// Strictly decreasing; each side is half the previous one, rounded down.
    pub scales: Vec<usize>,
    pub counts: Vec<f64>,
    pub slope: f64,
}

/// `1` where the value is strictly above the image mean; ties go to 0.
pub fn binarize_mean(img: &RasterImage) -> Result<BinaryMask> {
    if !matches!(img.space(), ColorSpace::Gray8 | ColorSpace::GrayF) {
        return Err(Error::WrongColorSpace {
            expected: ColorSpace::Gray8,
            found: img.space(),
        });
    }
    Ok(binarize_plane(&img.channel(0)))
}

pub fn binarize_plane(plane: &Plane) -> BinaryMask {
    let m = plane.mean();
    BinaryMask {
        width: plane.width,
        height: plane.height,
        bits: plane.data.iter().map(|&v| v > m).collect(),
    }
}

/// Boundary box counts on a square power-of-two mask, box sides side/2 .. 2,
/// and the slope of log2 N against log2(1/L).
pub fn box_count_2d(mask: &BinaryMask) -> BoxCountSeries {
    let side = mask.width;
    assert!(mask.height == side && side.is_power_of_two() && side >= 4);
    let boundary = mask.boundary();
    // occupancy grid of 2x2 boxes, then OR-reduce upward
    let mut n = side / 2;
    let mut occ: Vec<bool> = (0..n * n)
        .map(|i| {
            let (bx, by) = (i % n, i / n);
            let (x, y) = (2 * bx, 2 * by);
            boundary.get(x, y)
                || boundary.get(x + 1, y)
                || boundary.get(x, y + 1)
                || boundary.get(x + 1, y + 1)
        })
        .collect();
    let mut scales = vec![2usize];
    let mut counts = vec![occ.iter().filter(|&&b| b).count() as f64];
    while n > 2 {
        let m = n / 2;
        occ = (0..m * m)
            .map(|i| {
                let (x, y) = (2 * (i % m), 2 * (i / m));
                occ[y * n + x] || occ[y * n + x + 1] || occ[(y + 1) * n + x] || occ[(y + 1) * n + x + 1]
            })
            .collect();
        n = m;
        scales.push(side / n);
        counts.push(occ.iter().filter(|&&b| b).count() as f64);
    }
    scales.reverse();
    counts.reverse();
    let slope = log_slope(&scales, &counts, f64::log2);
    BoxCountSeries {
        scales,
        counts,
        slope,
    }
}

fn log_slope(scales: &[usize], counts: &[f64], log: fn(f64) -> f64) -> f64 {
    let x: Vec<f64> = scales.iter().map(|&l| log(1.0 / l as f64)).collect();
    let y: Vec<f64> = counts.iter().map(|&c| log(c)).collect();
    fit_line(&x, &y).map_or(f64::NAN, |f| f.slope)
}

/// 2d dimension of a square power-of-two mask; NaN for an all-0/all-1 mask.
pub fn fractal_dim_2d_mask(mask: &BinaryMask) -> f64 {
    if mask.is_degenerate() {
        return f64::NAN;
    }
    box_count_2d(mask).slope
}

/// Gray -> power-of-two center crop -> mean threshold -> boundary box counting.
/// Expected in [1, 2]; NaN when the thresholded image is uniform.
pub fn fractal_dim_2d(img: &RasterImage) -> Result<f64> {
    require_side(img, 4)?;
    let gray = image::gray_plane(img)?.into_image();
    let square = image::crop_center_square_pow2(&gray)?;
    Ok(fractal_dim_2d_mask(&binarize_plane(&square.channel(0))))
}

/// Differential box counting on a square plane of L* values in [0, 100].
/// Box sides halve from side/2 (integer division) while they stay >= 2;
/// boxes are cubes in a volume normalized to side^3, so the height unit is
/// `L * 100 / side`. Each column contributes `floor(max / s) - floor(min / s)
/// + 1` boxes. Partial tiles at the right/bottom edge count like full ones.
pub fn box_count_3d(surface: &Plane) -> BoxCountSeries {
    let side = surface.width;
    assert!(surface.height == side && side >= 4);
    let mut scales = Vec::new();
    let mut counts = Vec::new();
    let mut l = side / 2;
    while l >= 2 {
        let s = l as f64 * 100.0 / side as f64;
        let tiles = side.div_ceil(l);
        // running (min, max) per tile column for the current band of rows
        let mut band = vec![(f64::INFINITY, f64::NEG_INFINITY); tiles];
        let mut count = 0.0;
        for y in 0..side {
            let row = &surface.data[y * side..(y + 1) * side];
            for (t, chunk) in row.chunks(l).enumerate() {
                let (lo, hi) = &mut band[t];
                for &v in chunk {
                    *lo = lo.min(v);
                    *hi = hi.max(v);
                }
            }
            if (y + 1) % l == 0 || y + 1 == side {
                for (lo, hi) in band.iter_mut() {
                    count += (*hi / s).floor() - (*lo / s).floor() + 1.0;
                    *lo = f64::INFINITY;
                    *hi = f64::NEG_INFINITY;
                }
            }
        }
        scales.push(l);
        counts.push(count);
        l /= 2;
    }
    let slope = log_slope(&scales, &counts, f64::ln);
    BoxCountSeries {
        scales,
        counts,
        slope,
    }
}

/// Largest central square -> L* -> differential box counting. Expected in [2, 3].
pub fn fractal_dim_3d(img: &RasterImage) -> Result<f64> {
    require_side(img, 4)?;
    let square = image::crop_center_square(img);
    let surface = match square.space() {
        ColorSpace::GrayF => square.channel(0),
        _ => image::lightness_plane(&square)?,
    };
    Ok(box_count_3d(&surface).slope)
}

fn require_side(img: &RasterImage, min: u32) -> Result<()> {
    if img.width().min(img.height()) < min {
        return Err(Error::TooSmall {
            width: img.width(),
            height: img.height(),
            min,
        });
    }
    Ok(())
}
