//! Pixel-based composition measures: Mirror symmetry, Balance score, deviation
//! of the center of mass (DCM) and Homogeneity. All scores are percentages.

use crate::error::{Error, Result};
use crate::image::{self, ColorSpace, Plane, RasterImage};
use crate::numeric::{entropy_bits, split_remainder_last};

fn gray(img: &RasterImage) -> Result<Plane> {
    image::gray_plane(img)
}

/// Perceptual mass: black weighs 1, white 0.
pub fn mass_plane(img: &RasterImage) -> Result<Plane> {
    let g = gray(img)?;
    Ok(Plane::new(
        g.width,
        g.height,
        g.data.iter().map(|v| (255.0 - v) / 255.0).collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MirrorAxis {
    Vertical,
    Horizontal,
    /// Top-left to bottom-right; square images only.
    MainDiagonal,
    /// Top-right to bottom-left; square images only.
    AntiDiagonal,
}

/// `100 * (1 - Σ|I - reflect(I)| / (255 * N))` for one axis.
pub fn axis_symmetry(plane: &Plane, axis: MirrorAxis) -> f64 {
    let (w, h) = (plane.width, plane.height);
    if matches!(axis, MirrorAxis::MainDiagonal | MirrorAxis::AntiDiagonal) {
        assert_eq!(w, h, "diagonal reflection needs a square image");
    }
    let mut diff = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (rx, ry) = match axis {
                MirrorAxis::Vertical => (w - 1 - x, y),
                MirrorAxis::Horizontal => (x, h - 1 - y),
                MirrorAxis::MainDiagonal => (y, x),
                MirrorAxis::AntiDiagonal => (w - 1 - y, h - 1 - x),
            };
            diff += (plane.get(x, y) - plane.get(rx, ry)).abs();
        }
    }
    100.0 * (1.0 - diff / (255.0 * (w * h) as f64))
}

/// Mean axis symmetry: four axes for square images, vertical and horizontal
/// otherwise. Higher is more symmetric.
pub fn mirror_symmetry(img: &RasterImage) -> Result<f64> {
    let g = gray(img)?;
    let mut axes = vec![MirrorAxis::Vertical, MirrorAxis::Horizontal];
    if g.width == g.height {
        axes.extend([MirrorAxis::MainDiagonal, MirrorAxis::AntiDiagonal]);
    }
    Ok(axes.iter().map(|&a| axis_symmetry(&g, a)).sum::<f64>() / axes.len() as f64)
}

/// The eight paired-region comparisons behind the Balance score, each
/// `100 * |Ma - Mb| / (Ma + Mb)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceComparisons {
    pub left_right: f64,
    pub top_bottom: f64,
    /// Triangles on either side of the top-left to bottom-right diagonal.
    pub main_diagonal: f64,
    /// Triangles on either side of the top-right to bottom-left diagonal.
    pub anti_diagonal: f64,
    /// Outer quarter columns against the central band of equal width.
    pub outer_inner_columns: f64,
    pub outer_inner_rows: f64,
    /// Column x against column w-1-x, accumulated over the left half.
    pub column_pairs: f64,
    pub row_pairs: f64,
}

impl BalanceComparisons {
    pub fn values(&self) -> [f64; 8] {
        [
            self.left_right,
            self.top_bottom,
            self.main_diagonal,
            self.anti_diagonal,
            self.outer_inner_columns,
            self.outer_inner_rows,
            self.column_pairs,
            self.row_pairs,
        ]
    }

    pub fn score(&self) -> f64 {
        self.values().iter().sum::<f64>() / 8.0
    }
}

fn contrast(a: f64, b: f64) -> f64 {
    if a + b <= 0.0 {
        0.0
    } else {
        100.0 * (a - b).abs() / (a + b)
    }
}

/// Halves of an axis of length `n`; the odd middle line belongs to neither.
fn halves(line_mass: &[f64]) -> (f64, f64) {
    let n = line_mass.len();
    let a = line_mass[..n / 2].iter().sum();
    let b = line_mass[n.div_ceil(2)..].iter().sum();
    (a, b)
}

/// Outer quarter lines against the central band `[n/2 - q, n/2 + q)` with
/// `q = n / 4`; a line straddling the band edge counts by its overlap.
fn outer_inner(line_mass: &[f64]) -> (f64, f64) {
    let n = line_mass.len();
    let q = n / 4;
    let outer: f64 = line_mass[..q].iter().chain(&line_mass[n - q..]).sum();
    let (lo, hi) = (n as f64 / 2.0 - q as f64, n as f64 / 2.0 + q as f64);
    let inner = line_mass
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let overlap = ((i + 1) as f64).min(hi) - (i as f64).max(lo);
            m * overlap.max(0.0)
        })
        .sum();
    (outer, inner)
}

fn line_pairs(line_mass: &[f64]) -> f64 {
    let n = line_mass.len();
    let (mut diff, mut total) = (0.0, 0.0);
    for i in 0..n / 2 {
        let (a, b) = (line_mass[i], line_mass[n - 1 - i]);
        diff += (a - b).abs();
        total += a + b;
    }
    if total <= 0.0 {
        0.0
    } else {
        100.0 * diff / total
    }
}

/// Comparisons on a mass plane. Pixels are assigned to diagonal triangles by
/// their centre; centres exactly on a diagonal belong to neither side.
pub fn balance_comparisons(mass: &Plane) -> BalanceComparisons {
    let (w, h) = (mass.width, mass.height);
    let mut cols = vec![0.0; w];
    let mut rows = vec![0.0; h];
    let (mut upper, mut lower, mut before, mut after) = (0.0, 0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            let m = mass.get(x, y);
            cols[x] += m;
            rows[y] += m;
            // exact integer forms of (x+.5)/w - (y+.5)/h and (x+.5)/w + (y+.5)/h - 1
            let main = (2 * x + 1) as i64 * h as i64 - (2 * y + 1) as i64 * w as i64;
            let anti = (2 * x + 1) as i64 * h as i64 + (2 * y + 1) as i64 * w as i64 - 2 * (w * h) as i64;
            if main > 0 {
                upper += m;
            } else if main < 0 {
                lower += m;
            }
            if anti < 0 {
                before += m;
            } else if anti > 0 {
                after += m;
            }
        }
    }
    let (l, r) = halves(&cols);
    let (t, b) = halves(&rows);
    let (oc, ic) = outer_inner(&cols);
    let (or, ir) = outer_inner(&rows);
    BalanceComparisons {
        left_right: contrast(l, r),
        top_bottom: contrast(t, b),
        main_diagonal: contrast(upper, lower),
        anti_diagonal: contrast(before, after),
        outer_inner_columns: contrast(oc, ic),
        outer_inner_rows: contrast(or, ir),
        column_pairs: line_pairs(&cols),
        row_pairs: line_pairs(&rows),
    }
}

/// Mean of the eight comparisons: 0 is balanced, 100 fully asymmetric.
pub fn balance_score(img: &RasterImage) -> Result<f64> {
    Ok(balance_comparisons(&mass_plane(img)?).score())
}

/// Distance of the center of mass from the geometric center as a percentage
/// of the half-diagonal. NaN for a massless image; 0 for a 1x1 image.
pub fn dcm_from_mass(mass: &Plane) -> f64 {
    let (w, h) = (mass.width, mass.height);
    let (mut total, mut mx, mut my) = (0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            let m = mass.get(x, y);
            total += m;
            mx += m * x as f64;
            my += m * y as f64;
        }
    }
    if total <= 0.0 {
        return f64::NAN;
    }
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let half_diag = cx.hypot(cy);
    if half_diag == 0.0 {
        return 0.0;
    }
    100.0 * (mx / total - cx).hypot(my / total - cy) / half_diag
}

pub fn dcm(img: &RasterImage) -> Result<f64> {
    Ok(dcm_from_mass(&mass_plane(img)?))
}

/// Otsu threshold on a 256-bin histogram: pixels `<= t` form the dark class.
/// Ties go to the lowest threshold.
pub fn otsu_threshold(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0u64, 0.0);
    let (mut best_t, mut best_var) = (0u8, -1.0);
    for t in 0..255usize {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            if best_var < 0.0 {
                best_var = 0.0;
                best_t = t as u8;
            }
            continue;
        }
        let (p0, p1) = (w0 as f64, w1 as f64);
        let d = sum0 / p0 - (sum_all - sum0) / p1;
        let var = p0 * p1 * d * d;
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// Otsu-binarized dark pixels; `None` when the image is a single class.
pub fn otsu_dark_mask(img: &RasterImage) -> Result<Option<(usize, usize, Vec<bool>)>> {
    let g = gray(img)?;
    let mut hist = [0u64; 256];
    for &v in &g.data {
        hist[v.round().clamp(0.0, 255.0) as usize] += 1;
    }
    let t = otsu_threshold(&hist) as f64;
    let dark: Vec<bool> = g.data.iter().map(|&v| v.round() <= t).collect();
    let n_dark = dark.iter().filter(|&&d| d).count();
    if n_dark == 0 || n_dark == dark.len() {
        return Ok(None);
    }
    Ok(Some((g.width, g.height, dark)))
}

pub const HOMOGENEITY_GRID: usize = 10;

/// Relative entropy of dark-pixel counts over the rows and over the columns of
/// a 10x10 grid (remainder to the last cell), averaged and scaled to percent.
pub fn homogeneity_from_mask(width: usize, height: usize, dark: &[bool]) -> f64 {
    let cols = split_remainder_last(width, HOMOGENEITY_GRID);
    let rows = split_remainder_last(height, HOMOGENEITY_GRID);
    let mut row_counts = vec![0.0; HOMOGENEITY_GRID];
    let mut col_counts = vec![0.0; HOMOGENEITY_GRID];
    for (ry, yr) in rows.iter().enumerate() {
        for (cx, xr) in cols.iter().enumerate() {
            let mut n = 0.0;
            for y in yr.clone() {
                for x in xr.clone() {
                    if dark[y * width + x] {
                        n += 1.0;
                    }
                }
            }
            row_counts[ry] += n;
            col_counts[cx] += n;
        }
    }
    if row_counts.iter().sum::<f64>() == 0.0 {
        return f64::NAN;
    }
    let max = (HOMOGENEITY_GRID as f64).log2();
    100.0 * (entropy_bits(&row_counts) / max + entropy_bits(&col_counts) / max) / 2.0
}

pub fn homogeneity(img: &RasterImage) -> Result<f64> {
    let min = HOMOGENEITY_GRID as u32;
    if img.width() < min || img.height() < min {
        return Err(Error::TooSmall {
            width: img.width(),
            height: img.height(),
            min,
        });
    }
    if !matches!(img.space(), ColorSpace::Rgb8 | ColorSpace::Gray8 | ColorSpace::GrayF) {
        return Err(Error::WrongColorSpace {
            expected: ColorSpace::Rgb8,
            found: img.space(),
        });
    }
    Ok(match otsu_dark_mask(img)? {
        Some((w, h, dark)) => homogeneity_from_mask(w, h, &dark),
        None => f64::NAN,
    })
}
