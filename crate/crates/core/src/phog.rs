//! Gradient images and the pyramid-HOG measures: Complexity, Anisotropy and
//! Self-similarity.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::image::{self, ColorSpace, Plane, RasterImage, ResizeMode, ResizePolicy};
use crate::numeric::{intersection, mean, normalized, split_remainder_last, std_dev};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GradientOperator {
    /// `(f[x+1] - f[x-1]) / 2` inside, one-sided differences on the border.
    #[default]
    CentralDifference,
    /// 3x3 Sobel scaled by 1/8, replicated border.
    Sobel,
}

/// Strongest-channel gradient per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientImage {
    pub width: usize,
    pub height: usize,
    pub magnitude: Vec<f64>,
    /// Radians in [0, 2π); 0 where the magnitude is 0.
    pub orientation: Vec<f64>,
}

impl GradientImage {
    pub fn total_mass(&self) -> f64 {
        self.magnitude.iter().sum()
    }
}

fn derivatives(p: &Plane, op: GradientOperator) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (p.width, p.height);
    let mut dx = vec![0.0; w * h];
    let mut dy = vec![0.0; w * h];
    match op {
        GradientOperator::CentralDifference => {
            let diff = |a: usize, b: usize, n: usize, f: &dyn Fn(usize) -> f64| -> f64 {
                let _ = b;
                if n < 2 {
                    0.0
                } else if a == 0 {
                    f(1) - f(0)
                } else if a == n - 1 {
                    f(n - 1) - f(n - 2)
                } else {
                    (f(a + 1) - f(a - 1)) / 2.0
                }
            };
            for y in 0..h {
                for x in 0..w {
                    dx[y * w + x] = diff(x, y, w, &|i| p.get(i, y));
                    dy[y * w + x] = diff(y, x, h, &|j| p.get(x, j));
                }
            }
        }
        GradientOperator::Sobel => {
            let at = |x: isize, y: isize| {
                p.get(x.clamp(0, w as isize - 1) as usize, y.clamp(0, h as isize - 1) as usize)
            };
            for y in 0..h as isize {
                for x in 0..w as isize {
                    let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                        - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
                    let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                        - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
                    let i = y as usize * w + x as usize;
                    dx[i] = gx / 8.0;
                    dy[i] = gy / 8.0;
                }
            }
        }
    }
    (dx, dy)
}

/// Orientation of `(dx, dy)` in [0, 2π).
pub fn orientation_of(dx: f64, dy: f64) -> f64 {
    let t = dy.atan2(dx).rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Per pixel, the channel with the largest gradient magnitude wins (first
/// channel on ties) and contributes its magnitude and orientation.
pub fn gradient_from_planes(planes: &[Plane], op: GradientOperator) -> GradientImage {
    assert!(!planes.is_empty());
    let (w, h) = (planes[0].width, planes[0].height);
    let mut magnitude = vec![0.0; w * h];
    let mut orientation = vec![0.0; w * h];
    let mut best = vec![-1.0f64; w * h];
    for p in planes {
        assert!(p.width == w && p.height == h, "channel planes must share geometry");
        let (dx, dy) = derivatives(p, op);
        for i in 0..w * h {
            let m = dx[i].hypot(dy[i]);
            if m > best[i] {
                best[i] = m;
                magnitude[i] = m;
                orientation[i] = if m > 0.0 { orientation_of(dx[i], dy[i]) } else { 0.0 };
            }
        }
    }
    GradientImage {
        width: w,
        height: h,
        magnitude,
        orientation,
    }
}

/// RGB8 is converted to L*a*b*; Lab, Gray8 and GrayF are used as they are.
pub fn gradient_image(img: &RasterImage, op: GradientOperator) -> Result<GradientImage> {
    let planes: Vec<Plane> = match img.space() {
        ColorSpace::Rgb8 => {
            let lab = image::rgb_to_lab(img)?;
            (0..3).map(|c| lab.channel(c)).collect()
        }
        ColorSpace::Lab => (0..3).map(|c| img.channel(c)).collect(),
        ColorSpace::Gray8 | ColorSpace::GrayF => vec![img.channel(0)],
        found => {
            return Err(Error::WrongColorSpace {
                expected: ColorSpace::Rgb8,
                found,
            })
        }
    };
    Ok(gradient_from_planes(&planes, op))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OrientationRange {
    /// Signed gradients over the full circle.
    #[default]
    Full360,
    /// Gradient direction ignored; orientations folded onto [0, π).
    Half180,
}

/// Magnitude-weighted orientation histograms for levels 0..=max_level;
/// level k holds 4^k sections in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct HogPyramid {
    pub bins: usize,
    pub range: OrientationRange,
    /// `levels[level][section][bin]`
    pub levels: Vec<Vec<Vec<f64>>>,
}

pub const PYRAMID_TOP_LEVEL: usize = 3;

fn orientation_bin(theta: f64, bins: usize, range: OrientationRange) -> usize {
    let (t, span) = match range {
        OrientationRange::Full360 => (theta, TAU),
        OrientationRange::Half180 => (theta % PI, PI),
    };
    ((t / (span / bins as f64)).floor() as usize).min(bins - 1)
}

/// Sections split each axis into 2^k parts; the last part takes the remainder.
pub fn hog_pyramid(grad: &GradientImage, bins: usize, range: OrientationRange) -> Result<HogPyramid> {
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be positive".into()));
    }
    let (w, h) = (grad.width, grad.height);
    let bin_of: Vec<usize> = grad
        .orientation
        .iter()
        .map(|&t| orientation_bin(t, bins, range))
        .collect();
    let mut levels = Vec::with_capacity(PYRAMID_TOP_LEVEL + 1);
    for level in 0..=PYRAMID_TOP_LEVEL {
        let g = 1usize << level;
        let cols = split_remainder_last(w, g);
        let rows = split_remainder_last(h, g);
        let mut sections = vec![vec![0.0; bins]; g * g];
        for (sy, ry) in rows.iter().enumerate() {
            for (sx, rx) in cols.iter().enumerate() {
                let hist = &mut sections[sy * g + sx];
                for y in ry.clone() {
                    for x in rx.clone() {
                        let i = y * w + x;
                        hist[bin_of[i]] += grad.magnitude[i];
                    }
                }
            }
        }
        levels.push(sections);
    }
    Ok(HogPyramid {
        bins,
        range,
        levels,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AnisotropyMode {
    /// One standard deviation over all retained normalized bin values.
    #[default]
    Pooled,
    /// Mean of the per-section standard deviations.
    PerSection,
}

/// Spread of the normalized top-level section histograms. Zero-mass sections
/// are skipped; with none left the result is 0.
pub fn anisotropy_from_pyramid(pyr: &HogPyramid, mode: AnisotropyMode) -> f64 {
    let top = pyr.levels.last().expect("pyramid has levels");
    let sections: Vec<Vec<f64>> = top.iter().filter_map(|h| normalized(h)).collect();
    if sections.is_empty() {
        return 0.0;
    }
    match mode {
        AnisotropyMode::Pooled => {
            let all: Vec<f64> = sections.concat();
            std_dev(&all)
        }
        AnisotropyMode::PerSection => {
            let per: Vec<f64> = sections.iter().map(|s| std_dev(s)).collect();
            mean(&per)
        }
    }
}

/// Weighted mean over levels 1..=3 of the mean histogram intersection between
/// each normalized section and the normalized ground level. Zero-mass sections
/// intersect to 0. NaN when the whole image has no gradient mass.
pub fn self_similarity_from_pyramid(pyr: &HogPyramid, weights: &[f64]) -> Result<f64> {
    validate_level_weights(weights, pyr.levels.len() - 1)?;
    let Some(ground) = normalized(&pyr.levels[0][0]) else {
        return Ok(f64::NAN);
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for (level, &wgt) in pyr.levels.iter().skip(1).zip(weights) {
        let scores: Vec<f64> = level
            .iter()
            .map(|h| normalized(h).map_or(0.0, |n| intersection(&n, &ground)))
            .collect();
        num += wgt * mean(&scores);
        den += wgt;
    }
    Ok(num / den)
}

pub fn validate_level_weights(weights: &[f64], levels: usize) -> Result<()> {
    if weights.len() != levels
        || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
        || weights.iter().all(|&w| w == 0.0)
    {
        return Err(Error::InvalidParameter(format!(
            "level weights must be {levels} nonnegative values, not all zero: {weights:?}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhogParams {
    pub resize: ResizePolicy,
    pub bins: usize,
    pub range: OrientationRange,
    pub operator: GradientOperator,
    pub level_weights: [f64; 3],
    pub anisotropy: AnisotropyMode,
}

impl Default for PhogParams {
    fn default() -> Self {
        Self {
            resize: ResizePolicy::new(ResizeMode::Area(100_000)),
            bins: 16,
            range: OrientationRange::Full360,
            operator: GradientOperator::CentralDifference,
            level_weights: [1.0, 1.0, 1.0],
            anisotropy: AnisotropyMode::Pooled,
        }
    }
}

fn prepared_gradient(img: &RasterImage, params: &PhogParams) -> Result<GradientImage> {
    params.resize.validate()?;
    let resized = image::resize(img, params.resize);
    gradient_image(&resized, params.operator)
}

/// Mean gradient magnitude.
pub fn phog_complexity(img: &RasterImage, params: &PhogParams) -> Result<f64> {
    let g = prepared_gradient(img, params)?;
    Ok(mean(&g.magnitude))
}

pub fn phog_anisotropy(img: &RasterImage, params: &PhogParams) -> Result<f64> {
    let g = prepared_gradient(img, params)?;
    let pyr = hog_pyramid(&g, params.bins, params.range)?;
    Ok(anisotropy_from_pyramid(&pyr, params.anisotropy))
}

pub fn phog_self_similarity(img: &RasterImage, params: &PhogParams) -> Result<f64> {
    validate_level_weights(&params.level_weights, PYRAMID_TOP_LEVEL)?;
    let g = prepared_gradient(img, params)?;
    let pyr = hog_pyramid(&g, params.bins, params.range)?;
    self_similarity_from_pyramid(&pyr, &params.level_weights)
}
