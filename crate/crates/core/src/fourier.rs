//! Radially averaged Fourier spectra and the three spectral slope estimators
//! (amplitude/Cook's-distance, binned power with sigma, quartile-trimmed
//! lightness amplitude).
//!
//! Slopes are reported as the positive exponent α of a `1/f^α` decay, i.e.
//! the negated slope of the log-log regression line. Fits use natural logs;
//! the slope does not depend on the log base.

use crate::error::{Error, Result};
use crate::fft;
use crate::image::{self, Plane, RasterImage, ResizeFilter};
use crate::numeric::{cooks_distance, fit_line, LineFit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Amplitude,
    Power,
}

/// Per-radius mean of |F| or |F|^2, radii 1..=side/2 in cycles/image.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSpectrum {
    pub kind: SpectrumKind,
    pub radii: Vec<u32>,
    pub magnitude: Vec<f64>,
    /// Number of Fourier coefficients averaged into each radius.
    pub counts: Vec<usize>,
}

/// Radial average of the 2-D spectrum of a square, power-of-two plane. Each
/// coefficient goes to radius `round(sqrt(fx^2 + fy^2))`; the DC term and the
/// corners beyond side/2 are dropped.
pub fn radial_spectrum(plane: &Plane, kind: SpectrumKind) -> Result<RadialSpectrum> {
    let n = plane.width;
    if plane.height != n {
        return Err(Error::NotSquare {
            width: plane.width as u32,
            height: plane.height as u32,
        });
    }
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::SideNotPow2(n as u32));
    }
    let spectrum = fft::forward(&plane.data, n, n);
    let r_max = n / 2;
    let mut sums = vec![0.0; r_max + 1];
    let mut counts = vec![0usize; r_max + 1];
    for v in 0..n {
        let fy = fft::signed_freq(v, n) as f64;
        for u in 0..n {
            let fx = fft::signed_freq(u, n) as f64;
            let r = (fx * fx + fy * fy).sqrt().round() as usize;
            if r == 0 || r > r_max {
                continue;
            }
            let c = spectrum[v * n + u];
            sums[r] += match kind {
                SpectrumKind::Amplitude => c.norm(),
                SpectrumKind::Power => c.norm_sqr(),
            };
            counts[r] += 1;
        }
    }
    Ok(RadialSpectrum {
        kind,
        radii: (1..=r_max as u32).collect(),
        magnitude: (1..=r_max).map(|r| sums[r] / counts[r] as f64).collect(),
        counts: counts[1..].to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeMethod {
    Amplitude,
    Power,
    Quartile,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub method: SlopeMethod,
    /// Positive α of the `1/f^α` decay.
    pub slope: f64,
    pub intercept: f64,
    /// Mean squared residual of the log-log fit.
    pub sigma: f64,
    pub points_used: usize,
}

/// Outlier rule for the Cook's-distance refit.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum CookThreshold {
    /// Conventional 4/n.
    #[default]
    FourOverN,
    /// The literal n/4 reading.
    NOverFour,
    Fixed(f64),
}

impl CookThreshold {
    pub fn value(self, n: usize) -> f64 {
        match self {
            CookThreshold::FourOverN => 4.0 / n as f64,
            CookThreshold::NOverFour => n as f64 / 4.0,
            CookThreshold::Fixed(t) => t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierParams {
    pub cook_threshold: CookThreshold,
    /// Number of log-spaced bins for the binned power fit.
    pub power_bins: usize,
    pub power_band: (u32, u32),
    /// Side length the padded/cropped squares are resampled to.
    pub target_side: u32,
    pub filter: ResizeFilter,
}

impl Default for FourierParams {
    fn default() -> Self {
        Self {
            cook_threshold: CookThreshold::FourOverN,
            power_bins: 30,
            power_band: (10, 256),
            target_side: 1024,
            filter: ResizeFilter::Bilinear,
        }
    }
}

fn log_points(spec: &RadialSpectrum, keep: impl Fn(usize, u32) -> bool) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, (&r, &m)) in spec.radii.iter().zip(&spec.magnitude).enumerate() {
        if keep(i, r) && m > 0.0 {
            x.push((r as f64).ln());
            y.push(m.ln());
        }
    }
    (x, y)
}

fn finish(method: SlopeMethod, fit: LineFit, x: &[f64], y: &[f64]) -> SlopeFit {
    let resid = fit.residuals(x, y);
    SlopeFit {
        method,
        slope: -fit.slope,
        intercept: fit.intercept,
        sigma: resid.iter().map(|e| e * e).sum::<f64>() / resid.len() as f64,
        points_used: x.len(),
    }
}

fn degenerate(method: SlopeMethod) -> SlopeFit {
    SlopeFit {
        method,
        slope: f64::NAN,
        intercept: f64::NAN,
        sigma: f64::NAN,
        points_used: 0,
    }
}

/// All-radii amplitude fit, then one refit without points whose Cook's
/// distance exceeds the threshold.
pub fn fit_amplitude(spec: &RadialSpectrum, threshold: CookThreshold) -> SlopeFit {
    let (x, y) = log_points(spec, |_, _| true);
    let Some(first) = fit_line(&x, &y) else {
        return degenerate(SlopeMethod::Amplitude);
    };
    let limit = threshold.value(x.len());
    let d = cooks_distance(&x, &y, &first);
    let (kx, ky): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(&y)
        .zip(&d)
        .filter(|(_, &di)| di <= limit)
        .map(|((a, b), _)| (*a, *b))
        .unzip();
    match fit_line(&kx, &ky) {
        Some(fit) => finish(SlopeMethod::Amplitude, fit, &kx, &ky),
        None => finish(SlopeMethod::Amplitude, first, &x, &y),
    }
}

/// Power spectrum restricted to `band`, averaged into `bins` log-spaced bins,
/// then fit. Empty bins are skipped.
pub fn fit_power(spec: &RadialSpectrum, band: (u32, u32), bins: usize) -> SlopeFit {
    let (lo, hi) = band;
    let (x, y) = log_points(spec, |_, r| r >= lo && r <= hi);
    if x.is_empty() || bins == 0 {
        return degenerate(SlopeMethod::Power);
    }
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let width = (lhi - llo) / bins as f64;
    let mut sx = vec![0.0; bins];
    let mut sy = vec![0.0; bins];
    let mut n = vec![0usize; bins];
    for (a, b) in x.iter().zip(&y) {
        let k = (((a - llo) / width).floor().max(0.0) as usize).min(bins - 1);
        sx[k] += a;
        sy[k] += b;
        n[k] += 1;
    }
    let (bx, by): (Vec<f64>, Vec<f64>) = (0..bins)
        .filter(|&k| n[k] > 0)
        .map(|k| (sx[k] / n[k] as f64, sy[k] / n[k] as f64))
        .unzip();
    match fit_line(&bx, &by) {
        Some(fit) => finish(SlopeMethod::Power, fit, &bx, &by),
        None => degenerate(SlopeMethod::Power),
    }
}

/// Amplitude fit over the middle half of the radius list (lowest and highest
/// quartile of radius values dropped by count).
pub fn fit_quartile(spec: &RadialSpectrum) -> SlopeFit {
    let n = spec.radii.len();
    let q = n / 4;
    let (x, y) = log_points(spec, |i, _| i >= q && i < n - q);
    match fit_line(&x, &y) {
        Some(fit) => finish(SlopeMethod::Quartile, fit, &x, &y),
        None => degenerate(SlopeMethod::Quartile),
    }
}

fn resample_square(plane: Plane, side: u32, filter: ResizeFilter) -> Plane {
    if plane.width == side as usize && plane.height == side as usize {
        return plane;
    }
    let img = plane.into_image();
    image::resize_exact(&img, side, side, filter).channel(0)
}

/// Gray -> power-of-two center crop -> amplitude spectrum -> Cook's-distance refit.
/// Accepts RGB8 (converted to 8-bit luma), Gray8 or GrayF.
pub fn slope_amplitude(img: &RasterImage, params: &FourierParams) -> Result<SlopeFit> {
    let gray = image::gray_plane(img)?.into_image();
    let square = image::crop_center_square_pow2(&gray)?.channel(0);
    let spec = radial_spectrum(&square, SpectrumKind::Amplitude)?;
    Ok(fit_amplitude(&spec, params.cook_threshold))
}

/// Gray -> pad to square with mean gray -> resample to 1024 -> power
/// spectrum -> band [10, 256] -> log binning -> fit. `sigma` is the Fourier Sigma.
pub fn slope_power(img: &RasterImage, params: &FourierParams) -> Result<SlopeFit> {
    min_side(img, 2)?;
    let gray = match img.space() {
        image::ColorSpace::Rgb8 => image::to_grayscale(img)?,
        _ => image::gray_plane(img)?.into_image(),
    };
    let padded = image::pad_to_square_mean_gray(&gray)?;
    let side = params.target_side;
    let resized = image::resize_exact(&padded, side, side, params.filter).channel(0);
    let spec = radial_spectrum(&resized, SpectrumKind::Power)?;
    Ok(fit_power(&spec, params.power_band, params.power_bins))
}

/// L* -> power-of-two center crop -> resample to 1024 -> amplitude spectrum
/// -> quartile trimming -> fit.
pub fn slope_quartile(img: &RasterImage, params: &FourierParams) -> Result<SlopeFit> {
    let cropped = image::crop_center_square_pow2(img)?;
    let lightness = match img.space() {
        image::ColorSpace::GrayF => cropped.channel(0),
        _ => image::lightness_plane(&cropped)?,
    };
    let plane = resample_square(lightness, params.target_side, params.filter);
    let spec = radial_spectrum(&plane, SpectrumKind::Amplitude)?;
    Ok(fit_quartile(&spec))
}

fn min_side(img: &RasterImage, min: u32) -> Result<()> {
    if img.width().min(img.height()) < min {
        Err(Error::TooSmall {
            width: img.width(),
            height: img.height(),
            min,
        })
    } else {
        Ok(())
    }
}
