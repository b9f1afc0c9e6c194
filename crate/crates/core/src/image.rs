//! Decoded rasters, color-space conversion and the pre-processing steps the
//! metric pipelines depend on (resize, pad, crop, hue rotation).

use crate::color;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    Rgb8,
    Gray8,
    GrayF,
    /// CIELAB, L* in [0, 100].
    Lab,
    /// Hexcone HSV with every component in [0, 1]; H is a fraction of the full circle.
    Hsv,
}

impl ColorSpace {
    pub fn channels(self) -> usize {
        match self {
            ColorSpace::Gray8 | ColorSpace::GrayF => 1,
            ColorSpace::Rgb8 | ColorSpace::Lab | ColorSpace::Hsv => 3,
        }
    }

    pub fn is_8bit(self) -> bool {
        matches!(self, ColorSpace::Rgb8 | ColorSpace::Gray8)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Samples {
    U8(Vec<u8>),
    F64(Vec<f64>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::U8(v) => v.len(),
            Samples::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> f64 {
        match self {
            Samples::U8(v) => v[i] as f64,
            Samples::F64(v) => v[i],
        }
    }
}

/// A decoded pixel grid, row-major with channels interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    space: ColorSpace,
    samples: Samples,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, space: ColorSpace, samples: Samples) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!("{width}x{height}")));
        }
        let expected = width as usize * height as usize * space.channels();
        if samples.len() != expected {
            return Err(Error::InvalidGeometry(format!(
                "{width}x{height} {space:?} needs {expected} samples, got {}",
                samples.len()
            )));
        }
        match (&samples, space.is_8bit()) {
            (Samples::U8(_), true) => {}
            (Samples::F64(v), false) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidGeometry("non-finite sample".into()));
                }
            }
            _ => {
                return Err(Error::InvalidGeometry(format!(
                    "sample type does not match {space:?}"
                )))
            }
        }
        Ok(Self {
            width,
            height,
            space,
            samples,
        })
    }

    pub fn rgb8(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, ColorSpace::Rgb8, Samples::U8(data))
    }

    pub fn gray8(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, ColorSpace::Gray8, Samples::U8(data))
    }

    pub fn gray_f64(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        Self::new(width, height, ColorSpace::GrayF, Samples::F64(data))
    }

    /// Builds an RGB8 image from a per-pixel function. Panics on a zero dimension.
    pub fn from_fn_rgb8(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::rgb8(width, height, data).expect("valid dimensions")
    }

    /// Builds a gray RGB8 image (R = G = B) from a per-pixel function.
    pub fn from_fn_gray_rgb8(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        Self::from_fn_rgb8(width, height, |x, y| {
            let v = f(x, y);
            [v, v, v]
        })
    }

    pub fn from_fn_gray8(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::gray8(width, height, data).expect("valid dimensions")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn channels(&self) -> usize {
        self.space.channels()
    }

    pub fn bytes(&self) -> Option<&[u8]> {
        match &self.samples {
            Samples::U8(v) => Some(v),
            Samples::F64(_) => None,
        }
    }

    pub fn reals(&self) -> Option<&[f64]> {
        match &self.samples {
            Samples::F64(v) => Some(v),
            Samples::U8(_) => None,
        }
    }

    pub fn sample(&self, x: u32, y: u32, c: usize) -> f64 {
        let i = (y as usize * self.width as usize + x as usize) * self.channels() + c;
        self.samples.get(i)
    }

    /// Copies one channel out as a real-valued plane.
    pub fn channel(&self, c: usize) -> Plane {
        assert!(c < self.channels(), "channel {c} out of range");
        let n = self.channels();
        let data = match &self.samples {
            Samples::U8(v) => v.iter().skip(c).step_by(n).map(|&b| b as f64).collect(),
            Samples::F64(v) => v.iter().skip(c).step_by(n).copied().collect(),
        };
        Plane::new(self.width as usize, self.height as usize, data)
    }

    pub(crate) fn expect_space(&self, expected: ColorSpace) -> Result<()> {
        if self.space == expected {
            Ok(())
        } else {
            Err(Error::WrongColorSpace {
                expected,
                found: self.space,
            })
        }
    }

    /// Maps every pixel to a new pixel of the same channel count through `f`.
    fn map_pixels(&self, space: ColorSpace, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Self {
        let n = self.channels();
        let mut buf = vec![0.0; n];
        let mut out = Vec::with_capacity(self.pixel_count() * space.channels());
        for i in 0..self.pixel_count() {
            for (c, b) in buf.iter_mut().enumerate() {
                *b = self.samples.get(i * n + c);
            }
            out.extend(f(&buf));
        }
        let samples = if space.is_8bit() {
            Samples::U8(out.into_iter().map(quantize_u8).collect())
        } else {
            Samples::F64(out)
        };
        Self::new(self.width, self.height, space, samples).expect("pixel map keeps geometry")
    }

    /// Rebuilds an image of the same space from per-pixel source coordinates.
    fn remap(&self, width: u32, height: u32, mut source: impl FnMut(u32, u32) -> (u32, u32)) -> Self {
        let n = self.channels();
        let w = self.width as usize;
        let samples = match &self.samples {
            Samples::U8(v) => {
                let mut out = Vec::with_capacity(width as usize * height as usize * n);
                for y in 0..height {
                    for x in 0..width {
                        let (sx, sy) = source(x, y);
                        let i = (sy as usize * w + sx as usize) * n;
                        out.extend_from_slice(&v[i..i + n]);
                    }
                }
                Samples::U8(out)
            }
            Samples::F64(v) => {
                let mut out = Vec::with_capacity(width as usize * height as usize * n);
                for y in 0..height {
                    for x in 0..width {
                        let (sx, sy) = source(x, y);
                        let i = (sy as usize * w + sx as usize) * n;
                        out.extend_from_slice(&v[i..i + n]);
                    }
                }
                Samples::F64(out)
            }
        };
        Self::new(width, height, self.space, samples).expect("remap keeps sample count")
    }

    pub fn crop(&self, x0: u32, y0: u32, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || x0 + width > self.width || y0 + height > self.height {
            return Err(Error::InvalidGeometry(format!(
                "crop {width}x{height}+{x0}+{y0} outside {}x{}",
                self.width, self.height
            )));
        }
        Ok(self.remap(width, height, |x, y| (x + x0, y + y0)))
    }

    /// Mirror about the vertical axis (left <-> right).
    pub fn flip_horizontal(&self) -> Self {
        let w = self.width;
        self.remap(self.width, self.height, |x, y| (w - 1 - x, y))
    }

    /// Mirror about the horizontal axis (top <-> bottom).
    pub fn flip_vertical(&self) -> Self {
        let h = self.height;
        self.remap(self.width, self.height, |x, y| (x, h - 1 - y))
    }

    pub fn rotate180(&self) -> Self {
        let (w, h) = (self.width, self.height);
        self.remap(w, h, |x, y| (w - 1 - x, h - 1 - y))
    }

    pub fn rotate90(&self) -> Self {
        // clockwise: new (x, y) takes old (y, h - 1 - x)
        let h = self.height;
        self.remap(self.height, self.width, |x, y| (y, h - 1 - x))
    }

    pub fn transpose(&self) -> Self {
        self.remap(self.height, self.width, |x, y| (y, x))
    }
}

fn quantize_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Single-channel real-valued working buffer used by the spectral, fractal
/// and gradient pipelines.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane data length");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn into_image(self) -> RasterImage {
        RasterImage::gray_f64(self.width as u32, self.height as u32, self.data)
            .expect("plane has valid geometry")
    }
}

// ---------------------------------------------------------------------------
// decoding and conversions
// ---------------------------------------------------------------------------

/// Decodes a PNG or JPEG stream into RGB8. Grayscale files are expanded to
/// three equal channels and any alpha channel is dropped.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    use ::image::ImageFormat;
    let format = ::image::guess_format(bytes).map_err(|_| Error::UnsupportedFormat)?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(Error::UnsupportedFormat);
    }
    let decoded = ::image::load_from_memory_with_format(bytes, format)
        .map_err(|e| Error::CorruptStream(e.to_string()))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    RasterImage::rgb8(w, h, rgb.into_raw())
}

pub fn decode_file(path: impl AsRef<std::path::Path>) -> Result<RasterImage> {
    decode_image(&std::fs::read(path)?)
}

/// BT.601 luma, rounded to 8 bits.
pub fn to_grayscale(img: &RasterImage) -> Result<RasterImage> {
    img.expect_space(ColorSpace::Rgb8)?;
    let rgb = img.bytes().expect("rgb8 stores bytes");
    let data = rgb
        .chunks_exact(3)
        .map(|p| color::luma(p[0], p[1], p[2]))
        .collect();
    RasterImage::gray8(img.width, img.height, data)
}

/// sRGB (D65) to CIELAB.
pub fn rgb_to_lab(img: &RasterImage) -> Result<RasterImage> {
    img.expect_space(ColorSpace::Rgb8)?;
    let rgb = img.bytes().expect("rgb8 stores bytes");
    let mut out = Vec::with_capacity(rgb.len());
    for p in rgb.chunks_exact(3) {
        out.extend_from_slice(&color::rgb8_to_lab(p[0], p[1], p[2]));
    }
    RasterImage::new(img.width, img.height, ColorSpace::Lab, Samples::F64(out))
}

pub fn rgb_to_hsv(img: &RasterImage) -> Result<RasterImage> {
    img.expect_space(ColorSpace::Rgb8)?;
    Ok(img.map_pixels(ColorSpace::Hsv, |p| {
        color::rgb_to_hsv([p[0] / 255.0, p[1] / 255.0, p[2] / 255.0]).to_vec()
    }))
}

/// 8-bit gray plane for RGB8 (via luma), Gray8 or GrayF input.
pub fn gray_plane(img: &RasterImage) -> Result<Plane> {
    match img.space {
        ColorSpace::Rgb8 => Ok(to_grayscale(img)?.channel(0)),
        ColorSpace::Gray8 | ColorSpace::GrayF => Ok(img.channel(0)),
        found => Err(Error::WrongColorSpace {
            expected: ColorSpace::Rgb8,
            found,
        }),
    }
}

/// CIELAB L* plane for RGB8, Gray8 (treated as achromatic sRGB) or Lab input.
pub fn lightness_plane(img: &RasterImage) -> Result<Plane> {
    let (w, h) = (img.width as usize, img.height as usize);
    match img.space {
        ColorSpace::Rgb8 => {
            let rgb = img.bytes().expect("rgb8 stores bytes");
            let data = rgb
                .chunks_exact(3)
                .map(|p| {
                    if p[0] == p[1] && p[1] == p[2] {
                        color::gray8_lightness(p[0])
                    } else {
                        color::rgb8_to_lab(p[0], p[1], p[2])[0]
                    }
                })
                .collect();
            Ok(Plane::new(w, h, data))
        }
        ColorSpace::Gray8 => {
            let g = img.bytes().expect("gray8 stores bytes");
            Ok(Plane::new(w, h, g.iter().map(|&v| color::gray8_lightness(v)).collect()))
        }
        ColorSpace::Lab => Ok(img.channel(0)),
        found => Err(Error::WrongColorSpace {
            expected: ColorSpace::Rgb8,
            found,
        }),
    }
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResizeFilter {
    #[default]
    Bilinear,
    NearestNeighbor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResizeMode {
    #[default]
    None,
    /// Longer side becomes exactly `n`, aspect ratio kept.
    LongSideTo(u32),
    /// Downscale only, so that width x height <= n.
    MaxPixels(u32),
    /// Scale up or down so that width x height is approximately n.
    Area(u32),
    Exact(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ResizePolicy {
    pub mode: ResizeMode,
    pub filter: ResizeFilter,
}

impl ResizePolicy {
    pub const NONE: ResizePolicy = ResizePolicy {
        mode: ResizeMode::None,
        filter: ResizeFilter::Bilinear,
    };

    pub fn new(mode: ResizeMode) -> Self {
        Self {
            mode,
            filter: ResizeFilter::Bilinear,
        }
    }

    pub fn with_filter(mut self, filter: ResizeFilter) -> Self {
        self.filter = filter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.mode {
            ResizeMode::None => true,
            ResizeMode::LongSideTo(n) | ResizeMode::MaxPixels(n) | ResizeMode::Area(n) => n >= 1,
            ResizeMode::Exact(w, h) => w >= 1 && h >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("resize policy {:?}", self.mode)))
        }
    }

    /// Output dimensions for a `width` x `height` input.
    pub fn target_dims(&self, width: u32, height: u32) -> (u32, u32) {
        let (w, h) = (width as f64, height as f64);
        match self.mode {
            ResizeMode::None => (width, height),
            ResizeMode::LongSideTo(n) => {
                if width >= height {
                    (n, ((h * n as f64 / w).round() as u32).max(1))
                } else {
                    (((w * n as f64 / h).round() as u32).max(1), n)
                }
            }
            ResizeMode::MaxPixels(n) => {
                if width as u64 * height as u64 <= n as u64 {
                    return (width, height);
                }
                let s = (n as f64 / (w * h)).sqrt();
                let mut tw = ((w * s).floor() as u32).max(1);
                let mut th = ((h * s).floor() as u32).max(1);
                while tw as u64 * th as u64 > n as u64 {
                    if tw >= th {
                        tw -= 1;
                    } else {
                        th -= 1;
                    }
                }
                (tw, th)
            }
            ResizeMode::Area(n) => {
                let s = (n as f64 / (w * h)).sqrt();
                (
                    ((w * s).round() as u32).max(1),
                    ((h * s).round() as u32).max(1),
                )
            }
            ResizeMode::Exact(tw, th) => (tw, th),
        }
    }
}

pub fn resize(img: &RasterImage, policy: ResizePolicy) -> RasterImage {
    let (tw, th) = policy.target_dims(img.width, img.height);
    resize_exact(img, tw, th, policy.filter)
}

/// Pixel-center aligned resampling to exactly `tw` x `th`.
pub fn resize_exact(img: &RasterImage, tw: u32, th: u32, filter: ResizeFilter) -> RasterImage {
    assert!(tw >= 1 && th >= 1, "resize target must be nonempty");
    if tw == img.width && th == img.height {
        return img.clone();
    }
    match filter {
        ResizeFilter::NearestNeighbor => {
            let (sw, sh) = (img.width, img.height);
            img.remap(tw, th, |x, y| {
                let sx = (((x as f64 + 0.5) * sw as f64 / tw as f64) as u32).min(sw - 1);
                let sy = (((y as f64 + 0.5) * sh as f64 / th as f64) as u32).min(sh - 1);
                (sx, sy)
            })
        }
        ResizeFilter::Bilinear => {
            let n = img.channels();
            let taps_x = bilinear_taps(img.width as usize, tw as usize);
            let taps_y = bilinear_taps(img.height as usize, th as usize);
            let sw = img.width as usize;
            let mut out = Vec::with_capacity(tw as usize * th as usize * n);
            for &(y0, y1, ty) in &taps_y {
                for &(x0, x1, tx) in &taps_x {
                    for c in 0..n {
                        let at = |x: usize, y: usize| img.samples.get((y * sw + x) * n + c);
                        let top = at(x0, y0) * (1.0 - tx) + at(x1, y0) * tx;
                        let bot = at(x0, y1) * (1.0 - tx) + at(x1, y1) * tx;
                        out.push(top * (1.0 - ty) + bot * ty);
                    }
                }
            }
            let samples = if img.space.is_8bit() {
                Samples::U8(out.into_iter().map(quantize_u8).collect())
            } else {
                Samples::F64(out)
            };
            RasterImage::new(tw, th, img.space, samples).expect("resize geometry")
        }
    }
}

fn bilinear_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

/// Centers a grayscale image on a square canvas filled with its rounded mean value.
pub fn pad_to_square_mean_gray(img: &RasterImage) -> Result<RasterImage> {
    if !matches!(img.space, ColorSpace::Gray8 | ColorSpace::GrayF) {
        return Err(Error::WrongColorSpace {
            expected: ColorSpace::Gray8,
            found: img.space,
        });
    }
    let (w, h) = (img.width, img.height);
    if w == h {
        return Ok(img.clone());
    }
    let side = w.max(h);
    let (ox, oy) = ((side - w) / 2, (side - h) / 2);
    let inside = |x: u32, y: u32| x >= ox && x < ox + w && y >= oy && y < oy + h;
    let idx = |x: u32, y: u32| ((y - oy) * w + (x - ox)) as usize;
    match &img.samples {
        Samples::U8(v) => {
            let sum: u64 = v.iter().map(|&b| b as u64).sum();
            let fill = quantize_u8(sum as f64 / v.len() as f64);
            let mut out = Vec::with_capacity((side * side) as usize);
            for y in 0..side {
                for x in 0..side {
                    out.push(if inside(x, y) { v[idx(x, y)] } else { fill });
                }
            }
            RasterImage::gray8(side, side, out)
        }
        Samples::F64(v) => {
            let fill = (v.iter().sum::<f64>() / v.len() as f64).round();
            let mut out = Vec::with_capacity((side * side) as usize);
            for y in 0..side {
                for x in 0..side {
                    out.push(if inside(x, y) { v[idx(x, y)] } else { fill });
                }
            }
            RasterImage::gray_f64(side, side, out)
        }
    }
}

/// Largest power of two not exceeding `n` (n >= 1).
pub fn largest_pow2_at_most(n: u32) -> u32 {
    1 << (31 - n.leading_zeros())
}

/// Centered square crop whose side is the largest power of two <= min(w, h).
/// Odd leftovers put the extra pixel after the window.
pub fn crop_center_square_pow2(img: &RasterImage) -> Result<RasterImage> {
    let m = img.width.min(img.height);
    if m < 2 {
        return Err(Error::TooSmall {
            width: img.width,
            height: img.height,
            min: 2,
        });
    }
    let side = largest_pow2_at_most(m);
    img.crop((img.width - side) / 2, (img.height - side) / 2, side, side)
}

/// Centered crop to the largest square.
pub fn crop_center_square(img: &RasterImage) -> RasterImage {
    let side = img.width.min(img.height);
    img.crop((img.width - side) / 2, (img.height - side) / 2, side, side)
        .expect("square fits")
}

/// Rotates hue by `degrees` through real-valued HSV; S and V are kept.
pub fn rotate_hue(img: &RasterImage, degrees: f64) -> Result<RasterImage> {
    img.expect_space(ColorSpace::Rgb8)?;
    let shift = degrees / 360.0;
    Ok(img.map_pixels(ColorSpace::Rgb8, |p| {
        let mut hsv = color::rgb_to_hsv([p[0] / 255.0, p[1] / 255.0, p[2] / 255.0]);
        hsv[0] = (hsv[0] + shift).rem_euclid(1.0);
        color::hsv_to_rgb(hsv).iter().map(|c| c * 255.0).collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(img: &RasterImage, format: ::image::ImageFormat) -> Vec<u8> {
        let buf = ::image::RgbImage::from_raw(img.width(), img.height(), img.bytes().unwrap().to_vec())
            .unwrap();
        let mut out = std::io::Cursor::new(Vec::new());
        buf.write_to(&mut out, format).unwrap();
        out.into_inner()
    }

    #[test]
    fn decode_png_red() {
        let img = RasterImage::from_fn_rgb8(2, 2, |_, _| [255, 0, 0]);
        let bytes = encode(&img, ::image::ImageFormat::Png);
        let back = decode_image(&bytes).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn decode_gray_png_expands_channels() {
        let g = ::image::GrayImage::from_raw(1, 1, vec![77]).unwrap();
        let mut out = std::io::Cursor::new(Vec::new());
        g.write_to(&mut out, ::image::ImageFormat::Png).unwrap();
        let back = decode_image(out.get_ref()).unwrap();
        assert_eq!(back.bytes().unwrap(), &[77, 77, 77]);
    }

    #[test]
    fn decode_jpeg_gray_within_codec_tolerance() {
        let img = RasterImage::from_fn_rgb8(1, 1, |_, _| [128, 128, 128]);
        let bytes = encode(&img, ::image::ImageFormat::Jpeg);
        let back = decode_image(&bytes).unwrap();
        for &c in back.bytes().unwrap() {
            assert!((c as i32 - 128).abs() <= 2, "{c}");
        }
    }

    #[test]
    fn decode_truncated_png_is_corrupt() {
        let img = RasterImage::from_fn_rgb8(8, 8, |x, y| [x as u8 * 30, y as u8 * 30, 5]);
        let bytes = encode(&img, ::image::ImageFormat::Png);
        let err = decode_image(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(matches!(err, Error::CorruptStream(_)), "{err:?}");
    }

    #[test]
    fn decode_rejects_other_formats() {
        assert!(matches!(decode_image(b"GIF89a......").unwrap_err(), Error::UnsupportedFormat));
        assert!(matches!(decode_image(b"hello").unwrap_err(), Error::UnsupportedFormat));
    }

    #[test]
    fn grayscale_needs_rgb() {
        let g = RasterImage::gray8(1, 1, vec![3]).unwrap();
        assert!(matches!(to_grayscale(&g), Err(Error::WrongColorSpace { .. })));
        assert!(matches!(rgb_to_lab(&g), Err(Error::WrongColorSpace { .. })));
    }

    #[test]
    fn invariant_checks() {
        assert!(RasterImage::rgb8(2, 2, vec![0; 11]).is_err());
        assert!(RasterImage::rgb8(0, 2, vec![]).is_err());
        assert!(RasterImage::new(1, 1, ColorSpace::Lab, Samples::U8(vec![0; 3])).is_err());
    }

    #[test]
    fn resize_dims() {
        let long = ResizePolicy::new(ResizeMode::LongSideTo(1024));
        assert_eq!(long.target_dims(2000, 1000), (1024, 512));
        let cap = ResizePolicy::new(ResizeMode::MaxPixels(120_000));
        let (w, h) = cap.target_dims(600, 300);
        assert!((w as i32 - 489).abs() <= 1 && (h as i32 - 244).abs() <= 1);
        assert!(w * h <= 120_000);
        assert_eq!(cap.target_dims(100, 100), (100, 100));
        assert_eq!(ResizePolicy::NONE.target_dims(7, 3), (7, 3));
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = RasterImage::from_fn_gray_rgb8(37, 21, |_, _| 99);
        for filter in [ResizeFilter::Bilinear, ResizeFilter::NearestNeighbor] {
            let r = resize_exact(&img, 64, 10, filter);
            assert_eq!((r.width(), r.height()), (64, 10));
            assert!(r.bytes().unwrap().iter().all(|&v| v == 99));
        }
    }

    #[test]
    fn pad_examples() {
        let wide = RasterImage::gray8(4, 2, vec![100; 8]).unwrap();
        let p = pad_to_square_mean_gray(&wide).unwrap();
        assert_eq!((p.width(), p.height()), (4, 4));
        assert!(p.bytes().unwrap().iter().all(|&v| v == 100));

        // 2x4 with mean 37.5 -> fill 38
        let tall = RasterImage::gray8(2, 4, vec![0, 75, 0, 75, 0, 75, 0, 75]).unwrap();
        let p = pad_to_square_mean_gray(&tall).unwrap();
        assert_eq!((p.width(), p.height()), (4, 4));
        let b = p.bytes().unwrap();
        assert_eq!(b[0], 38);
        assert_eq!(b[3], 38);
        assert_eq!(&b[1..3], &[0, 75]);

        let sq = RasterImage::gray8(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(pad_to_square_mean_gray(&sq).unwrap(), sq);
    }

    #[test]
    fn crop_pow2_examples() {
        let img = RasterImage::from_fn_gray8(1000, 700, |x, y| ((x + y) % 256) as u8);
        let c = crop_center_square_pow2(&img).unwrap();
        assert_eq!((c.width(), c.height()), (512, 512));
        // window starts at ((1000-512)/2, (700-512)/2) = (244, 94)
        assert_eq!(c.sample(0, 0, 0), ((244 + 94) % 256) as f64);

        let sq = RasterImage::from_fn_gray8(256, 256, |x, _| x as u8);
        assert_eq!(crop_center_square_pow2(&sq).unwrap(), sq);

        let small = RasterImage::from_fn_gray8(3, 9, |_, _| 0);
        let c = crop_center_square_pow2(&small).unwrap();
        assert_eq!((c.width(), c.height()), (2, 2));

        let tiny = RasterImage::from_fn_gray8(1, 9, |_, _| 0);
        assert!(matches!(crop_center_square_pow2(&tiny), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn hue_rotation_examples() {
        let img = RasterImage::from_fn_rgb8(4, 1, |x, _| [[200, 30, 90], [12, 250, 3], [9, 9, 200], [255, 0, 0]][x as usize]);
        let full = rotate_hue(&img, 360.0).unwrap();
        for (a, b) in img.bytes().unwrap().iter().zip(full.bytes().unwrap()) {
            assert!((*a as i32 - *b as i32).abs() <= 1);
        }
        let red = RasterImage::from_fn_rgb8(1, 1, |_, _| [255, 0, 0]);
        let green = rotate_hue(&red, 120.0).unwrap();
        let g = green.bytes().unwrap();
        assert!(g[0] <= 1 && g[1] >= 254 && g[2] <= 1, "{g:?}");
        let gray = RasterImage::from_fn_rgb8(1, 1, |_, _| [77, 77, 77]);
        assert_eq!(rotate_hue(&gray, 47.0).unwrap(), gray);
    }

    #[test]
    fn flips_are_involutions() {
        let img = RasterImage::from_fn_rgb8(5, 3, |x, y| [x as u8, y as u8, (x * y) as u8]);
        assert_eq!(img.flip_horizontal().flip_horizontal(), img);
        assert_eq!(img.flip_vertical().flip_vertical(), img);
        assert_eq!(img.transpose().transpose(), img);
        assert_eq!(img.rotate90().rotate90(), img.rotate180());
    }
}
