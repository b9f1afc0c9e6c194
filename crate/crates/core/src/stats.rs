//! Size and aspect descriptors, per-channel statistics, RMS contrast and the
//! lightness/hue histogram entropies.

use crate::color;
use crate::error::Result;
use crate::image::{self, ColorSpace, RasterImage};
use crate::numeric::{entropy_bits, mean, std_dev};

/// Histogram resolution of both entropies; the maximum entropy is log2(256) = 8 bits.
pub const ENTROPY_BINS: usize = 256;

/// Height plus width, in pixels, of the image as decoded.
pub fn image_size(img: &RasterImage) -> f64 {
    (img.width() + img.height()) as f64
}

/// Width over height.
pub fn aspect_ratio(img: &RasterImage) -> f64 {
    img.width() as f64 / img.height() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColorModel {
    Rgb,
    Hsv,
    Lab,
}

impl ColorModel {
    pub fn channel_names(self) -> [&'static str; 3] {
        match self {
            ColorModel::Rgb => ["r", "g", "b"],
            ColorModel::Hsv => ["h", "s", "v"],
            ColorModel::Lab => ["l", "a", "b"],
        }
    }
}

/// Per-channel mean and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelStats {
    pub model: ColorModel,
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

/// Channel statistics of an RGB8 image in the requested color model. RGB is
/// reported on the 0..255 scale, HSV on 0..1 and Lab in its native units.
pub fn channel_stats(img: &RasterImage, model: ColorModel) -> Result<ChannelStats> {
    img.expect_space(ColorSpace::Rgb8)?;
    let converted = match model {
        ColorModel::Rgb => img.clone(),
        ColorModel::Hsv => image::rgb_to_hsv(img)?,
        ColorModel::Lab => image::rgb_to_lab(img)?,
    };
    let mut out = ChannelStats {
        model,
        mean: [0.0; 3],
        std: [0.0; 3],
    };
    for c in 0..3 {
        let plane = converted.channel(c);
        out.mean[c] = mean(&plane.data);
        out.std[c] = std_dev(&plane.data);
    }
    Ok(out)
}

/// Population standard deviation of CIELAB L*.
pub fn rms_contrast(img: &RasterImage) -> Result<f64> {
    let l = image::lightness_plane(img)?;
    Ok(std_dev(&l.data))
}

fn lightness_bin(l: f64) -> usize {
    ((l / 100.0 * ENTROPY_BINS as f64).floor().max(0.0) as usize).min(ENTROPY_BINS - 1)
}

fn hue_bin(h: f64) -> usize {
    ((h * ENTROPY_BINS as f64).floor().max(0.0) as usize).min(ENTROPY_BINS - 1)
}

/// Shannon entropy (bits) of the 256-bin L* histogram over [0, 100].
pub fn lightness_entropy(img: &RasterImage) -> Result<f64> {
    let l = image::lightness_plane(img)?;
    let mut hist = vec![0.0; ENTROPY_BINS];
    for &v in &l.data {
        hist[lightness_bin(v)] += 1.0;
    }
    Ok(entropy_bits(&hist))
}

/// How achromatic pixels (S = 0, hue undefined) enter the hue histogram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AchromaticHue {
    /// Counted with hue 0.
    #[default]
    Include,
    Exclude,
}

/// Shannon entropy (bits) of the 256-bin HSV hue histogram over [0, 1).
pub fn color_entropy(img: &RasterImage, achromatic: AchromaticHue) -> Result<f64> {
    img.expect_space(ColorSpace::Rgb8)?;
    let mut hist = vec![0.0; ENTROPY_BINS];
    for p in img.bytes().expect("rgb8").chunks_exact(3) {
        let [h, s, _] = color::rgb_to_hsv([
            p[0] as f64 / 255.0,
            p[1] as f64 / 255.0,
            p[2] as f64 / 255.0,
        ]);
        if s == 0.0 && achromatic == AchromaticHue::Exclude {
            continue;
        }
        hist[hue_bin(h)] += 1.0;
    }
    Ok(entropy_bits(&hist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_and_aspect() {
        let img = |w, h| RasterImage::from_fn_gray_rgb8(w, h, |_, _| 0);
        assert_eq!(image_size(&img(1024, 768)), 1792.0);
        assert_eq!(image_size(&img(1, 1)), 2.0);
        assert_eq!(image_size(&img(512, 512)), 1024.0);
        assert!((aspect_ratio(&img(1920, 1080)) - 16.0 / 9.0).abs() < 1e-12);
        assert_eq!(aspect_ratio(&img(8, 8)), 1.0);
        assert_eq!(aspect_ratio(&img(1080, 1920)), 0.5625);
    }

    #[test]
    fn constant_image_has_zero_spread() {
        let img = RasterImage::from_fn_rgb8(9, 7, |_, _| [10, 200, 33]);
        for model in [ColorModel::Rgb, ColorModel::Hsv, ColorModel::Lab] {
            let s = channel_stats(&img, model).unwrap();
            assert!(s.std.iter().all(|&v| v.abs() < 1e-9), "{model:?} {s:?}");
        }
        assert_eq!(rms_contrast(&img).unwrap(), 0.0);
        assert_eq!(lightness_entropy(&img).unwrap(), 0.0);
        assert_eq!(color_entropy(&img, AchromaticHue::Include).unwrap(), 0.0);
    }

    #[test]
    fn two_point_red_channel() {
        let img = RasterImage::from_fn_rgb8(4, 4, |x, _| if x < 2 { [0, 0, 0] } else { [255, 0, 0] });
        let s = channel_stats(&img, ColorModel::Rgb).unwrap();
        assert_eq!(s.mean[0], 127.5);
        assert_eq!(s.std[0], 127.5);
    }

    #[test]
    fn half_black_half_white_contrast() {
        let img = RasterImage::from_fn_gray_rgb8(4, 2, |x, _| if x < 2 { 0 } else { 255 });
        assert!((rms_contrast(&img).unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn achromatic_policy() {
        let img = RasterImage::from_fn_rgb8(2, 1, |x, _| if x == 0 { [9, 9, 9] } else { [0, 0, 255] });
        assert_eq!(color_entropy(&img, AchromaticHue::Include).unwrap(), 1.0);
        assert_eq!(color_entropy(&img, AchromaticHue::Exclude).unwrap(), 0.0);
    }

    #[test]
    fn lab_lightness_bins_cover_range() {
        assert_eq!(lightness_bin(0.0), 0);
        assert_eq!(lightness_bin(100.0), 255);
        assert_eq!(lightness_bin(-1e-12), 0);
        assert_eq!(hue_bin(0.999_999), 255);
    }
}
