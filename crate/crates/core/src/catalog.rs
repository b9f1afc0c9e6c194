//! Registry of metric identifiers and per-image evaluation with shared
//! intermediates (one spectrum fit, one edge field, one conv1 pass per image).

use std::cell::OnceCell;

use crate::balance;
use crate::cnn::{self, CnnParams, Conv1Responses, Conv1Weights};
use crate::edges::{self, EdgeField, EdgeParams, PairParams};
use crate::error::{Error, Result};
use crate::fourier::{self, FourierParams, SlopeFit};
use crate::fractal;
use crate::image::{self, RasterImage};
use crate::phog::{self, GradientImage, HogPyramid, PhogParams};
use crate::stats::{self, AchromaticHue, ChannelStats, ColorModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricGroup {
    Geometry,
    Color,
    Contrast,
    Fourier,
    Fractal,
    Phog,
    Edges,
    Balance,
    Cnn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricInfo {
    pub id: &'static str,
    pub group: MetricGroup,
    pub description: &'static str,
}

const fn m(id: &'static str, group: MetricGroup, description: &'static str) -> MetricInfo {
    MetricInfo { id, group, description }
}

use MetricGroup as G;

/// Every metric in canonical column order.
pub static METRICS: &[MetricInfo] = &[
    m("image_size", G::Geometry, "width + height in pixels"),
    m("aspect_ratio", G::Geometry, "width / height"),
    m("rgb_mean_r", G::Color, "mean red (0-255)"),
    m("rgb_mean_g", G::Color, "mean green (0-255)"),
    m("rgb_mean_b", G::Color, "mean blue (0-255)"),
    m("rgb_std_r", G::Color, "standard deviation of red"),
    m("rgb_std_g", G::Color, "standard deviation of green"),
    m("rgb_std_b", G::Color, "standard deviation of blue"),
    m("hsv_mean_h", G::Color, "mean hue (0-1)"),
    m("hsv_mean_s", G::Color, "mean saturation (0-1)"),
    m("hsv_mean_v", G::Color, "mean value (0-1)"),
    m("hsv_std_h", G::Color, "standard deviation of hue"),
    m("hsv_std_s", G::Color, "standard deviation of saturation"),
    m("hsv_std_v", G::Color, "standard deviation of value"),
    m("lab_mean_l", G::Color, "mean L*"),
    m("lab_mean_a", G::Color, "mean a*"),
    m("lab_mean_b", G::Color, "mean b*"),
    m("lab_std_l", G::Color, "standard deviation of L*"),
    m("lab_std_a", G::Color, "standard deviation of a*"),
    m("lab_std_b", G::Color, "standard deviation of b*"),
    m("rms_contrast", G::Contrast, "standard deviation of L*"),
    m("lightness_entropy", G::Contrast, "entropy of the 256-bin L* histogram (bits)"),
    m("color_entropy", G::Color, "entropy of the 256-bin hue histogram (bits)"),
    m("slope_amplitude", G::Fourier, "amplitude spectrum slope, full-range fit with outlier refit"),
    m("slope_power", G::Fourier, "power spectrum slope, binned mid-frequency fit"),
    m("sigma_power", G::Fourier, "mean squared residual of the binned power fit"),
    m("slope_quartile", G::Fourier, "amplitude spectrum slope, interquartile radii"),
    m("fractal_dim_2d", G::Fractal, "box-counting dimension of the thresholded boundary"),
    m("fractal_dim_3d", G::Fractal, "differential box-counting dimension of the L* surface"),
    m("phog_complexity", G::Phog, "mean gradient magnitude"),
    m("phog_anisotropy", G::Phog, "spread of normalized level-3 orientation histograms"),
    m("phog_self_similarity", G::Phog, "histogram intersection of pyramid sections with the whole image"),
    m("edge_density", G::Edges, "summed Gabor response per pixel"),
    m("edge_density_sum", G::Edges, "summed Gabor response"),
    m("eoe_first_order", G::Edges, "entropy of the edge-orientation histogram (bits)"),
    m("eoe_second_order", G::Edges, "entropy of pairwise edge-orientation differences (bits)"),
    m("mirror_symmetry", G::Balance, "pixel mirror symmetry (percent)"),
    m("balance_score", G::Balance, "mean mass asymmetry over eight region pairs (percent)"),
    m("dcm", G::Balance, "center-of-mass deviation from the image center (percent)"),
    m("homogeneity", G::Balance, "relative entropy of dark pixels over a 10x10 grid (percent)"),
    m("cnn_symmetry_lr", G::Cnn, "conv1 left-right symmetry"),
    m("cnn_symmetry_ud", G::Cnn, "conv1 up-down symmetry"),
    m("cnn_symmetry_combined", G::Cnn, "mean of left-right and up-down conv1 symmetry"),
    m("cnn_self_similarity", G::Cnn, "median intersection of pooled conv1 maxima with the whole image"),
    m("cnn_sparseness", G::Cnn, "variance of all pooled conv1 responses"),
    m("cnn_variability", G::Cnn, "median per-filter variance of pooled conv1 responses"),
];

pub fn find(id: &str) -> Option<&'static MetricInfo> {
    METRICS.iter().find(|m| m.id == id)
}

pub fn all_ids() -> Vec<&'static str> {
    METRICS.iter().map(|m| m.id).collect()
}

/// Everything except the conv1 metrics, which need a weight file.
pub fn default_ids() -> Vec<&'static str> {
    METRICS.iter().filter(|m| m.group != G::Cnn).map(|m| m.id).collect()
}

pub fn needs_weights(ids: &[&str]) -> bool {
    ids.iter().any(|id| find(id).is_some_and(|m| m.group == G::Cnn))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricParams {
    pub achromatic: AchromaticHue,
    pub fourier: FourierParams,
    pub phog: PhogParams,
    pub edges: EdgeParams,
    pub pairs: PairParams,
    pub cnn: CnnParams,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            achromatic: AchromaticHue::Include,
            fourier: FourierParams::default(),
            phog: PhogParams::default(),
            edges: EdgeParams::default(),
            pairs: PairParams::default(),
            cnn: CnnParams::default(),
        }
    }
}

/// Lazily evaluates metrics on one image, computing each shared intermediate
/// at most once. Not thread-safe; use one per image.
pub struct Analyzer<'a> {
    img: &'a RasterImage,
    params: &'a MetricParams,
    weights: Option<&'a Conv1Weights>,
    stats: [OnceCell<ChannelStats>; 3],
    amplitude: OnceCell<SlopeFit>,
    power: OnceCell<SlopeFit>,
    quartile: OnceCell<SlopeFit>,
    gradient: OnceCell<GradientImage>,
    pyramid: OnceCell<HogPyramid>,
    edges: OnceCell<EdgeField>,
    balance: OnceCell<balance::BalanceComparisons>,
    cnn_input: OnceCell<RasterImage>,
    conv: OnceCell<Conv1Responses>,
    symmetry: OnceCell<cnn::CnnSymmetry>,
}

fn cached<'c, T>(cell: &'c OnceCell<T>, f: impl FnOnce() -> Result<T>) -> Result<&'c T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v))
}

impl<'a> Analyzer<'a> {
    pub fn new(img: &'a RasterImage, params: &'a MetricParams, weights: Option<&'a Conv1Weights>) -> Self {
        Self {
            img,
            params,
            weights,
            stats: Default::default(),
            amplitude: OnceCell::new(),
            power: OnceCell::new(),
            quartile: OnceCell::new(),
            gradient: OnceCell::new(),
            pyramid: OnceCell::new(),
            edges: OnceCell::new(),
            balance: OnceCell::new(),
            cnn_input: OnceCell::new(),
            conv: OnceCell::new(),
            symmetry: OnceCell::new(),
        }
    }

    fn channel(&self, model: ColorModel, mean: bool, c: usize) -> Result<f64> {
        let slot = match model {
            ColorModel::Rgb => 0,
            ColorModel::Hsv => 1,
            ColorModel::Lab => 2,
        };
        let s = cached(&self.stats[slot], || stats::channel_stats(self.img, model))?;
        Ok(if mean { s.mean[c] } else { s.std[c] })
    }

    fn gradient(&self) -> Result<&GradientImage> {
        cached(&self.gradient, || {
            let p = &self.params.phog;
            p.resize.validate()?;
            phog::gradient_image(&image::resize(self.img, p.resize), p.operator)
        })
    }

    fn pyramid(&self) -> Result<&HogPyramid> {
        let g = self.gradient()?;
        cached(&self.pyramid, || phog::hog_pyramid(g, self.params.phog.bins, self.params.phog.range))
    }

    fn edges(&self) -> Result<&EdgeField> {
        cached(&self.edges, || edges::gabor_responses(self.img, &self.params.edges))
    }

    fn weights(&self) -> Result<&Conv1Weights> {
        self.weights
            .ok_or_else(|| Error::InvalidParameter("conv1 metrics need a weight file".into()))
    }

    fn cnn_input(&self) -> Result<&RasterImage> {
        cached(&self.cnn_input, || {
            let side = self.params.cnn.input_side;
            let rgb = match self.img.space() {
                crate::ColorSpace::Rgb8 => self.img.clone(),
                found => {
                    return Err(Error::WrongColorSpace {
                        expected: crate::ColorSpace::Rgb8,
                        found,
                    })
                }
            };
            Ok(image::resize_exact(&rgb, side, side, self.params.cnn.filter))
        })
    }

    fn conv(&self) -> Result<&Conv1Responses> {
        let w = self.weights()?;
        let input = self.cnn_input()?;
        let p = &self.params.cnn;
        cached(&self.conv, || cnn::apply_conv1(input, w, p.stride, p.rectify))
    }

    fn symmetry(&self) -> Result<&cnn::CnnSymmetry> {
        let w = self.weights()?;
        let input = self.cnn_input()?;
        let base = self.conv()?;
        cached(&self.symmetry, || cnn::cnn_symmetry_with_base(input, base, w, &self.params.cnn))
    }

    /// Value of one metric; NaN marks a degenerate input (for example a
    /// constant image where an entropy of orientations is undefined).
    pub fn compute(&self, id: &str) -> Result<f64> {
        let img = self.img;
        let p = self.params;
        let stat = |id: &str| -> Option<(ColorModel, bool, usize)> {
            let (model, rest) = id.split_once('_')?;
            let model = match model {
                "rgb" => ColorModel::Rgb,
                "hsv" => ColorModel::Hsv,
                "lab" => ColorModel::Lab,
                _ => return None,
            };
            let (kind, ch) = rest.split_once('_')?;
            let c = model.channel_names().iter().position(|n| *n == ch)?;
            Some((model, kind == "mean", c))
        };
        Ok(match id {
            "image_size" => stats::image_size(img),
            "aspect_ratio" => stats::aspect_ratio(img),
            "rms_contrast" => stats::rms_contrast(img)?,
            "lightness_entropy" => stats::lightness_entropy(img)?,
            "color_entropy" => stats::color_entropy(img, p.achromatic)?,
            "slope_amplitude" => cached(&self.amplitude, || fourier::slope_amplitude(img, &p.fourier))?.slope,
            "slope_power" => cached(&self.power, || fourier::slope_power(img, &p.fourier))?.slope,
            "sigma_power" => cached(&self.power, || fourier::slope_power(img, &p.fourier))?.sigma,
            "slope_quartile" => cached(&self.quartile, || fourier::slope_quartile(img, &p.fourier))?.slope,
            "fractal_dim_2d" => fractal::fractal_dim_2d(img)?,
            "fractal_dim_3d" => fractal::fractal_dim_3d(img)?,
            "phog_complexity" => crate::numeric::mean(&self.gradient()?.magnitude),
            "phog_anisotropy" => phog::anisotropy_from_pyramid(self.pyramid()?, p.phog.anisotropy),
            "phog_self_similarity" => phog::self_similarity_from_pyramid(self.pyramid()?, &p.phog.level_weights)?,
            "edge_density" => edges::edge_density(self.edges()?),
            "edge_density_sum" => edges::edge_density_sum(self.edges()?),
            "eoe_first_order" => edges::eoe_first_order(self.edges()?),
            "eoe_second_order" => edges::eoe_second_order(&self.edges()?.strongest_edges, &p.pairs)?,
            "mirror_symmetry" => balance::mirror_symmetry(img)?,
            "balance_score" => cached(&self.balance, || {
                Ok(balance::balance_comparisons(&balance::mass_plane(img)?))
            })?
            .score(),
            "dcm" => balance::dcm(img)?,
            "homogeneity" => balance::homogeneity(img)?,
            "cnn_symmetry_lr" => self.symmetry()?.left_right,
            "cnn_symmetry_ud" => self.symmetry()?.up_down,
            "cnn_symmetry_combined" => self.symmetry()?.combined,
            "cnn_self_similarity" => cnn::self_similarity_from_responses(self.conv()?),
            "cnn_sparseness" => cnn::variances_from_responses(self.conv()?, p.cnn.grid)?.sparseness,
            "cnn_variability" => cnn::variances_from_responses(self.conv()?, p.cnn.grid)?.variability,
            other => match stat(other) {
                Some((model, mean, c)) => self.channel(model, mean, c)?,
                None => return Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
            },
        })
    }
}

/// Evaluates `ids` in order on one image.
pub fn compute_metrics(
    img: &RasterImage,
    ids: &[&str],
    params: &MetricParams,
    weights: Option<&Conv1Weights>,
) -> Vec<Result<f64>> {
    let a = Analyzer::new(img, params, weights);
    ids.iter().map(|id| a.compute(id)).collect()
}
