//! First-layer (conv1) filter responses and the measures built on them:
//! Symmetry, Self-similarity, Sparseness and Variability.
//!
//! Weights are read from a small binary file:
//!
//! ```text
//! "ATB1" | u32 filters | u32 in_channels | u32 kernel_h | u32 kernel_w
//!        | 3 x f32 channel means | weights [filter][channel][row][col] as f32
//!        | filters x f32 biases | u32 CRC32
//! ```
//!
//! Integers and floats are little-endian; the CRC covers every byte between
//! the magic and the CRC field.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{self, ColorSpace, RasterImage, ResizeFilter};
use crate::numeric::{intersection, mean, median, normalized, split_even, variance};

pub const FILTERS: usize = 96;
pub const IN_CHANNELS: usize = 3;
pub const KERNEL: usize = 11;
pub const TAPS: usize = IN_CHANNELS * KERNEL * KERNEL;
pub const MAGIC: &[u8; 4] = b"ATB1";

const HEADER_LEN: usize = 4 + 4 * 4;
const FILE_LEN: usize = HEADER_LEN + 4 * IN_CHANNELS + 4 * FILTERS * TAPS + 4 * FILTERS + 4;

static BUNDLED: &[u8] = include_bytes!("../assets/conv1_bank.atb");

#[derive(Clone, Debug, PartialEq)]
pub struct Conv1Weights {
    pub means: [f32; IN_CHANNELS],
    /// `FILTERS * TAPS` values in `[filter][channel][row][col]` order.
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

impl Conv1Weights {
    pub fn from_parts(means: [f32; IN_CHANNELS], weights: Vec<f32>, bias: Vec<f32>) -> Result<Self> {
        if weights.len() != FILTERS * TAPS || bias.len() != FILTERS {
            return Err(Error::DimMismatch(format!(
                "expected {} weights and {FILTERS} biases, got {} and {}",
                FILTERS * TAPS,
                weights.len(),
                bias.len()
            )));
        }
        if means.iter().chain(&weights).chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite weight".into()));
        }
        Ok(Self { means, weights, bias })
    }

    pub fn kernel(&self, k: usize) -> &[f32] {
        &self.weights[k * TAPS..(k + 1) * TAPS]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FILE_LEN);
        out.extend_from_slice(MAGIC);
        for v in [FILTERS, IN_CHANNELS, KERNEL, KERNEL] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        for v in self.means.iter().chain(&self.weights).chain(&self.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let crc = crc32fast::hash(&out[4..]);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::DimMismatch("truncated header".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        let dims = [u32_at(4), u32_at(8), u32_at(12), u32_at(16)];
        let expected = [FILTERS as u32, IN_CHANNELS as u32, KERNEL as u32, KERNEL as u32];
        if dims != expected {
            return Err(Error::DimMismatch(format!(
                "header declares filters x channels x kernel = {dims:?}, expected {expected:?}"
            )));
        }
        if bytes.len() != FILE_LEN {
            return Err(Error::DimMismatch(format!(
                "file is {} bytes, expected {FILE_LEN}",
                bytes.len()
            )));
        }
        let stored = u32_at(FILE_LEN - 4);
        let computed = crc32fast::hash(&bytes[4..FILE_LEN - 4]);
        if stored != computed {
            return Err(Error::ChecksumFail { stored, computed });
        }
        let floats: Vec<f32> = bytes[HEADER_LEN..FILE_LEN - 4]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let means = [floats[0], floats[1], floats[2]];
        let weights = floats[IN_CHANNELS..IN_CHANNELS + FILTERS * TAPS].to_vec();
        let bias = floats[IN_CHANNELS + FILTERS * TAPS..].to_vec();
        Self::from_parts(means, weights, bias)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// The weight bank shipped with the library (see [`synthetic_bank`]).
    pub fn bundled() -> Self {
        Self::from_bytes(BUNDLED).expect("bundled weight file is valid")
    }
}

/// Deterministic stand-in for a trained first layer: 48 luminance Gabor
/// filters (8 orientations x 3 wavelengths x even/odd phase) and 48
/// color-opponent filters (red-green and blue-yellow Gabors and blobs).
pub fn synthetic_bank() -> Conv1Weights {
    let r = (KERNEL / 2) as f64;
    let gabor = |theta: f64, lambda: f64, sigma: f64, odd: bool| -> Vec<f64> {
        let (s, c) = theta.sin_cos();
        let mut g = Vec::with_capacity(KERNEL * KERNEL);
        for y in 0..KERNEL {
            for x in 0..KERNEL {
                let (dx, dy) = (x as f64 - r, y as f64 - r);
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                let env = (-(u * u + 0.64 * v * v) / (2.0 * sigma * sigma)).exp();
                let phase = 2.0 * std::f64::consts::PI * u / lambda;
                g.push(env * if odd { phase.sin() } else { phase.cos() });
            }
        }
        let dc = mean(&g);
        g.iter_mut().for_each(|v| *v -= dc);
        g
    };
    let blob = |sigma: f64| -> Vec<f64> {
        (0..KERNEL * KERNEL)
            .map(|i| {
                let (dx, dy) = ((i % KERNEL) as f64 - r, (i / KERNEL) as f64 - r);
                (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
            })
            .collect()
    };
    let mut weights = Vec::with_capacity(FILTERS * TAPS);
    let mut bias = Vec::with_capacity(FILTERS);
    for k in 0..FILTERS {
        let theta = (k % 8) as f64 * std::f64::consts::PI / 8.0;
        let (spatial, mix): (Vec<f64>, [f64; 3]) = if k < 48 {
            let lambda = [4.0, 6.0, 9.0][(k / 8) % 3];
            (gabor(theta, lambda, (0.5 * lambda).min(2.5), k >= 24), [1.0; 3])
        } else {
            let j = k - 48;
            let mix = if j < 24 { [1.0, -1.0, 0.0] } else { [-0.5, -0.5, 1.0] };
            let m = j % 24;
            let spatial = if m < 16 {
                gabor(theta, 8.0, 2.5, m >= 8)
            } else {
                blob(1.0 + 0.25 * (m - 16) as f64)
            };
            (spatial, mix)
        };
        let mut taps: Vec<f64> = mix
            .iter()
            .flat_map(|&c| spatial.iter().map(move |&s| c * s))
            .collect();
        let norm = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
        // unit-norm filters scaled so 8-bit contrast gives responses of order 1
        taps.iter_mut().for_each(|v| *v /= norm * 64.0);
        weights.extend(taps.iter().map(|&v| v as f32));
        bias.push((0.02 + 0.008 * ((k * 37) % 11) as f64) as f32);
    }
    Conv1Weights::from_parts([123.68, 116.78, 103.94], weights, bias).expect("consistent bank")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnnParams {
    /// Side of the square network input.
    pub input_side: u32,
    pub stride: usize,
    /// Half-wave rectify the responses (off gives raw filter outputs).
    pub rectify: bool,
    pub filter: ResizeFilter,
    /// Grid side for the variance measures.
    pub grid: usize,
}

impl Default for CnnParams {
    fn default() -> Self {
        Self {
            input_side: 512,
            stride: 4,
            rectify: true,
            filter: ResizeFilter::Bilinear,
            grid: 8,
        }
    }
}

/// One response map per filter, row-major, all `width` x `height`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conv1Responses {
    pub width: usize,
    pub height: usize,
    pub maps: Vec<Vec<f64>>,
}

impl Conv1Responses {
    /// Max over each cell of an `n` x `n` grid: `[filter][cy * n + cx]`.
    pub fn pooled(&self, n: usize) -> Vec<Vec<f64>> {
        let cols = split_even(self.width, n);
        let rows = split_even(self.height, n);
        self.maps
            .iter()
            .map(|map| {
                let mut cells = Vec::with_capacity(n * n);
                for ry in &rows {
                    for rx in &cols {
                        let mut m = f64::NEG_INFINITY;
                        for y in ry.clone() {
                            for &v in &map[y * self.width + rx.start..y * self.width + rx.end] {
                                m = m.max(v);
                            }
                        }
                        cells.push(m);
                    }
                }
                cells
            })
            .collect()
    }

    /// Per-filter maximum over the whole map.
    pub fn global_max(&self) -> Vec<f64> {
        self.maps
            .iter()
            .map(|m| m.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * i + l] * b[4 * i + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Valid-mode strided convolution (as correlation, like the trained layers)
/// of an RGB8 image after mean subtraction, plus bias, without resizing.
pub fn apply_conv1(img: &RasterImage, weights: &Conv1Weights, stride: usize, rectify: bool) -> Result<Conv1Responses> {
    img.expect_space(ColorSpace::Rgb8)?;
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be positive".into()));
    }
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w < KERNEL || h < KERNEL {
        return Err(Error::TooSmall {
            width: img.width(),
            height: img.height(),
            min: KERNEL as u32,
        });
    }
    let bytes = img.bytes().expect("rgb8 stores bytes");
    // planar, mean-subtracted input
    let mut planes = vec![0.0f64; IN_CHANNELS * w * h];
    for (i, px) in bytes.chunks_exact(3).enumerate() {
        for c in 0..IN_CHANNELS {
            planes[c * w * h + i] = px[c] as f64 - weights.means[c] as f64;
        }
    }
    let kernels: Vec<f64> = weights.weights.iter().map(|&v| v as f64).collect();
    let (ow, oh) = ((w - KERNEL) / stride + 1, (h - KERNEL) / stride + 1);
    let mut maps = vec![vec![0.0; ow * oh]; FILTERS];
    let mut patch = vec![0.0f64; TAPS];
    for oy in 0..oh {
        for ox in 0..ow {
            let (x0, y0) = (ox * stride, oy * stride);
            for c in 0..IN_CHANNELS {
                for ky in 0..KERNEL {
                    let src = c * w * h + (y0 + ky) * w + x0;
                    let dst = (c * KERNEL + ky) * KERNEL;
                    patch[dst..dst + KERNEL].copy_from_slice(&planes[src..src + KERNEL]);
                }
            }
            for (k, map) in maps.iter_mut().enumerate() {
                let v = dot(&patch, &kernels[k * TAPS..(k + 1) * TAPS]) + weights.bias[k] as f64;
                map[oy * ow + ox] = if rectify { v.max(0.0) } else { v };
            }
        }
    }
    Ok(Conv1Responses {
        width: ow,
        height: oh,
        maps,
    })
}

fn network_input(img: &RasterImage, params: &CnnParams) -> Result<RasterImage> {
    img.expect_space(ColorSpace::Rgb8)?;
    Ok(image::resize_exact(img, params.input_side, params.input_side, params.filter))
}

/// Resize to the network input, then [`apply_conv1`].
pub fn conv1_forward(img: &RasterImage, weights: &Conv1Weights, params: &CnnParams) -> Result<Conv1Responses> {
    apply_conv1(&network_input(img, params)?, weights, params.stride, params.rectify)
}

/// Guards the ratio when both responses are 0; such positions count as
/// fully symmetric.
pub const SYMMETRY_EPS: f64 = 1e-6;

/// Mean over filters and positions of `1 - |R - S| / max(|R|, |S|, eps)`,
/// clamped to [0, 1].
pub fn response_agreement(a: &Conv1Responses, b: &Conv1Responses) -> f64 {
    assert_eq!((a.width, a.height, a.maps.len()), (b.width, b.height, b.maps.len()));
    let mut total = 0.0;
    let mut n = 0usize;
    for (ma, mb) in a.maps.iter().zip(&b.maps) {
        for (&r, &s) in ma.iter().zip(mb) {
            let denom = r.abs().max(s.abs()).max(SYMMETRY_EPS);
            total += (1.0 - (r - s).abs() / denom).max(0.0);
            n += 1;
        }
    }
    total / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnnSymmetry {
    pub left_right: f64,
    pub up_down: f64,
    /// Mean of the two reflections.
    pub combined: f64,
}

/// Compares the responses of the image with those of its reflection at the
/// same positions: a mirror-symmetric image yields identical fields.
pub fn cnn_symmetry(img: &RasterImage, weights: &Conv1Weights, params: &CnnParams) -> Result<CnnSymmetry> {
    let input = network_input(img, params)?;
    let base = apply_conv1(&input, weights, params.stride, params.rectify)?;
    cnn_symmetry_with_base(&input, &base, weights, params)
}

/// As [`cnn_symmetry`] when the responses of the resized input are at hand.
pub fn cnn_symmetry_with_base(
    input: &RasterImage,
    base: &Conv1Responses,
    weights: &Conv1Weights,
    params: &CnnParams,
) -> Result<CnnSymmetry> {
    let lr = apply_conv1(&input.flip_horizontal(), weights, params.stride, params.rectify)?;
    let ud = apply_conv1(&input.flip_vertical(), weights, params.stride, params.rectify)?;
    let left_right = response_agreement(base, &lr);
    let up_down = response_agreement(base, &ud);
    Ok(CnnSymmetry {
        left_right,
        up_down,
        combined: (left_right + up_down) / 2.0,
    })
}

pub const SELF_SIMILARITY_GRID: usize = 8;

/// Median histogram intersection between each 8x8 cell's per-filter maxima
/// and the whole-image maxima, both normalized. NaN without any response.
pub fn self_similarity_from_responses(resp: &Conv1Responses) -> f64 {
    let ground: Vec<f64> = resp.global_max().iter().map(|v| v.max(0.0)).collect();
    let Some(ground) = normalized(&ground) else {
        return f64::NAN;
    };
    let pooled = resp.pooled(SELF_SIMILARITY_GRID);
    let scores: Vec<f64> = (0..SELF_SIMILARITY_GRID * SELF_SIMILARITY_GRID)
        .map(|cell| {
            let h: Vec<f64> = pooled.iter().map(|f| f[cell].max(0.0)).collect();
            normalized(&h).map_or(0.0, |h| intersection(&h, &ground))
        })
        .collect();
    median(&scores)
}

pub fn cnn_self_similarity(img: &RasterImage, weights: &Conv1Weights, params: &CnnParams) -> Result<f64> {
    Ok(self_similarity_from_responses(&conv1_forward(img, weights, params)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnnVariances {
    /// Variance over all filter x cell entries.
    pub sparseness: f64,
    /// Median over filters of the per-filter variance across cells.
    pub variability: f64,
}

pub fn validate_grid(n: usize) -> Result<()> {
    if !(2..=30).contains(&n) {
        return Err(Error::InvalidParameter(format!("grid size {n} outside 2..=30")));
    }
    Ok(())
}

pub fn variances_from_responses(resp: &Conv1Responses, n: usize) -> Result<CnnVariances> {
    validate_grid(n)?;
    let pooled = resp.pooled(n);
    let all: Vec<f64> = pooled.concat();
    let per: Vec<f64> = pooled.iter().map(|f| variance(f)).collect();
    Ok(CnnVariances {
        sparseness: variance(&all),
        variability: median(&per),
    })
}

pub fn cnn_variances(img: &RasterImage, weights: &Conv1Weights, params: &CnnParams) -> Result<CnnVariances> {
    validate_grid(params.grid)?;
    variances_from_responses(&conv1_forward(img, weights, params)?, params.grid)
}
