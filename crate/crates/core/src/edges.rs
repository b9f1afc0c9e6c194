//! Oriented Gabor filtering, Edge density and first/second-order
//! edge-orientation entropy.
//!
//! The bank holds 24 odd-phase kernels at 15° steps. Kernel `k` responds
//! positively to intensity increasing along the direction `k * 15°` (x right,
//! y down), and responses are half-wave rectified, so an edge and its
//! contrast-reversed twin land 180° apart instead of in the same bin.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::Fft2d;
use crate::image::{self, ColorSpace, Plane, RasterImage, ResizeMode, ResizePolicy};
use crate::numeric::entropy_bits;

pub const ORIENTATIONS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaborParams {
    /// Carrier wavelength in pixels.
    pub wavelength: f64,
    /// Envelope standard deviation across the edge, in pixels.
    pub sigma: f64,
    /// Envelope aspect ratio; along the edge the SD is `sigma / aspect`.
    pub aspect: f64,
    /// Kernel radius in multiples of `sigma`.
    pub extent: f64,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            wavelength: 8.0,
            sigma: 4.0,
            aspect: 0.5,
            extent: 4.0,
        }
    }
}

impl GaborParams {
    pub fn radius(&self) -> usize {
        (self.extent * self.sigma).ceil() as usize
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.wavelength, self.sigma, self.aspect, self.extent]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !ok {
            return Err(Error::InvalidParameter(format!("gabor parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Square kernels of side `2 * radius + 1`, row-major, applied by correlation.
#[derive(Clone, Debug, PartialEq)]
pub struct GaborBank {
    pub params: GaborParams,
    pub radius: usize,
    pub kernels: Vec<Vec<f64>>,
}

impl GaborBank {
    pub fn new(params: GaborParams) -> Result<Self> {
        params.validate()?;
        let r = params.radius() as isize;
        let side = (2 * r + 1) as usize;
        let kernels = (0..ORIENTATIONS)
            .map(|k| {
                let theta = orientation_angle(k);
                let (s, c) = theta.sin_cos();
                let mut g = Vec::with_capacity(side * side);
                for y in -r..=r {
                    for x in -r..=r {
                        let (x, y) = (x as f64, y as f64);
                        let along = x * c + y * s;
                        let across = -x * s + y * c;
                        let env = (-(along * along + params.aspect.powi(2) * across * across)
                            / (2.0 * params.sigma.powi(2)))
                        .exp();
                        g.push(env * (2.0 * PI * along / params.wavelength).sin());
                    }
                }
                let dc = g.iter().sum::<f64>() / g.len() as f64;
                g.iter_mut().for_each(|v| *v -= dc);
                // unit positive lobe: a step of height h yields at most h
                let pos: f64 = g.iter().filter(|v| **v > 0.0).sum();
                g.iter_mut().for_each(|v| *v /= pos);
                g
            })
            .collect();
        Ok(Self {
            params,
            radius: r as usize,
            kernels,
        })
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }
}

/// Angle in radians of bank orientation `k`.
pub fn orientation_angle(k: usize) -> f64 {
    k as f64 * 2.0 * PI / ORIENTATIONS as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub x: u32,
    pub y: u32,
    pub orientation: u8,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeField {
    pub width: usize,
    pub height: usize,
    /// `responses[k][y * width + x]`, rectified.
    pub responses: Vec<Vec<f64>>,
    /// Winning orientation per pixel (lowest index on ties).
    pub winner: Vec<u8>,
    /// Strongest edges by winning response, descending; ties by pixel index.
    pub strongest_edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeParams {
    pub gabor: GaborParams,
    pub resize: ResizePolicy,
    pub max_edges: usize,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self {
            gabor: GaborParams::default(),
            resize: ResizePolicy::new(ResizeMode::MaxPixels(120_000)),
            max_edges: 10_000,
        }
    }
}

/// Smallest integer >= n with no prime factor above 5.
fn smooth_size(n: usize) -> usize {
    (n.max(1)..)
        .find(|&m| {
            let mut v = m;
            for p in [2, 3, 5] {
                while v % p == 0 {
                    v /= p;
                }
            }
            v == 1
        })
        .expect("unbounded search")
}

/// Symmetric (edge-repeating) reflection of index `i` into `0..n`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Correlates a plane with every kernel of the bank using reflect padding.
/// Returns unrectified responses, one buffer per kernel.
pub fn correlate_bank(plane: &Plane, bank: &GaborBank) -> Vec<Vec<f64>> {
    let (w, h) = (plane.width, plane.height);
    let r = bank.radius;
    let (pw, ph) = (smooth_size(w + 2 * r), smooth_size(h + 2 * r));
    let mut padded = vec![Complex64::default(); pw * ph];
    for y in 0..h + 2 * r {
        let sy = reflect(y as isize - r as isize, h);
        for x in 0..w + 2 * r {
            let sx = reflect(x as isize - r as isize, w);
            padded[y * pw + x].re = plane.data[sy * w + sx];
        }
    }
    let fwd = Fft2d::new(pw, ph, FftDirection::Forward);
    let inv = Fft2d::new(pw, ph, FftDirection::Inverse);
    fwd.process(&mut padded);
    let image_spec = padded;
    let norm = 1.0 / (pw * ph) as f64;
    let side = bank.side() as isize;
    let ri = r as isize;

    // two real kernels share one complex transform: real part, imaginary part
    let mut out = vec![Vec::new(); ORIENTATIONS];
    for pair in 0..ORIENTATIONS / 2 {
        let (ka, kb) = (&bank.kernels[2 * pair], &bank.kernels[2 * pair + 1]);
        let mut k = vec![Complex64::default(); pw * ph];
        // correlation = convolution with the kernel mirrored through the origin
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                let src = ((dy + ri) * side + dx + ri) as usize;
                let tx = (-dx).rem_euclid(pw as isize) as usize;
                let ty = (-dy).rem_euclid(ph as isize) as usize;
                k[ty * pw + tx] = Complex64::new(ka[src], kb[src]);
            }
        }
        fwd.process(&mut k);
        for (a, b) in k.iter_mut().zip(&image_spec) {
            *a *= b;
        }
        inv.process(&mut k);
        let mut ra = Vec::with_capacity(w * h);
        let mut rb = Vec::with_capacity(w * h);
        for y in 0..h {
            let row = &k[(y + r) * pw + r..(y + r) * pw + r + w];
            ra.extend(row.iter().map(|c| c.re * norm));
            rb.extend(row.iter().map(|c| c.im * norm));
        }
        out[2 * pair] = ra;
        out[2 * pair + 1] = rb;
    }
    out
}

/// Gray -> resize -> bank correlation -> half-wave rectification, plus the
/// per-pixel winning orientation and the strongest edges.
pub fn gabor_responses(img: &RasterImage, params: &EdgeParams) -> Result<EdgeField> {
    params.resize.validate()?;
    let bank = GaborBank::new(params.gabor)?;
    let gray = match img.space() {
        ColorSpace::Rgb8 => image::to_grayscale(img)?,
        ColorSpace::Gray8 | ColorSpace::GrayF => img.clone(),
        found => {
            return Err(Error::WrongColorSpace {
                expected: ColorSpace::Rgb8,
                found,
            })
        }
    };
    let plane = image::resize(&gray, params.resize).channel(0);
    Ok(field_from_plane(&plane, &bank, params.max_edges))
}

pub fn field_from_plane(plane: &Plane, bank: &GaborBank, max_edges: usize) -> EdgeField {
    let mut responses = correlate_bank(plane, bank);
    for resp in &mut responses {
        // tiny negative round-off on flat regions must not count as signal
        let tol = 1e-9;
        resp.iter_mut().for_each(|v| *v = if *v > tol { *v } else { 0.0 });
    }
    let n = plane.width * plane.height;
    let mut winner = vec![0u8; n];
    let mut best = vec![0.0f64; n];
    for (k, resp) in responses.iter().enumerate() {
        for i in 0..n {
            if resp[i] > best[i] {
                best[i] = resp[i];
                winner[i] = k as u8;
            }
        }
    }
    let strongest_edges = select_strongest(plane.width, &best, &winner, max_edges);
    EdgeField {
        width: plane.width,
        height: plane.height,
        responses,
        winner,
        strongest_edges,
    }
}

fn select_strongest(width: usize, best: &[f64], winner: &[u8], limit: usize) -> Vec<Edge> {
    let mut idx: Vec<usize> = (0..best.len()).filter(|&i| best[i] > 0.0).collect();
    let order = |a: &usize, b: &usize| best[*b].total_cmp(&best[*a]).then(a.cmp(b));
    if idx.len() > limit && limit > 0 {
        idx.select_nth_unstable_by(limit - 1, order);
    }
    idx.truncate(limit);
    idx.sort_unstable_by(order);
    idx.into_iter()
        .map(|i| Edge {
            x: (i % width) as u32,
            y: (i / width) as u32,
            orientation: winner[i],
            strength: best[i],
        })
        .collect()
}

impl EdgeField {
    /// Sum of all rectified responses over pixels and orientations.
    pub fn total_response(&self) -> f64 {
        self.responses.iter().map(|r| r.iter().sum::<f64>()).sum()
    }

    /// Response mass per orientation.
    pub fn orientation_histogram(&self) -> [f64; ORIENTATIONS] {
        let mut h = [0.0; ORIENTATIONS];
        for (slot, r) in h.iter_mut().zip(&self.responses) {
            *slot = r.iter().sum();
        }
        h
    }
}

/// Summed response per pixel of the (resized) image.
pub fn edge_density(field: &EdgeField) -> f64 {
    let n = field.width * field.height;
    if n == 0 {
        return f64::NAN;
    }
    field.total_response() / n as f64
}

pub fn edge_density_sum(field: &EdgeField) -> f64 {
    field.total_response()
}

/// Entropy of the image-wide orientation histogram; NaN for a zero field.
pub fn eoe_first_order(field: &EdgeField) -> f64 {
    entropy_of_histogram(&field.orientation_histogram())
}

pub fn entropy_of_histogram(hist: &[f64]) -> f64 {
    if hist.iter().sum::<f64>() <= 0.0 {
        return f64::NAN;
    }
    entropy_bits(hist)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DifferenceClasses {
    /// Unordered pairs, difference folded to `min(d, 24 - d)`: 13 classes of
    /// 0°, 15°, ... 180°.
    #[default]
    Folded,
    /// Ordered pairs, directed difference `(o_i - o_j) mod 24`: 24 classes.
    Directed,
}

impl DifferenceClasses {
    pub fn count(self) -> usize {
        match self {
            Self::Folded => ORIENTATIONS / 2 + 1,
            Self::Directed => ORIENTATIONS,
        }
    }

    #[inline]
    pub fn class(self, a: u8, b: u8) -> usize {
        let d = (a as usize + ORIENTATIONS - b as usize) % ORIENTATIONS;
        match self {
            Self::Folded => d.min(ORIENTATIONS - d),
            Self::Directed => d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PairWeighting {
    #[default]
    StrengthProduct,
    Unweighted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairParams {
    pub classes: DifferenceClasses,
    pub weighting: PairWeighting,
    /// Pairs closer than this (Euclidean, pixels) are excluded.
    pub min_distance: f64,
    /// Worker threads for the pair kernel; `None` uses the ambient pool.
    pub workers: Option<usize>,
}

impl Default for PairParams {
    fn default() -> Self {
        Self {
            classes: DifferenceClasses::Folded,
            weighting: PairWeighting::StrengthProduct,
            min_distance: 20.0,
            workers: None,
        }
    }
}

/// Strengths are quantized to integers relative to the strongest edge so all
/// pair sums are exact and independent of summation order.
pub const WEIGHT_BITS: u32 = 24;

/// Integer pair weight of each edge.
pub fn quantized_weights(edges: &[Edge], weighting: PairWeighting) -> Vec<u64> {
    match weighting {
        PairWeighting::Unweighted => vec![1; edges.len()],
        PairWeighting::StrengthProduct => {
            let max = edges.iter().map(|e| e.strength).fold(0.0, f64::max);
            if max <= 0.0 {
                return vec![0; edges.len()];
            }
            let scale = (1u64 << WEIGHT_BITS) as f64 / max;
            edges.iter().map(|e| (e.strength * scale).round() as u64).collect()
        }
    }
}

/// Exclusion test on squared integer distance.
#[inline]
pub fn too_close(a: &Edge, b: &Edge, min_distance: f64) -> bool {
    let dx = a.x as i64 - b.x as i64;
    let dy = a.y as i64 - b.y as i64;
    ((dx * dx + dy * dy) as f64) < min_distance * min_distance
}

/// Exact pair-weight histogram over orientation-difference classes.
///
/// All ordered pairs are first counted from per-orientation weight totals,
/// then self pairs and pairs under `min_distance` are subtracted; the close
/// pairs are found on a grid of `min_distance`-sized cells, so only the same
/// and adjacent cells are searched. Integer accumulation makes the result
/// identical for every worker count and cell order.
pub fn pair_histogram(edges: &[Edge], params: &PairParams) -> Result<Vec<u128>> {
    if !(params.min_distance.is_finite() && params.min_distance >= 0.0) {
        return Err(Error::InvalidParameter(format!("min_distance {}", params.min_distance)));
    }
    if edges.iter().any(|e| e.orientation as usize >= ORIENTATIONS) {
        return Err(Error::InvalidParameter("edge orientation out of range".into()));
    }
    let classes = params.classes;
    let q = quantized_weights(edges, params.weighting);
    let mut totals = [0u128; ORIENTATIONS];
    for (e, &w) in edges.iter().zip(&q) {
        totals[e.orientation as usize] += w as u128;
    }
    let mut ordered = vec![0u128; classes.count()];
    for a in 0..ORIENTATIONS {
        for b in 0..ORIENTATIONS {
            ordered[classes.class(a as u8, b as u8)] += totals[a] * totals[b];
        }
    }
    for &w in &q {
        ordered[0] -= (w as u128) * (w as u128);
    }
    let close = match params.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
            pool.install(|| close_pair_histogram(edges, &q, params))
        }
        None => close_pair_histogram(edges, &q, params),
    };
    for (o, c) in ordered.iter_mut().zip(&close) {
        *o -= c;
    }
    if classes == DifferenceClasses::Folded {
        // every unordered pair was counted once in each direction
        ordered.iter_mut().for_each(|v| *v /= 2);
    }
    Ok(ordered)
}

/// Ordered close pairs (i != j) as a class histogram.
fn close_pair_histogram(edges: &[Edge], q: &[u64], params: &PairParams) -> Vec<u128> {
    let classes = params.classes;
    let mut hist = vec![0u128; classes.count()];
    if edges.is_empty() || params.min_distance == 0.0 {
        return hist;
    }
    let cell = params.min_distance.ceil().max(1.0) as u32;
    let cols = edges.iter().map(|e| e.x / cell).max().unwrap_or(0) as usize + 1;
    let rows = edges.iter().map(|e| e.y / cell).max().unwrap_or(0) as usize + 1;
    // bucket edge indices by cell
    let mut starts = vec![0usize; cols * rows + 1];
    let cell_of = |e: &Edge| (e.y / cell) as usize * cols + (e.x / cell) as usize;
    for e in edges {
        starts[cell_of(e) + 1] += 1;
    }
    for i in 1..starts.len() {
        starts[i] += starts[i - 1];
    }
    let mut fill = starts.clone();
    let mut members = vec![0usize; edges.len()];
    for (i, e) in edges.iter().enumerate() {
        let c = cell_of(e);
        members[fill[c]] = i;
        fill[c] += 1;
    }
    let cell_hist = |c: usize| {
        let mut h = vec![0u128; classes.count()];
        let (cx, cy) = (c % cols, c / cols);
        for &i in &members[starts[c]..starts[c + 1]] {
            let a = &edges[i];
            for ny in cy.saturating_sub(1)..=(cy + 1).min(rows - 1) {
                for nx in cx.saturating_sub(1)..=(cx + 1).min(cols - 1) {
                    let n = ny * cols + nx;
                    for &j in &members[starts[n]..starts[n + 1]] {
                        if j != i && too_close(a, &edges[j], params.min_distance) {
                            h[classes.class(a.orientation, edges[j].orientation)] +=
                                q[i] as u128 * q[j] as u128;
                        }
                    }
                }
            }
        }
        h
    };
    let partials: Vec<Vec<u128>> = (0..cols * rows)
        .into_par_iter()
        .filter(|&c| starts[c] < starts[c + 1])
        .map(cell_hist)
        .collect();
    for p in partials {
        for (a, b) in hist.iter_mut().zip(p) {
            *a += b;
        }
    }
    hist
}

/// Entropy in bits of an integer histogram; NaN when it is empty.
pub fn entropy_of_counts(hist: &[u128]) -> f64 {
    let total: u128 = hist.iter().sum();
    if total == 0 {
        return f64::NAN;
    }
    let h: f64 = hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Entropy of orientation differences between strong, distant edge pairs.
/// NaN when no pair carries weight.
pub fn eoe_second_order(edges: &[Edge], params: &PairParams) -> Result<f64> {
    Ok(entropy_of_counts(&pair_histogram(edges, params)?))
}
