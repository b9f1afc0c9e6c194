//! Seeded synthetic test images: random-phase `1/f^α` noise and white noise.
//!
//! Used as fixtures by the test suites and the CLI benchmarks; not part of the
//! metric API.

use crate::fft;
use crate::image::{Plane, RasterImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real-valued random-phase field with amplitude spectrum `|F|(r) = r^-α`
/// (DC removed). Phases come from the spectrum of Gaussian white noise, which
/// makes them uniform and Hermitian-symmetric, so the inverse transform is real.
pub fn random_phase_plane(side: usize, alpha: f64, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..side * side).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut spec = fft::forward(&noise, side, side);
    for v in 0..side {
        let fy = fft::signed_freq(v, side) as f64;
        for u in 0..side {
            let fx = fft::signed_freq(u, side) as f64;
            let r = (fx * fx + fy * fy).sqrt();
            let c = &mut spec[v * side + u];
            let norm = c.norm();
            *c = if r == 0.0 || norm == 0.0 {
                Default::default()
            } else {
                *c / norm * r.powf(-alpha)
            };
        }
    }
    fft::inverse(&mut spec, side, side);
    Plane::new(side, side, spec.iter().map(|c| c.re).collect())
}

/// Linearly maps a plane onto [0, 255].
pub fn rescale_to_u8(plane: &Plane) -> Vec<u8> {
    let (lo, hi) = plane
        .data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    plane
        .data
        .iter()
        .map(|&v| ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Gray RGB8 random-phase image rescaled to [0, 255].
pub fn random_phase_image(side: usize, alpha: f64, seed: u64) -> RasterImage {
    let g = rescale_to_u8(&random_phase_plane(side, alpha, seed));
    gray_rgb8(side, side, &g)
}

/// Uniform 8-bit white noise, gray.
pub fn white_noise_image(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<u8> = (0..width * height).map(|_| rng.random()).collect();
    gray_rgb8(width, height, &g)
}

/// Uniform random RGB8 image, every channel independent.
pub fn random_rgb_image(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<u8> = (0..width * height * 3).map(|_| rng.random()).collect();
    RasterImage::rgb8(width as u32, height as u32, data).expect("valid dimensions")
}

pub fn gray_rgb8(width: usize, height: usize, gray: &[u8]) -> RasterImage {
    let data = gray.iter().flat_map(|&v| [v, v, v]).collect();
    RasterImage::rgb8(width as u32, height as u32, data).expect("valid dimensions")
}
