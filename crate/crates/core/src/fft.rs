//! Row-column 2-D FFT over row-major complex buffers.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

/// A planned 2-D transform for a fixed `width` x `height` grid. Unnormalized in
/// both directions.
pub struct Fft2d {
    width: usize,
    height: usize,
    rows: Arc<dyn Fft<f64>>,
    cols: Arc<dyn Fft<f64>>,
}

impl Fft2d {
    pub fn new(width: usize, height: usize, direction: FftDirection) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            rows: planner.plan_fft(width, direction),
            cols: planner.plan_fft(height, direction),
        }
    }

    pub fn process(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.width * self.height);
        let scratch_len = self
            .rows
            .get_inplace_scratch_len()
            .max(self.cols.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];
        for row in data.chunks_exact_mut(self.width) {
            self.rows.process_with_scratch(row, &mut scratch);
        }
        let mut t = transpose(data, self.width, self.height);
        for col in t.chunks_exact_mut(self.height) {
            self.cols.process_with_scratch(col, &mut scratch);
        }
        let back = transpose(&t, self.height, self.width);
        data.copy_from_slice(&back);
    }
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    const B: usize = 32;
    for by in (0..height).step_by(B) {
        for bx in (0..width).step_by(B) {
            for y in by..(by + B).min(height) {
                for x in bx..(bx + B).min(width) {
                    out[x * height + y] = data[y * width + x];
                }
            }
        }
    }
    out
}

pub fn forward(real: &[f64], width: usize, height: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft2d::new(width, height, FftDirection::Forward).process(&mut buf);
    buf
}

/// Inverse transform including the 1/(width*height) normalization.
pub fn inverse(spectrum: &mut [Complex64], width: usize, height: usize) {
    Fft2d::new(width, height, FftDirection::Inverse).process(spectrum);
    let norm = 1.0 / (width * height) as f64;
    for v in spectrum.iter_mut() {
        *v *= norm;
    }
}

/// Signed integer frequency of FFT index `k` on an axis of length `n`.
#[inline]
pub fn signed_freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}
