//! Objective image properties used in empirical aesthetics research.
//!
//! Every metric is a pure function of a decoded [`RasterImage`]; metrics that
//! need a fixed working resolution resize their own copy and never share it.

pub mod balance;
pub mod catalog;
pub mod cnn;
pub mod color;
pub mod edges;
pub mod error;
pub mod fft;
pub mod fourier;
pub mod fractal;
pub mod image;
pub mod numeric;
pub mod phog;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
pub use image::{ColorSpace, Plane, RasterImage, ResizeFilter, ResizeMode, ResizePolicy, Samples};
