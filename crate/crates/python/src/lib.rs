//! Python module `aesthetics`: decoded images, conv1 weight banks, the
//! metric catalog and a few typed entry points for the heavier measures.

use aesthetics_core::catalog::{self, MetricParams};
use aesthetics_core::cnn::{self, CnnParams, Conv1Weights};
use aesthetics_core::edges::{self, EdgeParams, PairParams};
use aesthetics_core::fourier::{self, FourierParams, SlopeFit};
use aesthetics_core::image as img;
use aesthetics_core::phog::{self, PhogParams};
use aesthetics_core::{balance, fractal, synthetic, Error, RasterImage};
use pyo3::exceptions::{PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// An 8-bit RGB image.
#[pyclass(name = "Image", module = "aesthetics", frozen)]
pub struct Image {
    inner: RasterImage,
}

#[pymethods]
impl Image {
    /// Decodes a PNG or JPEG file.
    #[staticmethod]
    fn open(path: std::path::PathBuf) -> PyResult<Self> {
        img::decode_file(path).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Decodes PNG or JPEG bytes.
    #[staticmethod]
    fn decode(data: &[u8]) -> PyResult<Self> {
        img::decode_image(data).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Wraps interleaved RGB bytes, row-major.
    #[staticmethod]
    fn from_rgb(width: u32, height: u32, data: Vec<u8>) -> PyResult<Self> {
        RasterImage::rgb8(width, height, data).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Gray random-phase test image with a `1/f^alpha` amplitude spectrum.
    #[staticmethod]
    fn random_phase(side: usize, alpha: f64, seed: u64) -> PyResult<Self> {
        if side < 2 {
            return Err(PyValueError::new_err("side must be at least 2"));
        }
        Ok(Self {
            inner: synthetic::random_phase_image(side, alpha, seed),
        })
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    /// Interleaved RGB bytes.
    fn rgb_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.inner.bytes().unwrap_or_default())
    }

    fn flip_horizontal(&self) -> Self {
        Self {
            inner: self.inner.flip_horizontal(),
        }
    }

    fn flip_vertical(&self) -> Self {
        Self {
            inner: self.inner.flip_vertical(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Image({}x{})", self.inner.width(), self.inner.height())
    }
}

/// A 96-filter first-layer convolution bank.
#[pyclass(name = "Weights", module = "aesthetics", frozen)]
pub struct Weights {
    inner: Conv1Weights,
}

#[pymethods]
impl Weights {
    /// The synthetic bank shipped with the library.
    #[staticmethod]
    fn bundled() -> Self {
        Self {
            inner: Conv1Weights::bundled(),
        }
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Conv1Weights::load(path).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Conv1Weights::from_bytes(data).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Builds a bank from per-channel means, `96*3*11*11` weights in
    /// `[filter][channel][row][col]` order and 96 biases.
    #[staticmethod]
    fn from_parts(means: [f32; 3], weights: Vec<f32>, bias: Vec<f32>) -> PyResult<Self> {
        Conv1Weights::from_parts(means, weights, bias)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.save(path).map_err(to_py)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }

    #[getter]
    fn filters(&self) -> usize {
        self.inner.bias.len()
    }
}

/// `(id, group, description)` for every metric, in column order.
#[pyfunction]
fn list_metrics() -> Vec<(&'static str, String, &'static str)> {
    catalog::METRICS
        .iter()
        .map(|m| (m.id, format!("{:?}", m.group).to_lowercase(), m.description))
        .collect()
}

/// Metric ids computed when none are requested.
#[pyfunction]
fn default_metrics() -> Vec<&'static str> {
    catalog::default_ids()
}

/// Computes metrics by id with default parameters. Failed metrics come back
/// as NaN unless `strict` is set, in which case the first failure raises.
#[pyfunction]
#[pyo3(signature = (image, metrics=None, weights=None, strict=false))]
fn compute<'py>(
    py: Python<'py>,
    image: &Image,
    metrics: Option<Vec<String>>,
    weights: Option<PyRef<'py, Weights>>,
    strict: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let ids: Vec<&str> = match &metrics {
        Some(list) => list.iter().map(String::as_str).collect(),
        None => catalog::default_ids(),
    };
    if let Some(bad) = ids.iter().find(|id| catalog::find(id).is_none()) {
        return Err(PyKeyError::new_err(format!("unknown metric {bad:?}")));
    }
    let bank = weights.as_ref().map(|w| &w.inner);
    if bank.is_none() && catalog::needs_weights(&ids) {
        return Err(PyValueError::new_err("conv1 metrics need a Weights bank"));
    }
    let params = MetricParams::default();
    let results = py.detach(|| catalog::compute_metrics(&image.inner, &ids, &params, bank));
    let out = PyDict::new(py);
    for (id, r) in ids.iter().zip(results) {
        let v = match r {
            Ok(v) => v,
            Err(e) if strict => return Err(PyValueError::new_err(format!("{id}: {e}"))),
            Err(_) => f64::NAN,
        };
        out.set_item(*id, v)?;
    }
    Ok(out)
}

fn fit_dict<'py>(py: Python<'py>, fit: SlopeFit) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("slope", fit.slope)?;
    d.set_item("intercept", fit.intercept)?;
    d.set_item("sigma", fit.sigma)?;
    d.set_item("points_used", fit.points_used)?;
    Ok(d)
}

/// Fourier slope fit; `method` is "amplitude", "power" or "quartile".
#[pyfunction]
#[pyo3(signature = (image, method="amplitude", target_side=1024))]
fn fourier_slope<'py>(py: Python<'py>, image: &Image, method: &str, target_side: u32) -> PyResult<Bound<'py, PyDict>> {
    let params = FourierParams {
        target_side,
        ..Default::default()
    };
    let run = match method {
        "amplitude" => fourier::slope_amplitude,
        "power" => fourier::slope_power,
        "quartile" => fourier::slope_quartile,
        other => return Err(PyValueError::new_err(format!("unknown slope method {other:?}"))),
    };
    let fit = py.detach(|| run(&image.inner, &params)).map_err(to_py)?;
    fit_dict(py, fit)
}

/// Box-counting dimensions `(binary boundary, gray surface)`.
#[pyfunction]
fn fractal_dimensions(py: Python<'_>, image: &Image) -> PyResult<(f64, f64)> {
    py.detach(|| Ok((fractal::fractal_dim_2d(&image.inner)?, fractal::fractal_dim_3d(&image.inner)?)))
        .map_err(to_py)
}

/// Gradient complexity, anisotropy and self-similarity.
#[pyfunction]
#[pyo3(signature = (image, bins=16))]
fn phog_measures<'py>(py: Python<'py>, image: &Image, bins: usize) -> PyResult<Bound<'py, PyDict>> {
    let params = PhogParams {
        bins,
        ..Default::default()
    };
    let (c, a, s) = py
        .detach(|| -> aesthetics_core::Result<_> {
            Ok((
                phog::phog_complexity(&image.inner, &params)?,
                phog::phog_anisotropy(&image.inner, &params)?,
                phog::phog_self_similarity(&image.inner, &params)?,
            ))
        })
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("complexity", c)?;
    d.set_item("anisotropy", a)?;
    d.set_item("self_similarity", s)?;
    Ok(d)
}

/// Gabor edge density and first/second-order edge-orientation entropy.
#[pyfunction]
#[pyo3(signature = (image, min_distance=20.0, max_edges=10_000))]
fn edge_measures<'py>(
    py: Python<'py>,
    image: &Image,
    min_distance: f64,
    max_edges: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let params = EdgeParams {
        max_edges,
        ..Default::default()
    };
    let pairs = PairParams {
        min_distance,
        ..Default::default()
    };
    let (density, first, second) = py
        .detach(|| -> aesthetics_core::Result<_> {
            let field = edges::gabor_responses(&image.inner, &params)?;
            Ok((
                edges::edge_density(&field),
                edges::eoe_first_order(&field),
                edges::eoe_second_order(&field.strongest_edges, &pairs)?,
            ))
        })
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("edge_density", density)?;
    d.set_item("eoe_first_order", first)?;
    d.set_item("eoe_second_order", second)?;
    Ok(d)
}

/// Mirror symmetry, balance, deviation of the center of mass and homogeneity,
/// all in percent.
#[pyfunction]
fn balance_measures<'py>(py: Python<'py>, image: &Image) -> PyResult<Bound<'py, PyDict>> {
    let i = &image.inner;
    let d = PyDict::new(py);
    d.set_item("mirror_symmetry", balance::mirror_symmetry(i).map_err(to_py)?)?;
    d.set_item("balance_score", balance::balance_score(i).map_err(to_py)?)?;
    d.set_item("dcm", balance::dcm(i).map_err(to_py)?)?;
    d.set_item("homogeneity", balance::homogeneity(i).map_err(to_py)?)?;
    Ok(d)
}

/// Conv1 symmetry, self-similarity and response variances.
#[pyfunction]
#[pyo3(signature = (image, weights, grid=8))]
fn cnn_measures<'py>(py: Python<'py>, image: &Image, weights: &Weights, grid: usize) -> PyResult<Bound<'py, PyDict>> {
    let params = CnnParams {
        grid,
        ..Default::default()
    };
    let (sym, selfsim, var) = py
        .detach(|| -> aesthetics_core::Result<_> {
            let (i, w) = (&image.inner, &weights.inner);
            Ok((
                cnn::cnn_symmetry(i, w, &params)?,
                cnn::cnn_self_similarity(i, w, &params)?,
                cnn::cnn_variances(i, w, &params)?,
            ))
        })
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("symmetry_lr", sym.left_right)?;
    d.set_item("symmetry_ud", sym.up_down)?;
    d.set_item("symmetry_combined", sym.combined)?;
    d.set_item("self_similarity", selfsim)?;
    d.set_item("sparseness", var.sparseness)?;
    d.set_item("variability", var.variability)?;
    Ok(d)
}

#[pymodule]
fn aesthetics(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Image>()?;
    m.add_class::<Weights>()?;
    m.add_function(wrap_pyfunction!(list_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(default_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(compute, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_slope, m)?)?;
    m.add_function(wrap_pyfunction!(fractal_dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(phog_measures, m)?)?;
    m.add_function(wrap_pyfunction!(edge_measures, m)?)?;
    m.add_function(wrap_pyfunction!(balance_measures, m)?)?;
    m.add_function(wrap_pyfunction!(cnn_measures, m)?)?;
    Ok(())
}
