//! Image enumeration and the parallel per-image pipeline.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use aesthetics_core::catalog::Analyzer;
use aesthetics_core::cnn::Conv1Weights;
use aesthetics_core::image::{decode_file, resize};
use aesthetics_core::{stats, RasterImage, ResizeMode};
use rayon::prelude::*;

use crate::config::{FailPolicy, RunConfig, WeightSource};
use crate::csv::{write_csv, ResultRow};

pub const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("input {0}")]
    Input(String),
    #[error("weight file: {0}")]
    Weights(aesthetics_core::Error),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
    #[error("aborted at {file}: {reason}")]
    Aborted { file: String, reason: String },
}

impl BatchError {
    /// 1 for configuration problems, 2 for output failures, 3 for aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            BatchError::Input(_) | BatchError::Weights(_) => 1,
            BatchError::Output(_) => 2,
            BatchError::Aborted { .. } => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub rows_written: usize,
    /// Images that could not be decoded.
    pub failures: usize,
    /// Individual metric evaluations that returned an error.
    pub metric_errors: usize,
    /// Decode calls made; one per enumerated image.
    pub decodes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputImage {
    pub path: PathBuf,
    /// Row label: the path relative to its input directory, or the input as
    /// given for files and glob matches.
    pub name: String,
}

fn has_image_extension(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

fn is_glob(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

/// Expands files, directories (recursively) and glob patterns, sorted by
/// name. Files named explicitly are kept whatever their extension.
pub fn enumerate_inputs(inputs: &[String]) -> Result<Vec<InputImage>, BatchError> {
    let mut out = Vec::new();
    for input in inputs {
        let path = Path::new(input);
        if path.is_dir() {
            for entry in walkdir::WalkDir::new(path).follow_links(true) {
                let entry = entry.map_err(|e| BatchError::Input(format!("{input}: {e}")))?;
                if entry.file_type().is_file() && has_image_extension(entry.path()) {
                    let rel = entry.path().strip_prefix(path).unwrap_or(entry.path());
                    let name = rel
                        .components()
                        .map(|c| c.as_os_str().to_string_lossy())
                        .collect::<Vec<_>>()
                        .join("/");
                    out.push(InputImage {
                        path: entry.path().to_path_buf(),
                        name,
                    });
                }
            }
        } else if path.is_file() {
            out.push(InputImage {
                path: path.to_path_buf(),
                name: input.clone(),
            });
        } else if is_glob(input) {
            let matches = glob::glob(input).map_err(|e| BatchError::Input(format!("{input}: {e}")))?;
            for m in matches {
                let p = m.map_err(|e| BatchError::Input(format!("{input}: {e}")))?;
                if p.is_file() && has_image_extension(&p) {
                    out.push(InputImage {
                        name: p.to_string_lossy().into_owned(),
                        path: p,
                    });
                }
            }
        } else {
            return Err(BatchError::Input(format!("{input}: no such file or directory")));
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.path.cmp(&b.path)));
    Ok(out)
}

pub fn load_weights(cfg: &RunConfig) -> Result<Option<Conv1Weights>, BatchError> {
    if !aesthetics_core::catalog::needs_weights(&cfg.metrics) {
        return Ok(None);
    }
    match &cfg.weights {
        Some(WeightSource::Bundled) => Ok(Some(Conv1Weights::bundled())),
        Some(WeightSource::File(p)) => Conv1Weights::load(p).map(Some).map_err(BatchError::Weights),
        None => Err(BatchError::Input("conv1 metrics need a weight file".into())),
    }
}

/// Values for one decoded image. Geometry metrics describe the original
/// image; everything else sees the pre-resized copy.
pub fn evaluate_image(
    original: &RasterImage,
    cfg: &RunConfig,
    weights: Option<&Conv1Weights>,
) -> (Vec<f64>, Vec<String>) {
    let resized;
    let img = if cfg.resize.mode == ResizeMode::None {
        original
    } else {
        resized = resize(original, cfg.resize);
        &resized
    };
    let analyzer = Analyzer::new(img, &cfg.params, weights);
    let mut errors = Vec::new();
    let values = cfg
        .metrics
        .iter()
        .map(|&id| {
            let r = match id {
                "image_size" => Ok(stats::image_size(original)),
                "aspect_ratio" => Ok(stats::aspect_ratio(original)),
                _ => analyzer.compute(id),
            };
            r.unwrap_or_else(|e| {
                errors.push(format!("{id}: {e}"));
                f64::NAN
            })
        })
        .collect();
    (values, errors)
}

struct Evaluated {
    row: ResultRow,
    decode_failed: bool,
    metric_errors: usize,
}

/// Evaluates every input in parallel; rows come back in enumeration order.
pub fn evaluate_batch(cfg: &RunConfig) -> Result<(Vec<ResultRow>, BatchSummary), BatchError> {
    let images = enumerate_inputs(&cfg.inputs)?;
    let weights = load_weights(cfg)?;
    let decodes = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| BatchError::Input(format!("worker pool: {e}")))?;
    let process = |input: &InputImage| -> Result<Evaluated, BatchError> {
        decodes.fetch_add(1, Ordering::Relaxed);
        match decode_file(&input.path) {
            Ok(img) => {
                let (values, errors) = evaluate_image(&img, cfg, weights.as_ref());
                Ok(Evaluated {
                    metric_errors: errors.len(),
                    row: ResultRow {
                        filename: input.name.clone(),
                        values,
                        error: (!errors.is_empty()).then(|| errors.join("; ")),
                    },
                    decode_failed: false,
                })
            }
            Err(e) if cfg.fail_policy == FailPolicy::Abort => Err(BatchError::Aborted {
                file: input.name.clone(),
                reason: e.to_string(),
            }),
            Err(e) => Ok(Evaluated {
                row: ResultRow {
                    filename: input.name.clone(),
                    values: vec![f64::NAN; cfg.metrics.len()],
                    error: Some(format!("decode: {e}")),
                },
                decode_failed: true,
                metric_errors: 0,
            }),
        }
    };
    let evaluated: Vec<Evaluated> = pool.install(|| images.par_iter().map(process).collect::<Result<_, _>>())?;
    let summary = BatchSummary {
        rows_written: evaluated.len(),
        failures: evaluated.iter().filter(|e| e.decode_failed).count(),
        metric_errors: evaluated.iter().map(|e| e.metric_errors).sum(),
        decodes: decodes.load(Ordering::Relaxed),
    };
    Ok((evaluated.into_iter().map(|e| e.row).collect(), summary))
}

/// Runs the batch and writes the CSV to `out`.
pub fn run_batch_to<W: Write>(cfg: &RunConfig, out: W) -> Result<BatchSummary, BatchError> {
    let (rows, summary) = evaluate_batch(cfg)?;
    write_csv(out, &cfg.metrics, &rows).map_err(BatchError::Output)?;
    Ok(summary)
}

/// Runs the batch, writing to the configured file or standard output. The
/// output file is created before any image is processed so an unwritable
/// destination fails fast; an aborted run removes it again.
pub fn run_batch(cfg: &RunConfig) -> Result<BatchSummary, BatchError> {
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).map_err(BatchError::Output)?;
            let result = run_batch_to(cfg, BufWriter::new(file));
            if result.is_err() {
                let _ = std::fs::remove_file(path);
            }
            result
        }
        None => run_batch_to(cfg, std::io::stdout().lock()),
    }
}
