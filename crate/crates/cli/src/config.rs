//! Command-line and config-file parsing. Every setting has a key; a config
//! file holds `key = value` lines and flags override it, so the precedence is
//! flags > file > defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use aesthetics_core::catalog::{self, MetricParams};
use aesthetics_core::edges::{DifferenceClasses, PairWeighting};
use aesthetics_core::fourier::CookThreshold;
use aesthetics_core::phog::{AnisotropyMode, GradientOperator, OrientationRange};
use aesthetics_core::stats::AchromaticHue;
use aesthetics_core::{ResizeFilter, ResizeMode, ResizePolicy};
use clap::Parser;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown metric {name:?}; valid metrics: {}", valid.join(", "))]
    UnknownMetric { name: String, valid: Vec<String> },
    /// Includes clap's help and version requests.
    #[error("{0}")]
    Cli(#[from] clap::Error),
    #[error("{0}")]
    BadFlag(String),
    #[error("no input paths given (use --in or `in = ...` in the config file)")]
    MissingInput,
    #[error("invalid value {value:?} for {key}: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("config file {path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FailPolicy {
    /// Write a row with empty cells and an error note, keep going.
    #[default]
    SkipAndRecord,
    /// Stop at the first image that fails to decode.
    Abort,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightSource {
    Bundled,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<String>,
    pub metrics: Vec<&'static str>,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub workers: usize,
    pub weights: Option<WeightSource>,
    /// Applied to every image right after decoding.
    pub resize: ResizePolicy,
    pub fail_policy: FailPolicy,
    pub params: MetricParams,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Run(Box<RunConfig>),
    ListMetrics,
}

#[derive(Parser, Debug)]
#[command(name = "aesthetics", version, about = "Compute objective image properties into a CSV file")]
struct Cli {
    /// Image files, directories (searched recursively) or glob patterns.
    #[arg(long = "in", value_name = "PATH", num_args = 1..)]
    inputs: Vec<String>,
    /// Comma-separated metric ids, `default`, or `all`.
    #[arg(long)]
    metrics: Option<String>,
    /// Output CSV file; standard output when omitted.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Conv1 weight file, or `bundled` for the built-in bank.
    #[arg(long)]
    weights: Option<String>,
    /// Pre-resize: none, long:N, max-pixels:N, area:N or WxH.
    #[arg(long)]
    resize: Option<String>,
    /// skip (record the failure and continue) or abort.
    #[arg(long = "fail-policy")]
    fail_policy: Option<String>,
    /// Any config key, for example `--set phog_bins=8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the metric ids and exit.
    #[arg(long = "list-metrics")]
    list_metrics: bool,
}

/// Keys accepted in config files and by `--set`.
pub const KEYS: &[&str] = &[
    "in",
    "metrics",
    "out",
    "workers",
    "weights",
    "resize",
    "resize_filter",
    "fail_policy",
    "achromatic_hue",
    "cook_threshold",
    "fourier_side",
    "power_bins",
    "power_band",
    "phog_resize",
    "phog_bins",
    "phog_range",
    "phog_operator",
    "phog_level_weights",
    "phog_anisotropy",
    "gabor_wavelength",
    "gabor_sigma",
    "gabor_aspect",
    "gabor_extent",
    "edge_resize",
    "edge_limit",
    "eoe_classes",
    "eoe_weighting",
    "eoe_min_distance",
    "eoe_workers",
    "cnn_grid",
    "cnn_rectify",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ConfigError::BadFlag(format!("config line {}: expected key = value, got {raw:?}", n + 1))
        })?;
        insert_key(&mut out, k.trim(), v.trim())?;
    }
    Ok(out)
}

fn insert_key(map: &mut BTreeMap<String, String>, key: &str, value: &str) -> Result<(), ConfigError> {
    if !KEYS.contains(&key) {
        return Err(ConfigError::BadFlag(format!(
            "unknown setting {key:?}; known settings: {}",
            KEYS.join(", ")
        )));
    }
    map.insert(key.to_string(), value.to_string());
    Ok(())
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| bad(key, value, "not a number"))
}

fn positive_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = number(key, value)?;
    if !(v.is_finite() && v > 0.0) {
        return Err(bad(key, value, "must be a positive number"));
    }
    Ok(v)
}

fn choice<T: Copy>(key: &str, value: &str, options: &[(&str, T)]) -> Result<T, ConfigError> {
    options
        .iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(value))
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            bad(key, value, format!("expected one of {}", names.join(", ")))
        })
}

/// `none`, `long:N`, `max-pixels:N`, `area:N` or `WxH`.
pub fn parse_resize_mode(key: &str, value: &str) -> Result<ResizeMode, ConfigError> {
    let v = value.trim().to_ascii_lowercase();
    let count = |s: &str| -> Result<u32, ConfigError> {
        let n: u32 = number(key, s)?;
        if n == 0 {
            return Err(bad(key, value, "size must be positive"));
        }
        Ok(n)
    };
    if v == "none" {
        return Ok(ResizeMode::None);
    }
    if let Some((kind, n)) = v.split_once(':') {
        return match kind {
            "long" => Ok(ResizeMode::LongSideTo(count(n)?)),
            "max-pixels" => Ok(ResizeMode::MaxPixels(count(n)?)),
            "area" => Ok(ResizeMode::Area(count(n)?)),
            _ => Err(bad(key, value, "expected none, long:N, max-pixels:N, area:N or WxH")),
        };
    }
    if let Some((w, h)) = v.split_once('x') {
        return Ok(ResizeMode::Exact(count(w)?, count(h)?));
    }
    Err(bad(key, value, "expected none, long:N, max-pixels:N, area:N or WxH"))
}

pub fn parse_metric_list(value: &str) -> Result<Vec<&'static str>, ConfigError> {
    let value = value.trim();
    match value {
        "all" => return Ok(catalog::all_ids()),
        "default" | "" => return Ok(catalog::default_ids()),
        _ => {}
    }
    let mut out: Vec<&'static str> = Vec::new();
    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let info = catalog::find(name).ok_or_else(|| ConfigError::UnknownMetric {
            name: name.to_string(),
            valid: catalog::all_ids().iter().map(|s| s.to_string()).collect(),
        })?;
        if !out.contains(&info.id) {
            out.push(info.id);
        }
    }
    if out.is_empty() {
        return Err(bad("metrics", value, "no metrics selected"));
    }
    Ok(out)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Builds a run configuration from already merged settings.
pub fn config_from_settings(s: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    let get = |k: &str| s.get(k).map(String::as_str);
    let inputs: Vec<String> = get("in")
        .map(|v| v.split(',').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect())
        .unwrap_or_default();
    if inputs.is_empty() {
        return Err(ConfigError::MissingInput);
    }
    let metrics = parse_metric_list(get("metrics").unwrap_or("default"))?;
    let output = get("out").filter(|o| *o != "-").map(PathBuf::from);
    let workers = match get("workers") {
        Some(v) => {
            let n: usize = number("workers", v)?;
            if n == 0 {
                return Err(bad("workers", v, "must be at least 1"));
            }
            n
        }
        None => default_workers(),
    };
    let weights = get("weights").map(|w| {
        if w == "bundled" {
            WeightSource::Bundled
        } else {
            WeightSource::File(PathBuf::from(w))
        }
    });
    if catalog::needs_weights(&metrics) && weights.is_none() {
        return Err(ConfigError::BadFlag(
            "conv1 metrics selected but no weight file given (use --weights <file> or --weights bundled)".into(),
        ));
    }
    let filter = match get("resize_filter") {
        Some(v) => choice(
            "resize_filter",
            v,
            &[("bilinear", ResizeFilter::Bilinear), ("nearest", ResizeFilter::NearestNeighbor)],
        )?,
        None => ResizeFilter::Bilinear,
    };
    let policy = |key: &str, default: ResizePolicy| -> Result<ResizePolicy, ConfigError> {
        let p = match get(key) {
            Some(v) => ResizePolicy::new(parse_resize_mode(key, v)?),
            None => default,
        };
        Ok(p.with_filter(filter))
    };
    let resize = policy("resize", ResizePolicy::NONE)?;
    let fail_policy = match get("fail_policy") {
        Some(v) => choice(
            "fail_policy",
            v,
            &[("skip", FailPolicy::SkipAndRecord), ("abort", FailPolicy::Abort)],
        )?,
        None => FailPolicy::SkipAndRecord,
    };

    let mut p = MetricParams::default();
    p.fourier.filter = filter;
    p.cnn.filter = filter;
    if let Some(v) = get("achromatic_hue") {
        p.achromatic = choice(
            "achromatic_hue",
            v,
            &[("include", AchromaticHue::Include), ("exclude", AchromaticHue::Exclude)],
        )?;
    }
    if let Some(v) = get("cook_threshold") {
        p.fourier.cook_threshold = match v {
            "4/n" => CookThreshold::FourOverN,
            "n/4" => CookThreshold::NOverFour,
            other => CookThreshold::Fixed(positive_f64("cook_threshold", other)?),
        };
    }
    if let Some(v) = get("fourier_side") {
        let n: u32 = number("fourier_side", v)?;
        if !n.is_power_of_two() || n < 16 {
            return Err(bad("fourier_side", v, "must be a power of two >= 16"));
        }
        p.fourier.target_side = n;
    }
    if let Some(v) = get("power_bins") {
        p.fourier.power_bins = number("power_bins", v)?;
        if p.fourier.power_bins < 2 {
            return Err(bad("power_bins", v, "need at least 2 bins"));
        }
    }
    if let Some(v) = get("power_band") {
        let (lo, hi) = v
            .split_once(',')
            .ok_or_else(|| bad("power_band", v, "expected LOW,HIGH"))?;
        let (lo, hi): (u32, u32) = (number("power_band", lo.trim())?, number("power_band", hi.trim())?);
        if lo == 0 || lo >= hi {
            return Err(bad("power_band", v, "expected 0 < LOW < HIGH"));
        }
        p.fourier.power_band = (lo, hi);
    }
    p.phog.resize = policy("phog_resize", p.phog.resize)?;
    if let Some(v) = get("phog_bins") {
        p.phog.bins = choice("phog_bins", v, &[("8", 8), ("16", 16)])?;
    }
    if let Some(v) = get("phog_range") {
        p.phog.range = choice(
            "phog_range",
            v,
            &[("360", OrientationRange::Full360), ("180", OrientationRange::Half180)],
        )?;
    }
    if let Some(v) = get("phog_operator") {
        p.phog.operator = choice(
            "phog_operator",
            v,
            &[("central", GradientOperator::CentralDifference), ("sobel", GradientOperator::Sobel)],
        )?;
    }
    if let Some(v) = get("phog_level_weights") {
        let w: Vec<f64> = v
            .split(',')
            .map(|x| number::<f64>("phog_level_weights", x.trim()))
            .collect::<Result<_, _>>()?;
        aesthetics_core::phog::validate_level_weights(&w, 3)
            .map_err(|e| bad("phog_level_weights", v, e.to_string()))?;
        p.phog.level_weights = [w[0], w[1], w[2]];
    }
    if let Some(v) = get("phog_anisotropy") {
        p.phog.anisotropy = choice(
            "phog_anisotropy",
            v,
            &[("pooled", AnisotropyMode::Pooled), ("per-section", AnisotropyMode::PerSection)],
        )?;
    }
    if let Some(v) = get("gabor_wavelength") {
        p.edges.gabor.wavelength = positive_f64("gabor_wavelength", v)?;
    }
    if let Some(v) = get("gabor_sigma") {
        p.edges.gabor.sigma = positive_f64("gabor_sigma", v)?;
    }
    if let Some(v) = get("gabor_aspect") {
        p.edges.gabor.aspect = positive_f64("gabor_aspect", v)?;
    }
    if let Some(v) = get("gabor_extent") {
        p.edges.gabor.extent = positive_f64("gabor_extent", v)?;
    }
    p.edges.resize = policy("edge_resize", p.edges.resize)?;
    if let Some(v) = get("edge_limit") {
        p.edges.max_edges = number("edge_limit", v)?;
    }
    if let Some(v) = get("eoe_classes") {
        p.pairs.classes = choice(
            "eoe_classes",
            v,
            &[("folded", DifferenceClasses::Folded), ("directed", DifferenceClasses::Directed)],
        )?;
    }
    if let Some(v) = get("eoe_weighting") {
        p.pairs.weighting = choice(
            "eoe_weighting",
            v,
            &[("product", PairWeighting::StrengthProduct), ("unweighted", PairWeighting::Unweighted)],
        )?;
    }
    if let Some(v) = get("eoe_min_distance") {
        let d: f64 = number("eoe_min_distance", v)?;
        if !(d.is_finite() && d >= 0.0) {
            return Err(bad("eoe_min_distance", v, "must be >= 0"));
        }
        p.pairs.min_distance = d;
    }
    if let Some(v) = get("eoe_workers") {
        let n: usize = number("eoe_workers", v)?;
        p.pairs.workers = (n > 0).then_some(n);
    }
    if let Some(v) = get("cnn_grid") {
        p.cnn.grid = number("cnn_grid", v)?;
        aesthetics_core::cnn::validate_grid(p.cnn.grid).map_err(|e| bad("cnn_grid", v, e.to_string()))?;
    }
    if let Some(v) = get("cnn_rectify") {
        p.cnn.rectify = choice("cnn_rectify", v, &[("true", true), ("false", false)])?;
    }
    Ok(RunConfig {
        inputs,
        metrics,
        output,
        workers,
        weights,
        resize,
        fail_policy,
        params: p,
    })
}

/// Parses the full argument vector (program name first).
pub fn parse_config<I, T>(argv: I) -> Result<Command, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    if cli.list_metrics {
        return Ok(Command::ListMetrics);
    }
    let mut settings = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::File {
                path: path.clone(),
                source,
            })?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::BadFlag(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        insert_key(&mut settings, k.trim(), v.trim())?;
    }
    if !cli.inputs.is_empty() {
        settings.insert("in".into(), cli.inputs.join(","));
    }
    let flags = [
        ("metrics", &cli.metrics),
        ("out", &cli.out),
        ("workers", &cli.workers),
        ("weights", &cli.weights),
        ("resize", &cli.resize),
        ("fail_policy", &cli.fail_policy),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            settings.insert(key.into(), v.clone());
        }
    }
    config_from_settings(&settings).map(|c| Command::Run(Box::new(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let argv = std::iter::once("aesthetics").chain(args.iter().copied());
        match parse_config(argv)? {
            Command::Run(c) => Ok(*c),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn basic_flags() {
        let c = run(&["--metrics", "rms_contrast,slope_power", "--in", "./imgs", "--out", "r.csv"]).unwrap();
        assert_eq!(c.metrics, vec!["rms_contrast", "slope_power"]);
        assert_eq!(c.inputs, vec!["./imgs"]);
        assert_eq!(c.output, Some(PathBuf::from("r.csv")));
        assert_eq!(c.fail_policy, FailPolicy::SkipAndRecord);
    }

    #[test]
    fn unknown_metric_lists_valid_names() {
        let err = run(&["--metrics", "nope", "--in", "x"]).unwrap_err();
        match &err {
            ConfigError::UnknownMetric { name, valid } => {
                assert_eq!(name, "nope");
                assert_eq!(valid.len(), catalog::METRICS.len());
            }
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("rms_contrast"));
    }

    #[test]
    fn missing_input() {
        assert!(matches!(run(&["--metrics", "dcm"]), Err(ConfigError::MissingInput)));
    }

    #[test]
    fn flag_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# batch\nworkers = 4\nin = a, b\nphog_bins = 8\n").unwrap();
        let p = path.to_str().unwrap();
        let c = run(&["--config", p]).unwrap();
        assert_eq!(c.workers, 4);
        assert_eq!(c.inputs, vec!["a", "b"]);
        assert_eq!(c.params.phog.bins, 8);
        let c = run(&["--config", p, "--workers", "8", "--set", "phog_bins=16"]).unwrap();
        assert_eq!(c.workers, 8);
        assert_eq!(c.params.phog.bins, 16);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(run(&["--in", "x", "--workers", "0"]).is_err());
        assert!(run(&["--in", "x", "--resize", "huge"]).is_err());
        assert!(run(&["--in", "x", "--set", "colour=1"]).is_err());
        assert!(run(&["--in", "x", "--metrics", "all"]).is_err());
        assert!(run(&["--in", "x", "--bogus"]).is_err());
    }

    #[test]
    fn resize_modes() {
        assert_eq!(parse_resize_mode("r", "none").unwrap(), ResizeMode::None);
        assert_eq!(parse_resize_mode("r", "long:512").unwrap(), ResizeMode::LongSideTo(512));
        assert_eq!(parse_resize_mode("r", "max-pixels:120000").unwrap(), ResizeMode::MaxPixels(120_000));
        assert_eq!(parse_resize_mode("r", "area:100000").unwrap(), ResizeMode::Area(100_000));
        assert_eq!(parse_resize_mode("r", "640x480").unwrap(), ResizeMode::Exact(640, 480));
        assert!(parse_resize_mode("r", "0x5").is_err());
    }

    #[test]
    fn all_metrics_with_weights() {
        let c = run(&["--in", "x", "--metrics", "all", "--weights", "bundled"]).unwrap();
        assert_eq!(c.metrics.len(), catalog::METRICS.len());
        assert_eq!(c.weights, Some(WeightSource::Bundled));
    }

    #[test]
    fn list_metrics() {
        assert_eq!(parse_config(["aesthetics", "--list-metrics"]).unwrap(), Command::ListMetrics);
    }
}
