//! Randomized invariants, 100 generated cases each.

use aesthetics_core::balance::{balance_score, homogeneity, mirror_symmetry};
use aesthetics_core::cnn::{apply_conv1, self_similarity_from_responses, Conv1Weights};
use aesthetics_core::fourier::{slope_amplitude, FourierParams};
use aesthetics_core::numeric::{intersection, normalized};
use aesthetics_core::phog::{
    gradient_image, hog_pyramid, phog_anisotropy, phog_complexity, phog_self_similarity, GradientOperator,
    OrientationRange, PhogParams,
};
use aesthetics_core::stats::{channel_stats, color_entropy, lightness_entropy, AchromaticHue, ColorModel};
use aesthetics_core::{RasterImage, ResizePolicy};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const CASES: u32 = 100;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn rgb(w: usize, h: usize, px: &[[u8; 3]]) -> RasterImage {
    RasterImage::rgb8(w as u32, h as u32, px.iter().flatten().copied().collect()).unwrap()
}

/// Image dimensions plus pixels in `[lo, hi)` x `[lo, hi)`.
fn image(lo: usize, hi: usize) -> impl Strategy<Value = (usize, usize, Vec<[u8; 3]>)> {
    (lo..hi, lo..hi).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<[u8; 3]>(), w * h)))
}

/// Small real-valued gray image with values in [0, 255].
fn gray_image(lo: usize, hi: usize) -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (lo..hi, lo..hi).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(0.0..255.0f64, w * h)))
}

fn no_resize() -> PhogParams {
    PhogParams {
        resize: ResizePolicy::NONE,
        ..Default::default()
    }
}

fn run<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn histogram_statistics_ignore_pixel_order() -> Result<(), String> {
    let strategy = image(1, 24).prop_flat_map(|(w, h, px)| {
        let order = Just((0..px.len()).collect::<Vec<_>>()).prop_shuffle();
        (Just(w), Just(h), Just(px), order)
    });
    run("pixel permutation", strategy, |(w, h, px, order)| {
        let a = rgb(w, h, &px);
        let shuffled: Vec<[u8; 3]> = order.iter().map(|&i| px[i]).collect();
        let b = rgb(w, h, &shuffled);
        for model in [ColorModel::Rgb, ColorModel::Hsv, ColorModel::Lab] {
            let (sa, sb) = (channel_stats(&a, model).unwrap(), channel_stats(&b, model).unwrap());
            for c in 0..3 {
                prop_assert!(close(sa.mean[c], sb.mean[c], 1e-9), "{model:?} mean {c}");
                prop_assert!((sa.std[c] - sb.std[c]).abs() <= 1e-9 * sa.mean[c].abs().max(1.0));
            }
        }
        prop_assert!(close(lightness_entropy(&a).unwrap(), lightness_entropy(&b).unwrap(), 1e-12));
        for mode in [AchromaticHue::Include, AchromaticHue::Exclude] {
            prop_assert!(close(
                color_entropy(&a, mode).unwrap(),
                color_entropy(&b, mode).unwrap(),
                1e-12
            ));
        }
        Ok(())
    })
}

fn balance_measures_survive_half_turn() -> Result<(), String> {
    // The homogeneity grid gives the remainder to the last cell, so only sides
    // divisible by ten map cells onto cells under a half turn.
    let strategy = (1usize..5, 1usize..5, 10usize..40, 10usize..40).prop_flat_map(|(a, b, w, h)| {
        (
            Just((10 * a, 10 * b)),
            prop::collection::vec(any::<[u8; 3]>(), 100 * a * b),
            Just((w, h)),
            prop::collection::vec(any::<[u8; 3]>(), w * h),
        )
    });
    run("half-turn rotation", strategy, |((gw, gh), grid_px, (w, h), px)| {
        let img = rgb(w, h, &px);
        let turned = img.rotate180();
        prop_assert!(close(mirror_symmetry(&img).unwrap(), mirror_symmetry(&turned).unwrap(), 1e-9));
        prop_assert!(close(balance_score(&img).unwrap(), balance_score(&turned).unwrap(), 1e-9));
        let grid = rgb(gw, gh, &grid_px);
        prop_assert!(close(
            homogeneity(&grid).unwrap(),
            homogeneity(&grid.rotate180()).unwrap(),
            1e-9
        ));
        Ok(())
    })
}

fn pyramid_conserves_mass() -> Result<(), String> {
    run("pyramid mass", (gray_image(1, 40), 1usize..24, any::<bool>()), |((w, h, v), bins, half)| {
        let img = RasterImage::gray_f64(w as u32, h as u32, v).unwrap();
        let range = if half { OrientationRange::Half180 } else { OrientationRange::Full360 };
        let grad = gradient_image(&img, GradientOperator::CentralDifference).unwrap();
        let pyr = hog_pyramid(&grad, bins, range).unwrap();
        let ground = &pyr.levels[0][0];
        prop_assert!(close(ground.iter().sum::<f64>(), grad.total_mass(), 1e-9));
        for level in &pyr.levels[1..] {
            for b in 0..bins {
                let s: f64 = level.iter().map(|sec| sec[b]).sum();
                prop_assert!(close(s, ground[b], 1e-9), "bin {b}: {s} vs {}", ground[b]);
            }
        }
        Ok(())
    })
}

fn intersections_are_fractions() -> Result<(), String> {
    let bank = Conv1Weights::bundled();
    let hists = (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0..1.0f64, n),
            prop::collection::vec(0.0..1.0f64, n),
        )
    });
    run("intersection range", (gray_image(2, 40), image(11, 30), hists), |((w, h, v), (cw, ch, px), (a, b))| {
        let in_unit = |x: f64| (0.0..=1.0 + 1e-12).contains(&x);
        if let (Some(a), Some(b)) = (normalized(&a), normalized(&b)) {
            prop_assert!(in_unit(intersection(&a, &b)));
        }
        let img = RasterImage::gray_f64(w as u32, h as u32, v).unwrap();
        let s = phog_self_similarity(&img, &no_resize()).unwrap();
        prop_assert!(s.is_nan() || in_unit(s), "phog {s}");
        let resp = apply_conv1(&rgb(cw, ch, &px), &bank, 1, true).unwrap();
        let c = self_similarity_from_responses(&resp);
        prop_assert!(c.is_nan() || in_unit(c), "cnn {c}");
        Ok(())
    })
}

fn normalized_measures_ignore_scale() -> Result<(), String> {
    let strategy = (gray_image(4, 40), 0.05..20.0f64, prop::collection::vec(0.0..255.0f64, 32 * 32));
    run("value scaling", strategy, |((w, h, v), c, square)| {
        let params = no_resize();
        let scaled = |data: &[f64], w: usize, h: usize| {
            RasterImage::gray_f64(w as u32, h as u32, data.iter().map(|x| x * c).collect()).unwrap()
        };
        let img = RasterImage::gray_f64(w as u32, h as u32, v.clone()).unwrap();
        let big = scaled(&v, w, h);
        prop_assert!(close(
            phog_anisotropy(&img, &params).unwrap(),
            phog_anisotropy(&big, &params).unwrap(),
            1e-9
        ));
        let (s1, s2) = (
            phog_self_similarity(&img, &params).unwrap(),
            phog_self_similarity(&big, &params).unwrap(),
        );
        prop_assert!(close(s1, s2, 1e-9), "{s1} vs {s2}");
        prop_assert!(close(
            c * phog_complexity(&img, &params).unwrap(),
            phog_complexity(&big, &params).unwrap(),
            1e-9
        ));
        let sq = RasterImage::gray_f64(32, 32, square.clone()).unwrap();
        let fp = FourierParams::default();
        let (a, b) = (
            slope_amplitude(&sq, &fp).unwrap().slope,
            slope_amplitude(&scaled(&square, 32, 32), &fp).unwrap().slope,
        );
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
        Ok(())
    })
}

/// Runs every property; the error names the first one that failed.
pub fn run_all() -> Result<usize, String> {
    let props: [fn() -> Result<(), String>; 5] = [
        histogram_statistics_ignore_pixel_order,
        balance_measures_survive_half_turn,
        pyramid_conserves_mass,
        intersections_are_fractions,
        normalized_measures_ignore_scale,
    ];
    for p in props {
        p()?;
    }
    Ok(props.len())
}
