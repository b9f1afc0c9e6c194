//! Brute-force reference implementations. Each one recomputes a quantity
//! straight from its definition, loop by loop, so the optimized paths in the
//! library have something independent to be checked against.

use std::f64::consts::TAU;

use aesthetics_core::color;
use aesthetics_core::edges::{DifferenceClasses, Edge, PairWeighting, ORIENTATIONS};
use aesthetics_core::{Plane, RasterImage};

pub fn pixels(img: &RasterImage) -> Vec<[u8; 3]> {
    img.bytes().unwrap().chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect()
}

pub fn two_pass(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    (m, var.sqrt())
}

pub fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    let mut h = 0.0;
    for &c in counts {
        if c > 0.0 {
            let p = c / total;
            h -= p * p.log2();
        }
    }
    h
}

pub fn lightness(p: [u8; 3]) -> f64 {
    if p[0] == p[1] && p[1] == p[2] {
        color::gray8_lightness(p[0])
    } else {
        color::rgb8_to_lab(p[0], p[1], p[2])[0]
    }
}

pub fn hsv(p: [u8; 3]) -> [f64; 3] {
    color::rgb_to_hsv([p[0] as f64 / 255.0, p[1] as f64 / 255.0, p[2] as f64 / 255.0])
}

pub fn bin256(v: f64, span: f64) -> usize {
    ((v / span * 256.0).floor().max(0.0) as usize).min(255)
}

/// Gray levels as the library's luma conversion produces them.
pub fn gray(img: &RasterImage) -> Vec<f64> {
    pixels(img).iter().map(|p| color::luma(p[0], p[1], p[2]) as f64).collect()
}

// ---------------------------------------------------------------- gradients

pub struct Gradient {
    pub magnitude: Vec<f64>,
    pub orientation: Vec<f64>,
}

/// numpy.gradient-style differences per channel, strongest channel wins.
pub fn gradient(planes: &[Vec<f64>], w: usize, h: usize) -> Gradient {
    let d = |f: &dyn Fn(usize) -> f64, i: usize, n: usize| -> f64 {
        if n < 2 {
            0.0
        } else if i == 0 {
            f(1) - f(0)
        } else if i == n - 1 {
            f(n - 1) - f(n - 2)
        } else {
            0.5 * (f(i + 1) - f(i - 1))
        }
    };
    let mut magnitude = vec![0.0; w * h];
    let mut orientation = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut best = -1.0;
            for p in planes {
                let gx = d(&|i| p[y * w + i], x, w);
                let gy = d(&|j| p[j * w + x], y, h);
                let m = (gx * gx + gy * gy).sqrt();
                if m > best {
                    best = m;
                    magnitude[y * w + x] = m;
                    orientation[y * w + x] = if m > 0.0 { gy.atan2(gx).rem_euclid(TAU) } else { 0.0 };
                }
            }
        }
    }
    Gradient { magnitude, orientation }
}

pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn bounds(len: usize, parts: usize, i: usize) -> (usize, usize) {
    let base = len / parts;
    let start = i * base;
    (start, if i == parts - 1 { len } else { start + base })
}

/// `pyramid[level][section][bin]`, full-circle orientations.
pub fn pyramid(g: &Gradient, w: usize, h: usize, bins: usize) -> Vec<Vec<Vec<f64>>> {
    (0..=3)
        .map(|level| {
            let n = 1 << level;
            let mut sections = Vec::new();
            for sy in 0..n {
                for sx in 0..n {
                    let (x0, x1) = bounds(w, n, sx);
                    let (y0, y1) = bounds(h, n, sy);
                    let mut hist = vec![0.0; bins];
                    for y in y0..y1 {
                        for x in x0..x1 {
                            let i = y * w + x;
                            let b = ((g.orientation[i] / (TAU / bins as f64)) as usize).min(bins - 1);
                            hist[b] += g.magnitude[i];
                        }
                    }
                    sections.push(hist);
                }
            }
            sections
        })
        .collect()
}

fn unit(h: &[f64]) -> Option<Vec<f64>> {
    let s: f64 = h.iter().sum();
    (s > 0.0).then(|| h.iter().map(|v| v / s).collect())
}

pub fn self_similarity(pyr: &[Vec<Vec<f64>>]) -> f64 {
    let Some(ground) = unit(&pyr[0][0]) else {
        return f64::NAN;
    };
    let mut total = 0.0;
    for level in &pyr[1..] {
        let mut acc = 0.0;
        for s in level {
            if let Some(u) = unit(s) {
                acc += u.iter().zip(&ground).map(|(a, b)| a.min(*b)).sum::<f64>();
            }
        }
        total += acc / level.len() as f64;
    }
    total / 3.0
}

pub fn anisotropy(pyr: &[Vec<Vec<f64>>]) -> f64 {
    let values: Vec<f64> = pyr[3].iter().filter_map(|s| unit(s)).flatten().collect();
    if values.is_empty() {
        0.0
    } else {
        two_pass(&values).1
    }
}

// ------------------------------------------------------------ box counting

pub fn boundary(bits: &[bool], w: usize, h: usize) -> Vec<bool> {
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let v = bits[y * w + x];
            let neighbours = [
                (x > 0).then(|| bits[y * w + x - 1]),
                (x + 1 < w).then(|| bits[y * w + x + 1]),
                (y > 0).then(|| bits[(y - 1) * w + x]),
                (y + 1 < h).then(|| bits[(y + 1) * w + x]),
            ];
            out[y * w + x] = neighbours.iter().flatten().any(|&n| n != v);
        }
    }
    out
}

/// Boxes of side `s` holding at least one boundary pixel, for s = 2..side/2.
pub fn box_counts_2d(edge: &[bool], side: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut s = side / 2;
    while s >= 2 {
        let mut n = 0.0;
        for by in (0..side).step_by(s) {
            for bx in (0..side).step_by(s) {
                if (by..by + s).any(|y| (bx..bx + s).any(|x| edge[y * side + x])) {
                    n += 1.0;
                }
            }
        }
        out.push((s, n));
        s /= 2;
    }
    out
}

/// Differential box counts on a square surface of values in [0, 100].
pub fn box_counts_3d(surface: &[f64], side: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut s = side / 2;
    while s >= 2 {
        let unit = s as f64 * 100.0 / side as f64;
        let mut n = 0.0;
        for by in (0..side).step_by(s) {
            for bx in (0..side).step_by(s) {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for y in by..(by + s).min(side) {
                    for x in bx..(bx + s).min(side) {
                        lo = lo.min(surface[y * side + x]);
                        hi = hi.max(surface[y * side + x]);
                    }
                }
                n += (hi / unit).floor() - (lo / unit).floor() + 1.0;
            }
        }
        out.push((s, n));
        s /= 2;
    }
    out
}

/// Least-squares slope of log N against log(1/s).
pub fn loglog_slope(series: &[(usize, f64)], log: fn(f64) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = series.iter().map(|&(s, n)| (log(1.0 / s as f64), log(n))).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

// ------------------------------------------------------------------ balance

fn asym(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        100.0 * (a - b).abs() / (a + b)
    }
}

/// The eight region comparisons, every region summed pixel by pixel.
pub fn balance(mass: &[f64], w: usize, h: usize) -> [f64; 8] {
    let sum_where = |f: &dyn Fn(usize, usize) -> f64| -> f64 {
        let mut s = 0.0;
        for y in 0..h {
            for x in 0..w {
                s += mass[y * w + x] * f(x, y);
            }
        }
        s
    };
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let overlap = |i: usize, n: usize| {
        let q = (n / 4) as f64;
        let (lo, hi) = (n as f64 / 2.0 - q, n as f64 / 2.0 + q);
        ((i + 1) as f64).min(hi) - (i as f64).max(lo)
    };
    let centre = |x: usize, y: usize| ((x as f64 + 0.5) / w as f64, (y as f64 + 0.5) / h as f64);
    let left = sum_where(&|x, _| ind(2 * x + 1 < w));
    let right = sum_where(&|x, _| ind(2 * x + 1 > w));
    let top = sum_where(&|_, y| ind(2 * y + 1 < h));
    let bottom = sum_where(&|_, y| ind(2 * y + 1 > h));
    let upper = sum_where(&|x, y| {
        let (u, v) = centre(x, y);
        ind(u > v)
    });
    let lower = sum_where(&|x, y| {
        let (u, v) = centre(x, y);
        ind(u < v)
    });
    let before = sum_where(&|x, y| {
        let (u, v) = centre(x, y);
        ind(u + v < 1.0)
    });
    let after = sum_where(&|x, y| {
        let (u, v) = centre(x, y);
        ind(u + v > 1.0)
    });
    let outer_c = sum_where(&|x, _| ind(x < w / 4 || x >= w - w / 4));
    let inner_c = sum_where(&|x, _| overlap(x, w).max(0.0));
    let outer_r = sum_where(&|_, y| ind(y < h / 4 || y >= h - h / 4));
    let inner_r = sum_where(&|_, y| overlap(y, h).max(0.0));
    let pairs = |n: usize, line: &dyn Fn(usize) -> f64| {
        let (mut d, mut t) = (0.0, 0.0);
        for i in 0..n / 2 {
            d += (line(i) - line(n - 1 - i)).abs();
            t += line(i) + line(n - 1 - i);
        }
        if t == 0.0 {
            0.0
        } else {
            100.0 * d / t
        }
    };
    let col = |x: usize| (0..h).map(|y| mass[y * w + x]).sum::<f64>();
    let row = |y: usize| (0..w).map(|x| mass[y * w + x]).sum::<f64>();
    [
        asym(left, right),
        asym(top, bottom),
        asym(upper, lower),
        asym(before, after),
        asym(outer_c, inner_c),
        asym(outer_r, inner_r),
        pairs(w, &col),
        pairs(h, &row),
    ]
}

pub fn mirror_vertical(g: &[f64], w: usize, h: usize) -> f64 {
    let mut d = 0.0;
    for y in 0..h {
        for x in 0..w {
            d += (g[y * w + x] - g[y * w + w - 1 - x]).abs();
        }
    }
    100.0 * (1.0 - d / (255.0 * (w * h) as f64))
}

pub fn dcm(mass: &[f64], w: usize, h: usize) -> f64 {
    let (mut t, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            let m = mass[y * w + x];
            t += m;
            sx += m * x as f64;
            sy += m * y as f64;
        }
    }
    let (cx, cy) = ((w - 1) as f64 / 2.0, (h - 1) as f64 / 2.0);
    100.0 * ((sx / t - cx).powi(2) + (sy / t - cy).powi(2)).sqrt() / (cx * cx + cy * cy).sqrt()
}

/// Otsu by exhaustive search of the between-class variance; lowest wins ties.
pub fn otsu(gray: &[f64]) -> f64 {
    let mut best = (-1.0, 0.0);
    for t in 0..255 {
        let (dark, light): (Vec<f64>, Vec<f64>) = gray.iter().partition(|&&v| v <= t as f64);
        if dark.is_empty() || light.is_empty() {
            if best.0 < 0.0 {
                best = (0.0, t as f64);
            }
            continue;
        }
        let m0 = dark.iter().sum::<f64>() / dark.len() as f64;
        let m1 = light.iter().sum::<f64>() / light.len() as f64;
        let var = dark.len() as f64 * light.len() as f64 * (m0 - m1).powi(2);
        if var > best.0 {
            best = (var, t as f64);
        }
    }
    best.1
}

pub fn homogeneity(dark: &[bool], w: usize, h: usize) -> f64 {
    let mut rows = [0.0; 10];
    let mut cols = [0.0; 10];
    for y in 0..h {
        for x in 0..w {
            if dark[y * w + x] {
                rows[(y / (h / 10)).min(9)] += 1.0;
                cols[(x / (w / 10)).min(9)] += 1.0;
            }
        }
    }
    let max = 10f64.log2();
    50.0 * (entropy(&rows) / max + entropy(&cols) / max)
}

// ---------------------------------------------------------------------- cnn

/// Direct valid-mode strided correlation with mean subtraction and bias.
pub fn conv(
    img: &RasterImage,
    kernels: &[f32],
    bias: &[f32],
    means: [f32; 3],
    stride: usize,
    rectify: bool,
) -> Vec<Vec<f64>> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let px = pixels(img);
    let (ow, oh) = ((w - 11) / stride + 1, (h - 11) / stride + 1);
    let mut out = vec![vec![0.0; ow * oh]; bias.len()];
    for (k, map) in out.iter_mut().enumerate() {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = bias[k] as f64;
                for c in 0..3 {
                    for ky in 0..11 {
                        for kx in 0..11 {
                            let v = px[(oy * stride + ky) * w + ox * stride + kx][c] as f64 - means[c] as f64;
                            acc += kernels[k * 363 + (c * 11 + ky) * 11 + kx] as f64 * v;
                        }
                    }
                }
                map[oy * ow + ox] = if rectify { acc.max(0.0) } else { acc };
            }
        }
    }
    out
}

/// Max-pooled `n` x `n` grid with near-equal cells, larger cells last.
pub fn pool(map: &[f64], w: usize, h: usize, n: usize) -> Vec<f64> {
    let edges = |len: usize| -> Vec<usize> {
        let (base, extra) = (len / n, len % n);
        let mut e = vec![0];
        for i in 0..n {
            let size = base + usize::from(i >= n - extra);
            e.push(e[i] + size);
        }
        e
    };
    let (ex, ey) = (edges(w), edges(h));
    let mut out = Vec::new();
    for cy in 0..n {
        for cx in 0..n {
            let mut m = f64::NEG_INFINITY;
            for y in ey[cy]..ey[cy + 1] {
                for x in ex[cx]..ex[cx + 1] {
                    m = m.max(map[y * w + x]);
                }
            }
            out.push(m);
        }
    }
    out
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

// -------------------------------------------------------------------- edges

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    while i < 0 || i >= n {
        i = if i < 0 { -i - 1 } else { 2 * n - 1 - i };
    }
    i as usize
}

/// Spatial correlation of one kernel with a symmetric-reflect padded plane.
pub fn correlate(plane: &Plane, kernel: &[f64], radius: usize) -> Vec<f64> {
    let (w, h) = (plane.width, plane.height);
    let r = radius as isize;
    let side = 2 * radius + 1;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let k = kernel[(dy + r) as usize * side + (dx + r) as usize];
                    acc += k * plane.data[reflect(y as isize + dy, h) * w + reflect(x as isize + dx, w)];
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Pair-weight histogram by the plain double loop over edges.
pub fn pair_histogram(
    edges: &[Edge],
    classes: DifferenceClasses,
    weighting: PairWeighting,
    min_distance: f64,
) -> Vec<u128> {
    let max = edges.iter().map(|e| e.strength).fold(0.0, f64::max);
    let q: Vec<u128> = edges
        .iter()
        .map(|e| match weighting {
            PairWeighting::Unweighted => 1,
            PairWeighting::StrengthProduct => (e.strength / max * 16_777_216.0).round() as u128,
        })
        .collect();
    let n_classes = match classes {
        DifferenceClasses::Folded => ORIENTATIONS / 2 + 1,
        DifferenceClasses::Directed => ORIENTATIONS,
    };
    let mut hist = vec![0u128; n_classes];
    for i in 0..edges.len() {
        for j in 0..edges.len() {
            if i == j || (classes == DifferenceClasses::Folded && j < i) {
                continue;
            }
            let (a, b) = (&edges[i], &edges[j]);
            let dx = a.x as f64 - b.x as f64;
            let dy = a.y as f64 - b.y as f64;
            if (dx * dx + dy * dy).sqrt() < min_distance {
                continue;
            }
            let d = (a.orientation as i32 - b.orientation as i32).rem_euclid(ORIENTATIONS as i32) as usize;
            let class = match classes {
                DifferenceClasses::Folded => d.min(ORIENTATIONS - d),
                DifferenceClasses::Directed => d,
            };
            hist[class] += q[i] * q[j];
        }
    }
    hist
}

/// Radially averaged amplitude spectrum by a direct O(N^4) DFT.
pub fn radial_amplitude(plane: &Plane) -> Vec<f64> {
    let n = plane.width;
    let mut sums = vec![0.0; n / 2 + 1];
    let mut counts = vec![0.0; n / 2 + 1];
    for v in 0..n {
        for u in 0..n {
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..n {
                for x in 0..n {
                    let phase = -TAU * ((u * x + v * y) % n) as f64 / n as f64;
                    re += plane.data[y * n + x] * phase.cos();
                    im += plane.data[y * n + x] * phase.sin();
                }
            }
            let fx = if u <= n / 2 { u as f64 } else { u as f64 - n as f64 };
            let fy = if v <= n / 2 { v as f64 } else { v as f64 - n as f64 };
            let r = (fx * fx + fy * fy).sqrt().round() as usize;
            if r >= 1 && r <= n / 2 {
                sums[r] += (re * re + im * im).sqrt();
                counts[r] += 1.0;
            }
        }
    }
    (1..=n / 2).map(|r| sums[r] / counts[r]).collect()
}
