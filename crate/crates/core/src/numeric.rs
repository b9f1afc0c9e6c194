//! Small numeric helpers shared across the metric modules.

/// Shannon entropy in bits of a histogram of nonnegative weights. Empty bins
/// contribute nothing; an all-zero histogram has entropy 0.
pub fn entropy_bits(hist: &[f64]) -> f64 {
    let total: f64 = hist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let h: f64 = hist
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Arithmetic mean, accumulated relative to the first value so a constant
/// input returns that value exactly.
pub fn mean(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return f64::NAN;
    };
    first + values.iter().map(|v| v - first).sum::<f64>() / values.len() as f64
}

/// Population variance (divides by N).
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64]) -> f64 {
    variance(values).sqrt()
}

/// Median; the mean of the two middle values for even lengths. NaN for empty input.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Normalizes to unit sum; `None` when the sum is not positive.
pub fn normalized(hist: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = hist.iter().sum();
    (total > 0.0).then(|| hist.iter().map(|v| v / total).collect())
}

/// Histogram intersection kernel of two histograms (callers normalize first).
pub fn intersection(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn residuals(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        x.iter().zip(y).map(|(a, b)| b - self.predict(*a)).collect()
    }
}

/// Least-squares fit; `None` with fewer than two distinct x values.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Cook's distance of every point under the simple linear fit `fit`.
pub fn cooks_distance(x: &[f64], y: &[f64], fit: &LineFit) -> Vec<f64> {
    let n = x.len();
    let p = 2.0;
    let mx = mean(x);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let resid = fit.residuals(x, y);
    let s2 = resid.iter().map(|e| e * e).sum::<f64>() / (n as f64 - p);
    x.iter()
        .zip(&resid)
        .map(|(a, e)| {
            let h = 1.0 / n as f64 + (a - mx) * (a - mx) / sxx;
            if s2 <= 0.0 {
                0.0
            } else {
                e * e / (p * s2) * h / ((1.0 - h) * (1.0 - h))
            }
        })
        .collect()
}

/// Splits `len` into `parts` contiguous ranges of size `len / parts`, the last
/// range absorbing the remainder.
pub fn split_remainder_last(len: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let base = len / parts;
    (0..parts)
        .map(|i| {
            let start = i * base;
            let end = if i + 1 == parts { len } else { start + base };
            start..end
        })
        .collect()
}

/// Splits `len` into `parts` ranges whose sizes differ by at most one; the
/// `len % parts` larger ranges come last.
pub fn split_even(len: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let (base, extra) = (len / parts, len % parts);
    let small = parts - extra;
    (0..parts)
        .map(|i| {
            let start = i * base + i.saturating_sub(small);
            let size = base + usize::from(i >= small);
            start..start + size
        })
        .collect()
}
