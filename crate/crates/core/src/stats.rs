//! Sample moments and order statistics shared across modules.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Central moments `(m2, m3, m4)` with divisor `n`.
pub fn central_moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Sample variance with divisor `n - 1`.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// False for a constant series, including one whose computed spread is
/// only rounding noise around the mean.
pub fn has_variation(xs: &[f64]) -> bool {
    xs.len() > 1 && sample_std(xs) > 1e-12 * mean(xs).abs().max(1.0)
}

/// Moment-ratio skewness `m3 / m2^(3/2)`; `None` for zero variance.
pub fn skewness(xs: &[f64]) -> Option<f64> {
    let (m2, m3, _) = central_moments(xs);
    has_variation(xs).then(|| m3 / m2.powf(1.5))
}

/// Non-excess kurtosis `m4 / m2^2` (3 for the normal); `None` for zero variance.
pub fn kurtosis(xs: &[f64]) -> Option<f64> {
    let (m2, _, m4) = central_moments(xs);
    has_variation(xs).then(|| m4 / (m2 * m2))
}

/// Linearly interpolated quantile of already sorted data (Hyndman-Fan type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}
