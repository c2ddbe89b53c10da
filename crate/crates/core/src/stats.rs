//! Small descriptive-statistics and regression kernels.
//!
//! Everything sums left to right over the slice it is handed, so results are
//! reproducible bit for bit for a given input order.

use crate::scalar::Scalar;

pub fn mean<F: Scalar>(xs: &[F]) -> Option<F> {
    if xs.is_empty() {
        return None;
    }
    let mut acc = F::zero();
    for &x in xs {
        acc += x;
    }
    Some(acc / F::of_usize(xs.len()))
}

/// Population standard deviation (divides by `n`), two-pass.
pub fn std_dev<F: Scalar>(xs: &[F]) -> Option<F> {
    let m = mean(xs)?;
    let mut acc = F::zero();
    for &x in xs {
        let d = x - m;
        acc += d * d;
    }
    Some((acc / F::of_usize(xs.len())).sqrt())
}

/// Result of an ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<F> {
    pub slope: F,
    pub intercept: F,
    /// Standard error of the slope; zero for an exact fit, NaN with two points.
    pub stderr_slope: F,
    /// Pearson correlation between x and y; NaN when y has no spread.
    pub r: F,
    pub n: usize,
}

/// Ordinary least squares. Returns `None` with fewer than two points or when
/// all x coincide.
pub fn ols<F: Scalar>(xs: &[F], ys: &[F]) -> Option<LineFit<F>> {
    assert_eq!(xs.len(), ys.len(), "ols: x and y lengths differ");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxx, mut sxy, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= F::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r = if syy > F::zero() {
        sxy / (sxx * syy).sqrt()
    } else {
        F::nan()
    };
    let stderr_slope = if n > 2 {
        let mut rss = F::zero();
        for (&x, &y) in xs.iter().zip(ys) {
            let e = y - (intercept + slope * x);
            rss += e * e;
        }
        (rss / F::of_usize(n - 2) / sxx).sqrt()
    } else {
        F::nan()
    };
    Some(LineFit {
        slope,
        intercept,
        stderr_slope,
        r,
        n,
    })
}

/// Pearson correlation coefficient; `None` if either side has no spread.
pub fn pearson<F: Scalar>(xs: &[F], ys: &[F]) -> Option<F> {
    assert_eq!(xs.len(), ys.len(), "pearson: x and y lengths differ");
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxx, mut sxy, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= F::zero() || syy <= F::zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Logarithmically spaced bin edges covering `[lo, hi]` with
/// `bins_per_decade` bins per factor of ten. The last edge is exactly `hi`.
pub fn log_edges<F: Scalar>(lo: F, hi: F, bins_per_decade: usize) -> Vec<F> {
    assert!(lo > F::zero() && hi > lo && bins_per_decade > 0);
    let decades = (hi / lo).log10();
    let nbins = (decades * F::of_usize(bins_per_decade))
        .round()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let llo = lo.log10();
    let step = decades / F::of_usize(nbins);
    let mut edges: Vec<F> = (0..=nbins)
        .map(|i| F::ten().powf(llo + step * F::of_usize(i)))
        .collect();
    edges[0] = lo;
    edges[nbins] = hi;
    edges
}

/// Index of the half-open bin `[edges[i], edges[i+1])` holding `x`; the last
/// bin is closed on the right.
pub fn bin_index<F: Scalar>(edges: &[F], x: F) -> Option<usize> {
    let n = edges.len();
    if n < 2 || !(x >= edges[0]) || x > edges[n - 1] {
        return None;
    }
    if x == edges[n - 1] {
        return Some(n - 2);
    }
    // first edge strictly greater than x
    let pos = edges.partition_point(|&e| e <= x);
    Some(pos - 1)
}

/// Equal-count partition of `0..n` into at most `bins` contiguous chunks.
pub fn equal_count_ranges(n: usize, bins: usize) -> Vec<std::ops::Range<usize>> {
    if n == 0 || bins == 0 {
        return Vec::new();
    }
    let bins = bins.min(n);
    (0..bins)
        .map(|b| (b * n / bins)..((b + 1) * n / bins))
        .filter(|r| !r.is_empty())
        .collect()
}
