//! Magnitude at which the fitted decay exponent changes sign.

use serde::Serialize;

use crate::scalar::Scalar;
use crate::stats::mean;

pub const MIN_CROSSOVER_ROWS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeBin<F> {
    pub lo: F,
    pub hi: F,
    pub rows: usize,
    pub omega: Option<F>,
    pub alpha: Option<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverScan<F> {
    pub bins: Vec<MagnitudeBin<F>>,
    /// Lower edge of the first bin with mean exponent `>= 0` following a bin
    /// with a negative one.
    pub m_x: Option<F>,
}

/// Bins `(M, omega, alpha)` rows on the uniform magnitude grid `edges` and
/// locates the first negative-to-non-negative change of the mean exponent.
/// Returns `None` for fewer than [`MIN_CROSSOVER_ROWS`] rows.
pub fn crossover_scan<F: Scalar>(rows: &[(F, F, F)], edges: &[F]) -> Option<CrossoverScan<F>> {
    if rows.len() < MIN_CROSSOVER_ROWS || edges.len() < 2 {
        return None;
    }
    let nb = edges.len() - 1;
    let mut omega = vec![Vec::new(); nb];
    let mut alpha = vec![Vec::new(); nb];
    for &(m, o, a) in rows {
        if let Some(b) = crate::stats::bin_index(edges, m) {
            omega[b].push(o);
            alpha[b].push(a);
        }
    }
    let bins: Vec<MagnitudeBin<F>> = (0..nb)
        .map(|b| MagnitudeBin {
            lo: edges[b],
            hi: edges[b + 1],
            rows: omega[b].len(),
            omega: mean(&omega[b]),
            alpha: mean(&alpha[b]),
        })
        .collect();
    let mut prev_negative = false;
    let mut m_x = None;
    for b in &bins {
        let Some(o) = b.omega else { continue };
        if o < F::zero() {
            prev_negative = true;
        } else if prev_negative {
            m_x = Some(b.lo);
            break;
        }
    }
    Some(CrossoverScan { bins, m_x })
}

/// `bins` equal-width magnitude bins over `[lo, hi]`.
pub fn magnitude_grid<F: Scalar>(lo: F, hi: F, bins: usize) -> Vec<F> {
    let w = (hi - lo) / F::of_usize(bins.max(1));
    (0..=bins.max(1)).map(|i| lo + w * F::of_usize(i)).collect()
}
