//! Response parameters of individual stocks against their trading activity.

use serde::Serialize;

use crate::scalar::Scalar;
use crate::stats::{bin_index, mean};

pub const DEFAULT_ACTIVITY_BINS: usize = 6;

/// Per-stock response values entering the activity profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivityRow<F> {
    /// Mean trades per minute over the whole period.
    pub activity: F,
    pub alpha_b: Option<F>,
    pub alpha_a: Option<F>,
    pub omega_b: Option<F>,
    pub omega_a: Option<F>,
    pub p_b: F,
    pub p_a: F,
    pub v1: F,
    pub v2_b: F,
    pub v2_a: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityBucket<F> {
    pub lo: F,
    pub hi: F,
    pub rows: usize,
    pub activity: F,
    pub alpha_b: Option<F>,
    pub alpha_a: Option<F>,
    pub omega_b: Option<F>,
    pub omega_a: Option<F>,
    pub p_b: F,
    pub p_a: F,
    pub v1: F,
    pub v2_b: F,
    pub v2_a: F,
}

fn mean_of<F: Scalar>(rows: &[&ActivityRow<F>], f: impl Fn(&ActivityRow<F>) -> Option<F>) -> Option<F> {
    let xs: Vec<F> = rows.iter().filter_map(|r| f(r)).collect();
    mean(&xs)
}

/// Buckets rows by activity on `bins` log-spaced intervals over the observed
/// range and averages every response value per non-empty bucket.
pub fn activity_profile<F: Scalar>(rows: &[ActivityRow<F>], bins: usize) -> Vec<ActivityBucket<F>> {
    let active: Vec<&ActivityRow<F>> = rows.iter().filter(|r| r.activity > F::zero()).collect();
    if active.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = active.iter().map(|r| r.activity).fold(F::infinity(), F::min);
    let hi = active.iter().map(|r| r.activity).fold(F::zero(), F::max);
    let edges = if hi > lo {
        let decades = (hi / lo).log10();
        let mut e: Vec<F> = (0..=bins)
            .map(|i| lo * F::ten().powf(decades * F::of_usize(i) / F::of_usize(bins)))
            .collect();
        e[bins] = hi;
        e
    } else {
        vec![lo, hi]
    };
    let nb = edges.len() - 1;
    let mut grouped: Vec<Vec<&ActivityRow<F>>> = vec![Vec::new(); nb];
    for r in active {
        let b = bin_index(&edges, r.activity).unwrap_or(nb - 1);
        grouped[b].push(r);
    }
    grouped
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_empty())
        .map(|(b, g)| ActivityBucket {
            lo: edges[b],
            hi: edges[b + 1],
            rows: g.len(),
            activity: mean_of(g, |r| Some(r.activity)).expect("non-empty"),
            alpha_b: mean_of(g, |r| r.alpha_b),
            alpha_a: mean_of(g, |r| r.alpha_a),
            omega_b: mean_of(g, |r| r.omega_b),
            omega_a: mean_of(g, |r| r.omega_a),
            p_b: mean_of(g, |r| Some(r.p_b)).expect("non-empty"),
            p_a: mean_of(g, |r| Some(r.p_a)).expect("non-empty"),
            v1: mean_of(g, |r| Some(r.v1)).expect("non-empty"),
            v2_b: mean_of(g, |r| Some(r.v2_b)).expect("non-empty"),
            v2_a: mean_of(g, |r| Some(r.v2_a)).expect("non-empty"),
        })
        .collect()
}
