//! Intraday shuffle null model: every symbol-day's values are permuted
//! independently, which keeps their distribution and destroys clustering.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::series::{NormalizedVolatility, FIRST_SAMPLE};

/// Permutation used for symbol `symbol` on day `day`: entry `k` is the
/// sample whose value lands at `k`. Samples below [`FIRST_SAMPLE`] stay put.
pub fn intraday_permutation(seed: u64, day: usize, symbol: usize, len: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    if len > FIRST_SAMPLE {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((day as u64) << 32) | symbol as u64);
        perm[FIRST_SAMPLE..].shuffle(&mut rng);
    }
    perm
}

pub fn apply_permutation<T: Copy>(values: &[T], perm: &[usize]) -> Vec<T> {
    perm.iter().map(|&i| values[i]).collect()
}

/// Shuffled copy of `nv`; scale and pattern are carried over unchanged.
pub fn shuffle_intraday<F: Scalar>(nv: &NormalizedVolatility<F>, seed: u64) -> NormalizedVolatility<F> {
    let mut out = nv.clone();
    out.panel.days.par_iter_mut().enumerate().for_each(|(d, day)| {
        for (j, s) in day.series.iter_mut().enumerate() {
            if let Some(s) = s {
                *s = apply_permutation(s, &intraday_permutation(seed, d, j, s.len()));
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_is_deterministic_and_fixes_first_sample() {
        let a = intraday_permutation(7, 3, 11, 390);
        assert_eq!(a, intraday_permutation(7, 3, 11, 390));
        assert_ne!(a, intraday_permutation(7, 3, 12, 390));
        assert_ne!(a, intraday_permutation(8, 3, 11, 390));
        assert_eq!(a[0], 0);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..390).collect::<Vec<_>>());
    }

    #[test]
    fn tiny_series() {
        assert_eq!(intraday_permutation(1, 0, 0, 0), Vec::<usize>::new());
        assert_eq!(intraday_permutation(1, 0, 0, 1), vec![0]);
    }
}
