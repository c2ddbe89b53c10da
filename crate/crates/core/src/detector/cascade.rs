use super::score::ComovementSeries;
use crate::scalar::Scalar;

/// Default maximal gap, in minutes, between consecutive cascade members.
pub const DEFAULT_CASCADE_GAP: usize = 60;

/// A run of above-threshold samples whose consecutive gaps are at most the
/// cascade gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade<F> {
    /// Sample indices, ascending.
    pub members: Vec<usize>,
    pub scores: Vec<F>,
    pub weight: F,
}

impl<F: Scalar> Cascade<F> {
    /// Member with the largest score; the earliest wins ties.
    pub fn peak(&self) -> (usize, F) {
        let mut best = 0;
        for i in 1..self.scores.len() {
            if self.scores[i] > self.scores[best] {
                best = i;
            }
        }
        (self.members[best], self.scores[best])
    }
}

/// Groups samples with `x > x_c` left to right; a gap strictly longer than
/// `max_gap_minutes` starts a new cascade.
pub fn find_cascades<F: Scalar>(
    series: &ComovementSeries<F>,
    x_c: F,
    max_gap_minutes: usize,
) -> Vec<Cascade<F>> {
    let mut out: Vec<Cascade<F>> = Vec::new();
    let mut last: Option<usize> = None;
    for (k, x) in series.score.iter().enumerate() {
        let Some(x) = *x else { continue };
        if !(x > x_c) {
            continue;
        }
        let split = match last {
            Some(prev) => (k - prev) * series.step > max_gap_minutes,
            None => true,
        };
        if split {
            out.push(Cascade {
                members: Vec::new(),
                scores: Vec::new(),
                weight: F::zero(),
            });
        }
        let c = out.last_mut().expect("cascade opened above");
        c.members.push(k);
        c.scores.push(x);
        c.weight += x;
        last = Some(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn series_with(len: usize, hits: &[(usize, f64)]) -> ComovementSeries<f64> {
        let mut score = vec![Some(0.0); len];
        score[0] = None;
        for &(k, x) in hits {
            score[k] = Some(x);
        }
        ComovementSeries {
            date: NaiveDate::from_ymd_opt(2002, 1, 11).unwrap(),
            step: 1,
            half_day: false,
            rate: vec![0.0; len],
            nprime: vec![None; len],
            score,
        }
    }

    fn members(cs: &[Cascade<f64>]) -> Vec<Vec<usize>> {
        cs.iter().map(|c| c.members.clone()).collect()
    }

    #[test]
    fn gap_rule() {
        let s = series_with(390, &[(100, 2.0), (130, 2.0), (220, 2.0)]);
        assert_eq!(members(&find_cascades(&s, 1.0, 60)), vec![vec![100, 130], vec![220]]);
    }

    #[test]
    fn gap_boundary_is_strict() {
        let s = series_with(390, &[(10, 2.0), (70, 2.0), (131, 2.0)]);
        assert_eq!(members(&find_cascades(&s, 1.0, 60)), vec![vec![10, 70], vec![131]]);
    }

    #[test]
    fn nothing_above_threshold() {
        let s = series_with(390, &[(50, 1.0), (60, 0.5)]);
        assert!(find_cascades(&s, 1.0, 60).is_empty());
    }

    #[test]
    fn weight_is_score_sum() {
        let s = series_with(390, &[(5, 1.5), (6, 2.5)]);
        let c = find_cascades(&s, 1.0, 60);
        assert_eq!(c[0].weight, 4.0);
        assert_eq!(c[0].peak(), (6, 2.5));
    }

    #[test]
    fn gap_measured_in_minutes_at_coarse_step() {
        let mut s = series_with(78, &[(10, 2.0), (22, 2.0), (35, 2.0)]);
        s.step = 5;
        // gaps 60 and 65 minutes
        assert_eq!(members(&find_cascades(&s, 1.0, 60)), vec![vec![10, 22], vec![35]]);
    }
}
