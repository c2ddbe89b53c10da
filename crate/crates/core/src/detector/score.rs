use chrono::NaiveDate;
use rayon::prelude::*;

use super::baseline::IntradayBaseline;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{ExceedanceDay, ExceedancePanel};

/// Co-movement score of one day: `x = n * (n - mean) / std`.
///
/// `nprime` and `score` are `None` at samples the baseline cannot score.
#[derive(Debug, Clone, PartialEq)]
pub struct ComovementSeries<F> {
    pub date: NaiveDate,
    pub step: usize,
    pub half_day: bool,
    pub rate: Vec<F>,
    pub nprime: Vec<Option<F>>,
    pub score: Vec<Option<F>>,
}

impl<F: Scalar> ComovementSeries<F> {
    pub fn samples(&self) -> usize {
        self.rate.len()
    }

    /// Largest defined score of the day.
    pub fn peak(&self) -> Option<F> {
        self.score
            .iter()
            .flatten()
            .copied()
            .fold(None, |acc: Option<F>, x| Some(acc.map_or(x, |a| a.max(x))))
    }
}

pub fn comovement_score<F: Scalar>(
    day: &ExceedanceDay<F>,
    step: usize,
    baseline: &IntradayBaseline<F>,
) -> Result<ComovementSeries<F>> {
    if day.samples > baseline.len() {
        return Err(Error::InvalidParameter(format!(
            "day {} has {} samples, baseline covers {}",
            day.date,
            day.samples,
            baseline.len()
        )));
    }
    if step != baseline.step {
        return Err(Error::InvalidParameter(format!(
            "day sampled every {step} minutes, baseline every {}",
            baseline.step
        )));
    }
    let mut nprime = vec![None; day.samples];
    let mut score = vec![None; day.samples];
    if day.present > 0 {
        for k in 0..day.samples {
            if baseline.usable(k) {
                let n = day.rate[k];
                let z = (n - baseline.mean_rate[k]) / baseline.std_rate[k];
                nprime[k] = Some(z);
                score[k] = Some(n * z);
            }
        }
    }
    Ok(ComovementSeries {
        date: day.date,
        step,
        half_day: day.half_day,
        rate: day.rate.clone(),
        nprime,
        score,
    })
}

/// Scores every day of the panel; output order follows the panel.
pub fn score_panel<F: Scalar>(
    panel: &ExceedancePanel<F>,
    baseline: &IntradayBaseline<F>,
) -> Result<Vec<ComovementSeries<F>>> {
    panel
        .days
        .par_iter()
        .map(|d| comovement_score(d, panel.step, baseline))
        .collect()
}
