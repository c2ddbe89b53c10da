//! Co-movement scoring, threshold calibration, cascade grouping and
//! main-shock selection.

pub mod baseline;
pub mod calibrate;
pub mod cascade;
pub mod resolution;
pub mod score;
pub mod select;

use rayon::prelude::*;

pub use baseline::{
    build_baseline, build_baseline_min_days, smooth_preserving_mass, IntradayBaseline,
    DEFAULT_SMOOTHING_WINDOW, MIN_BASELINE_DAYS,
};
pub use calibrate::{calibrate_threshold, ThresholdCalibration, DEFAULT_DIVERGENCE_RATIO, DEFAULT_XC};
pub use cascade::{find_cascades, Cascade, DEFAULT_CASCADE_GAP};
pub use resolution::{
    compare_resolutions, resolution_consistency, threshold_for_day_count, ResolutionRow,
    ResolutionTable,
};
pub use score::{comovement_score, score_panel, ComovementSeries};
pub use select::{
    detect_day, select_main_shock, RejectionReason, ShockRecord, ALT_EDGE_EXCLUSION,
    DEFAULT_EDGE_EXCLUSION,
};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::series::ExceedancePanel;

/// Detection settings; times are in minutes.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorParams<F> {
    pub x_c: F,
    pub cascade_gap: usize,
    pub edge_exclusion: usize,
    pub smoothing_window: usize,
    pub min_baseline_days: usize,
}

impl<F: Scalar> Default for DetectorParams<F> {
    fn default() -> Self {
        Self {
            x_c: F::of(DEFAULT_XC),
            cascade_gap: DEFAULT_CASCADE_GAP,
            edge_exclusion: DEFAULT_EDGE_EXCLUSION,
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            min_baseline_days: MIN_BASELINE_DAYS,
        }
    }
}

/// Everything detection produces for a panel.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionScan<F> {
    pub baseline: IntradayBaseline<F>,
    pub series: Vec<ComovementSeries<F>>,
    pub records: Vec<ShockRecord<F>>,
}

/// Baseline, scores and one [`ShockRecord`] per day, in panel order.
pub fn detect_panel<F: Scalar>(
    panel: &ExceedancePanel<F>,
    params: &DetectorParams<F>,
) -> Result<DetectionScan<F>> {
    let baseline =
        build_baseline_min_days(panel, params.smoothing_window, params.min_baseline_days)?;
    let series = score_panel(panel, &baseline)?;
    let records = series.par_iter().map(|s| detect_day(s, params)).collect();
    Ok(DetectionScan {
        baseline,
        series,
        records,
    })
}
