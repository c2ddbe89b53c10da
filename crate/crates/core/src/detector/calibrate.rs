use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synth::EmpiricalPdf;

/// Threshold used when the pdf comparison shows no divergence.
pub const DEFAULT_XC: f64 = 1.0;
/// Required ratio of structured to shuffled density.
pub const DEFAULT_DIVERGENCE_RATIO: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCalibration<F> {
    pub x_c: F,
    /// Lower edge of the divergent tail, when one was found.
    pub divergence_edge: Option<F>,
    pub warning: Option<String>,
}

/// Finds the smallest bin edge above which the structured pdf exceeds the
/// shuffled pdf by at least `ratio` in every non-empty bin.
///
/// Bins empty in both pdfs are ignored. Falls back to `default` with a
/// warning when even the top non-empty bin fails the test.
pub fn calibrate_threshold<F: Scalar>(
    structured: &EmpiricalPdf<F>,
    shuffled: &EmpiricalPdf<F>,
    ratio: F,
    default: F,
) -> Result<ThresholdCalibration<F>> {
    if structured.edges != shuffled.edges {
        return Err(Error::InvalidParameter(
            "pdfs must share identical bin edges".into(),
        ));
    }
    let mut edge = None;
    for i in (0..structured.bins()).rev() {
        let (x, sh) = (structured.density[i], shuffled.density[i]);
        if x == F::zero() && sh == F::zero() {
            continue;
        }
        if x > F::zero() && x >= ratio * sh {
            edge = Some(structured.edges[i]);
        } else {
            break;
        }
    }
    Ok(match edge {
        Some(e) => ThresholdCalibration {
            x_c: e,
            divergence_edge: Some(e),
            warning: None,
        },
        None => ThresholdCalibration {
            x_c: default,
            divergence_edge: None,
            warning: Some(format!(
                "no divergence between structured and shuffled pdfs; using x_c = {default}"
            )),
        },
    })
}
