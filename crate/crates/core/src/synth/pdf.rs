use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::{bin_index, log_edges};

/// Lower end of the default logarithmic binning range.
pub const DEFAULT_PDF_LO: f64 = 1e-3;
/// Upper end of the default logarithmic binning range.
pub const DEFAULT_PDF_HI: f64 = 1e2;
pub const DEFAULT_BINS_PER_DECADE: usize = 20;
/// Smallest sample an empirical pdf is estimated from.
pub const MIN_PDF_SAMPLES: usize = 100;

/// Histogram density on fixed bin edges.
///
/// Densities are normalized over the values that fall inside the binning
/// range, so they integrate to one whenever any value does. Values below the
/// first edge (including every non-positive value) and above the last edge
/// are counted separately.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPdf<F> {
    pub edges: Vec<F>,
    pub counts: Vec<usize>,
    pub density: Vec<F>,
    pub underflow: usize,
    pub overflow: usize,
}

impl<F: Scalar> EmpiricalPdf<F> {
    pub fn in_range(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn total(&self) -> usize {
        self.in_range() + self.underflow + self.overflow
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Sum of density times bin width.
    pub fn integral(&self) -> F {
        let mut acc = F::zero();
        for (i, &d) in self.density.iter().enumerate() {
            acc += d * (self.edges[i + 1] - self.edges[i]);
        }
        acc
    }

    /// Geometric bin centres.
    pub fn centres(&self) -> Vec<F> {
        self.edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect()
    }
}

/// Density of `values` on the given bin edges.
pub fn empirical_pdf<F: Scalar>(values: &[F], edges: &[F]) -> Result<EmpiricalPdf<F>> {
    if values.len() < MIN_PDF_SAMPLES {
        return Err(Error::Insufficient(format!(
            "pdf needs at least {MIN_PDF_SAMPLES} values, got {}",
            values.len()
        )));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("bin edges must be strictly increasing".into()));
    }
    let nb = edges.len() - 1;
    let mut counts = vec![0usize; nb];
    let (mut underflow, mut overflow) = (0, 0);
    for &v in values {
        match bin_index(edges, v) {
            Some(i) => counts[i] += 1,
            None if v > edges[nb] => overflow += 1,
            None => underflow += 1,
        }
    }
    let in_range: usize = counts.iter().sum();
    let density = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if in_range == 0 {
                F::zero()
            } else {
                F::of_usize(c) / (F::of_usize(in_range) * (edges[i + 1] - edges[i]))
            }
        })
        .collect();
    Ok(EmpiricalPdf {
        edges: edges.to_vec(),
        counts,
        density,
        underflow,
        overflow,
    })
}

/// [`empirical_pdf`] on the default logarithmic bins, `[1e-3, 1e2]` with 20
/// bins per decade.
pub fn log_pdf<F: Scalar>(values: &[F]) -> Result<EmpiricalPdf<F>> {
    let edges = log_edges(
        F::of(DEFAULT_PDF_LO),
        F::of(DEFAULT_PDF_HI),
        DEFAULT_BINS_PER_DECADE,
    );
    empirical_pdf(values, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_bin_spike() {
        let vals = vec![0.5f64; 150];
        let pdf = log_pdf(&vals).unwrap();
        let nonzero: Vec<usize> = (0..pdf.bins()).filter(|&i| pdf.counts[i] > 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_relative_eq!(pdf.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_positive_values_underflow() {
        let mut vals = vec![1.0f64; 100];
        vals.extend([0.0, -2.0, 1e-9, 1e6]);
        let pdf = log_pdf(&vals).unwrap();
        assert_eq!(pdf.underflow, 3);
        assert_eq!(pdf.overflow, 1);
        assert_eq!(pdf.total(), 104);
        assert_relative_eq!(pdf.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn too_few_values() {
        assert!(matches!(log_pdf(&[1.0f64; 99]), Err(Error::Insufficient(_))));
    }
}
