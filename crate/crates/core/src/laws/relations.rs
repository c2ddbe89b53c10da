use serde::Serialize;

use crate::scalar::Scalar;
use crate::stats::{ols, pearson};

/// Fewest rows with both sides fitted a relation is reported for.
pub const MIN_RELATION_ROWS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationPair {
    Omega,
    Alpha,
    Productivity,
}

impl RelationPair {
    pub const ALL: [RelationPair; 3] = [Self::Omega, Self::Alpha, Self::Productivity];

    pub fn label(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::Alpha => "alpha",
            Self::Productivity => "P",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relation<F> {
    pub pair: RelationPair,
    pub horizon: usize,
    pub correlation: F,
    /// Least-squares slope of the after value on the before value.
    pub slope: F,
    pub n: usize,
}

/// One shock's before and after parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeforeAfter<F> {
    pub omega: Option<(F, F)>,
    pub alpha: Option<(F, F)>,
    pub productivity: (F, F),
}

impl<F: Scalar> BeforeAfter<F> {
    fn pair(&self, p: RelationPair) -> Option<(F, F)> {
        match p {
            RelationPair::Omega => self.omega,
            RelationPair::Alpha => self.alpha,
            RelationPair::Productivity => Some(self.productivity),
        }
    }
}

/// Pearson correlation and slope for each pair, over rows where both sides
/// are available. Pairs with fewer than [`MIN_RELATION_ROWS`] rows, or no
/// spread, are left out.
pub fn before_after_relations<F: Scalar>(rows: &[BeforeAfter<F>], horizon: usize) -> Vec<Relation<F>> {
    RelationPair::ALL
        .iter()
        .filter_map(|&pair| {
            let (xs, ys): (Vec<F>, Vec<F>) = rows.iter().filter_map(|r| r.pair(pair)).unzip();
            if xs.len() < MIN_RELATION_ROWS {
                return None;
            }
            let line = ols(&xs, &ys)?;
            Some(Relation {
                pair,
                horizon,
                correlation: pearson(&xs, &ys)?,
                slope: line.slope,
                n: xs.len(),
            })
        })
        .collect()
}
