//! Detection of intraday market shocks in minute-resolution volatility
//! panels, and estimation of the Omori, productivity and Bath laws that
//! describe the activity around them.
//!
//! The numerical code is generic over [`Scalar`] (`f32`/`f64`); the aliases
//! at the bottom of this file fix it to `f64`, which is what the pipeline
//! uses.

pub mod detector;
pub mod error;
pub mod laws;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type MinuteGrid64 = series::MinuteGrid<f64>;
pub type VolatilityPanel64 = series::VolatilityPanel<f64>;
pub type NormalizedVolatility64 = series::NormalizedVolatility<f64>;
pub type ExceedancePanel64 = series::ExceedancePanel<f64>;
pub type IntradayBaseline64 = detector::IntradayBaseline<f64>;
pub type ComovementSeries64 = detector::ComovementSeries<f64>;
pub type DetectorParams64 = detector::DetectorParams<f64>;
pub type ShockRecord64 = detector::ShockRecord<f64>;
pub type ResponseCurve64 = laws::ResponseCurve<f64>;
pub type OmoriFit64 = laws::OmoriFit<f64>;
pub type ShockLawRow64 = laws::ShockLawRow<f64>;
pub type StockLawRow64 = laws::StockLawRow<f64>;
pub type LawTables64 = laws::LawTables<f64>;
pub type EnsembleLaws64 = laws::EnsembleLaws<f64>;
pub type EmpiricalPdf64 = synth::EmpiricalPdf<f64>;
