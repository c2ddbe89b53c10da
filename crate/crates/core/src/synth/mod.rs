//! Synthetic panels with known ground truth, the intraday shuffle null
//! model, and histogram densities.

pub mod generator;
pub mod pdf;
pub mod render;
pub mod shuffle;
pub mod spec;

pub use generator::{
    generate_ensemble, generate_omori_day, synthetic_symbols, trading_dates, DayTruth, SideTruth,
    SyntheticDay, SyntheticPanel, MAX_REDRAWS,
};
pub use pdf::{empirical_pdf, log_pdf, EmpiricalPdf, DEFAULT_BINS_PER_DECADE, DEFAULT_PDF_HI, DEFAULT_PDF_LO};
pub use render::{render_grid, RenderSpec};
pub use shuffle::{apply_permutation, intraday_permutation, shuffle_intraday};
pub use spec::{BathLaw, GeneratorSpec, ProductivityLaw, ShockPlacement};
