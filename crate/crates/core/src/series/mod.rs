//! Raw prices to normalized volatility, exceedance indicators and market
//! aggregates.

pub mod exceedance;
pub mod grid;
pub mod normalize;
pub mod volatility;

pub use exceedance::{exceedance_panel, ExceedanceDay, ExceedancePanel, DEFAULT_Q};
pub use grid::{GridDay, HalfDayCalendar, MinuteGrid, SymbolDay, REGULAR_SESSION_MINUTES};
pub use normalize::{normalize_and_detrend, DropReason, DroppedSymbol, NormalizedVolatility};
pub use volatility::{compute_volatility, VolDay, VolatilityPanel, FIRST_SAMPLE, SUPPORTED_STEPS};
