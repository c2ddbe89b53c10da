//! Batch pipeline behind the `shocklab` command: ingestion of minute-bar
//! panels, shock detection, law fits, reports and synthetic panels.

pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod simulate;
pub mod table1;

pub use config::{PipelineConfig, SimulationConfig};
pub use error::{ExitKind, ToolError, ToolResult};
pub use pipeline::{run_pipeline, Inputs, RunManifest, RunSummary, Stage};
pub use simulate::simulate;
