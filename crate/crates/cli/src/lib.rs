//! Pipeline orchestration, configuration, table rendering and figure-data
//! export behind the `newsvol` binary.

pub mod config;
pub mod export;
pub mod pipeline;
pub mod report;

pub use config::{ConfigLayer, PipelineConfig};
pub use export::{export_figure_data, FigureData, FigureKind};
pub use pipeline::{run_pipeline, PipelineError, ReportBundle, Stage};
pub use report::{render_coefficient_table, CoefficientTable, TableStyle};
