//! Config-driven experiment runs and their CSV/JSON reports.

mod config;
mod presets;
mod report;
mod run;

pub use config::{load_config_file, parse_config_file, CoefficientSpec, ExperimentConfig, Preconditioner, SplitSpec};
pub use presets::{preset, preset_names};
pub use report::{emit_report, format_sig, write_report, ReportFormat, ReportRow};
pub use run::{run, run_all, Pipeline};
