//! Scenario files, report bundles, plot data and the `platoon` command line
//! on top of [`platoon_core`].
//!
//! Scenarios are TOML (see [`scenario`]), reports are JSON and plot data is
//! CSV with a header row. Numbers in text output carry
//! [`format::DEFAULT_PRECISION`] significant digits unless `--precision`
//! says otherwise.

pub mod cli;
mod error;
pub mod format;
pub mod plot;
pub mod report;
pub mod scenario;

pub use error::{OutputError, ScenarioError};
pub use plot::{emit_plot_data, write_trace, PlotKind, PlotSource};
pub use report::{full_report, ReportBundle};
pub use scenario::{parse_scenario, preset, ParsedScenario, ScenarioFile, PRESETS};
