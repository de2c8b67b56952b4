//! Command-line front end for the Cheshire cat simulator: presets, config
//! resolution and the `shots.csv` / `summary.json` outputs.

pub mod config;
pub mod error;
pub mod output;
pub mod preset;
pub mod run;
pub mod summary;

pub use config::{parse_config, ExperimentConfig, Preset};
pub use error::{RunError, UsageError};
pub use run::{run_preset, RunOutput};
