//! Scenario runner for the `simulate` binary: configuration, the run
//! pipeline and slice export.

pub mod config;
pub mod export;
pub mod run;

pub use config::{parse_config, resolve, ConfigError, Overrides, RunConfig, ScenarioKind};
pub use run::{build_field, manifest_json, run, RunError, RunManifest, MANIFEST_FILE, MARGINAL_THRESHOLD};
