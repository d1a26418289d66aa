//! Preset catalog, configuration, runs, noise sweeps and regression checks.

pub mod config;
pub mod presets;
pub mod regress;
pub mod run;
pub mod sweep;

pub use config::{ScenarioConfig, OVERRIDABLE, SCHEMA_VERSION};
pub use presets::{canonical_name, list_presets, preset, PresetInfo};
pub use regress::{compare_regression, load_targets, parse_targets, run_regression, Comparison, RegressionRow, Target, TargetsFile};
pub use run::{run_config, run_preset, write_atomic, FeatureValue, RunOutput};
pub use sweep::{noiseless_reference, sweep_noise, Criterion, SweepPoint, SweepResult, Threshold};
