//! Comparison of computed feature reports against stored targets.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::presets::canonical_name;
use crate::scenario::run::{run_preset, FeatureValue, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|value - expected| <= tolerance`.
    #[default]
    Within,
    /// `value > expected`.
    Above,
    /// `value < expected`.
    Below,
    /// The quantity does not exist (e.g. no steady state was detected).
    Absent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub preset: String,
    pub quantity: String,
    #[serde(default)]
    pub comparison: Comparison,
    #[serde(default)]
    pub expected: f64,
    #[serde(default)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsFile {
    pub schema_version: u32,
    #[serde(default)]
    pub targets: Vec<Target>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub target: Target,
    pub computed: FeatureValue,
    pub pass: bool,
    pub message: String,
}

impl TargetsFile {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 1 {
            return Err(Error::Targets(format!("schema_version {} is not supported (expected 1)", self.schema_version)));
        }
        for t in &self.targets {
            canonical_name(&t.preset).map_err(|_| Error::Targets(format!("unknown preset `{}`", t.preset)))?;
            if !(t.expected.is_finite() && t.tolerance >= 0.0) {
                return Err(Error::Targets(format!("{}/{}: expected and tolerance must be finite, tolerance >= 0", t.preset, t.quantity)));
            }
        }
        Ok(())
    }
}

pub fn parse_targets(text: &str) -> Result<TargetsFile> {
    let file: TargetsFile = serde_json::from_str(text).map_err(|e| Error::Targets(e.to_string()))?;
    file.validate()?;
    Ok(file)
}

pub fn load_targets(path: &Path) -> Result<TargetsFile> {
    parse_targets(&std::fs::read_to_string(path)?)
}

fn judge(target: &Target, computed: &FeatureValue) -> (bool, String) {
    let shown = match computed {
        FeatureValue::Number(v) => format!("{v:.6}"),
        FeatureValue::Text(s) => s.clone(),
        FeatureValue::Missing => "NONE".into(),
    };
    let value = computed.as_number();
    let (pass, want) = match target.comparison {
        Comparison::Within => (
            value.is_some_and(|v| (v - target.expected).abs() <= target.tolerance),
            format!("{} +- {}", target.expected, target.tolerance),
        ),
        Comparison::Above => (value.is_some_and(|v| v > target.expected), format!("> {}", target.expected)),
        Comparison::Below => (value.is_some_and(|v| v < target.expected), format!("< {}", target.expected)),
        Comparison::Absent => (matches!(computed, FeatureValue::Missing), "NONE".into()),
    };
    let diff = match (value, target.comparison) {
        (Some(v), Comparison::Within | Comparison::Above | Comparison::Below) => {
            format!(" (diff {:+.6})", v - target.expected)
        }
        _ => String::new(),
    };
    (pass, format!("{}/{}: computed {shown}, expected {want}{diff}", target.preset, target.quantity))
}

/// Marks every target against the runs keyed by canonical preset name.
pub fn compare_regression(runs: &BTreeMap<String, RunOutput>, targets: &TargetsFile) -> Result<Vec<RegressionRow>> {
    targets.validate()?;
    targets
        .targets
        .iter()
        .map(|t| {
            let canon = canonical_name(&t.preset)?;
            let run = runs.get(canon).ok_or_else(|| Error::Targets(format!("no run for preset `{canon}`")))?;
            let computed = run
                .feature(&t.quantity)
                .ok_or_else(|| Error::Targets(format!("unknown quantity `{}`", t.quantity)))?;
            let (pass, message) = judge(t, &computed);
            Ok(RegressionRow { target: t.clone(), computed, pass, message })
        })
        .collect()
}

/// Runs every preset named in `targets` (concurrently) and compares.
pub fn run_regression<S: AsRef<str> + Sync>(targets: &TargetsFile, overrides: &[S]) -> Result<Vec<RegressionRow>> {
    targets.validate()?;
    let mut names: Vec<&'static str> = targets.targets.iter().map(|t| canonical_name(&t.preset)).collect::<Result<_>>()?;
    names.sort_unstable();
    names.dedup();
    let runs: BTreeMap<String, RunOutput> = names
        .par_iter()
        .map(|n| Ok((n.to_string(), run_preset(n, overrides)?)))
        .collect::<Result<_>>()?;
    compare_regression(&runs, targets)
}
