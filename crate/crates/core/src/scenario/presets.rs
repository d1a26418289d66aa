//! Preset catalog shipped inside the binary.

use crate::error::{Error, Result};
use crate::scenario::config::ScenarioConfig;

const DOCUMENTS: &[(&str, &str)] = &[
    ("A1-S1", include_str!("../../presets/A1-S1.json")),
    ("A1-S3", include_str!("../../presets/A1-S3.json")),
    ("A2-S1", include_str!("../../presets/A2-S1.json")),
    ("A2-S2", include_str!("../../presets/A2-S2.json")),
    ("A2-S3", include_str!("../../presets/A2-S3.json")),
    ("A3-S1", include_str!("../../presets/A3-S1.json")),
    ("A3-S3", include_str!("../../presets/A3-S3.json")),
    ("A4-S1", include_str!("../../presets/A4-S1.json")),
    ("A4-S2", include_str!("../../presets/A4-S2.json")),
    ("N1-A1-S3", include_str!("../../presets/N1-A1-S3.json")),
    ("N2-A1-S3", include_str!("../../presets/N2-A1-S3.json")),
    ("Q1", include_str!("../../presets/Q1.json")),
    ("Q2", include_str!("../../presets/Q2.json")),
    ("S1", include_str!("../../presets/S1.json")),
    ("S2", include_str!("../../presets/S2.json")),
    ("S3", include_str!("../../presets/S3.json")),
    ("all-finite", include_str!("../../presets/all-finite.json")),
    ("single-qubit-N1", include_str!("../../presets/single-qubit-N1.json")),
    ("single-qubit-N2", include_str!("../../presets/single-qubit-N2.json")),
    ("two-qubit-finite", include_str!("../../presets/two-qubit-finite.json")),
    ("witness", include_str!("../../presets/witness.json")),
];

/// Alternative names that resolve to an identical configuration.
const ALIASES: &[(&str, &str)] = &[("A1-S2", "A1-S1"), ("A3-S2", "A3-S1"), ("A4-S3", "A4-S2")];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub aliases: Vec<&'static str>,
    pub description: String,
}

/// Canonical name for `name`, following aliases; matching ignores case.
pub fn canonical_name(name: &str) -> Result<&'static str> {
    let name = name.trim();
    if let Some((_, canon)) = ALIASES.iter().find(|(a, _)| a.eq_ignore_ascii_case(name)) {
        return Ok(canon);
    }
    DOCUMENTS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(n, _)| *n)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let canon = canonical_name(name)?;
    let (_, text) = DOCUMENTS.iter().find(|(n, _)| *n == canon).expect("canonical names come from the table");
    ScenarioConfig::from_json(text)
}

pub fn list_presets() -> Result<Vec<PresetInfo>> {
    DOCUMENTS
        .iter()
        .map(|(name, text)| {
            let cfg = ScenarioConfig::from_json(text)?;
            Ok(PresetInfo {
                name,
                aliases: ALIASES.iter().filter(|(_, c)| c == name).map(|(a, _)| *a).collect(),
                description: cfg.description,
            })
        })
        .collect()
}
