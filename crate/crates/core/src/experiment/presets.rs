use super::config::{parse_config_file, ExperimentConfig};
use crate::error::{Error, Result};

const PRESETS: [(&str, &str); 3] = [
    ("table1-desk", include_str!("../../../../presets/table1-desk.toml")),
    ("channels-contrast", include_str!("../../../../presets/channels-contrast.toml")),
    ("coarse-counts", include_str!("../../../../presets/coarse-counts.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown preset \"{name}\"")))?;
    parse_config_file(text)
}
