use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("scenario serialization failed: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] platoon_core::Error),
    #[error("invalid scenario: {0}")]
    Rule(String),
    #[error("unknown preset `{0}` (known: {1})")]
    UnknownPreset(String, String),
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("plot kind `{kind}` cannot be drawn from {source_kind}")]
    KindMismatch { kind: &'static str, source_kind: &'static str },
    #[error(transparent)]
    Core(#[from] platoon_core::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}
