use serde::Serialize;
use thiserror::Error;

/// A configuration problem, located by a dotted field path such as
/// `checks[0].weight`. Syntax errors inside expressions also carry the
/// byte offset within the field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[error("config error at {}{}: {message}", if path.is_empty() { "<root>" } else { path }, offset.map(|o| format!(" (offset {o})")).unwrap_or_default())]
pub struct ConfigError {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(path: &str, message: &str) -> Self {
        ConfigError { path: path.to_string(), offset: None, message: message.to_string() }
    }

    pub fn with_offset(mut self, offset: usize) -> Self {
        self.offset = Some(offset);
        self
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error("thread pool: {0}")]
    Pool(String),
}
