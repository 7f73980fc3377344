use std::path::PathBuf;

use netrobust_learn::LearnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] netrobust_core::Error),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("statistics: {0}")]
    Stats(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
