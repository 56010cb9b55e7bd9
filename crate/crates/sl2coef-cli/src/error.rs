use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("accuracy target missed at {point}: {source}")]
    Accuracy { point: String, source: sl2coef::Error },
    #[error("at {point}: {source}")]
    Numeric { point: String, source: sl2coef::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Wraps a library error raised while evaluating `point`.
    pub fn at(point: impl Into<String>, source: sl2coef::Error) -> Self {
        let point = point.into();
        match source {
            sl2coef::Error::Accuracy { .. } => CliError::Accuracy { point, source },
            sl2coef::Error::InvalidParameter(msg) => CliError::Usage(format!("{point}: {msg}")),
            _ => CliError::Numeric { point, source },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Accuracy { .. } => 65,
            _ => 1,
        }
    }
}
