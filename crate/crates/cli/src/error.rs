use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("record {index}{label}: {message}")]
    Schema { index: usize, label: String, message: String },
    #[error(transparent)]
    Engine(#[from] ihpair_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn schema(index: usize, label: Option<&str>, message: impl Into<String>) -> Self {
        let label = label.map(|l| format!(" ({l})")).unwrap_or_default();
        CliError::Schema { index, label, message: message.into() }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        use ihpair_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Schema { .. } => 2,
            CliError::Engine(E::InvalidSpec(_) | E::OutOfRange(_)) => 2,
            CliError::Engine(E::TruncationTooSmall(_)) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::schema(3, Some("l"), "bad").exit_code(), 2);
        assert_eq!(CliError::from(ihpair_core::Error::TruncationTooSmall("w".into())).exit_code(), 3);
        assert_eq!(CliError::from(ihpair_core::Error::InvalidSpec("s".into())).exit_code(), 2);
        assert_eq!(CliError::schema(3, Some("l"), "bad").to_string(), "record 3 (l): bad");
    }
}
